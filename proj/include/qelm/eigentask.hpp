// Copyright 2026 The QELM Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "qelm/common.hpp"

namespace qelm {

/// Single-shot noise covariance V and signal Gram G of a frequency feature
/// family, averaged over the inputs.
struct VGEstimate {
    MatrixXd V;
    MatrixXd G;
    Index n_inputs = 0;
    long shots = 0;  ///< 0 when built from exact probabilities
};

/// From sampled frequencies (one input per row) at `shots` per input:
///   V = S/(S-1) * E_u[diag(p) - p p^T],  G = E_u[p p^T] - V/S.
/// The S/(S-1) factor removes the multinomial bias of the plug-in
/// covariance; subtracting V/S removes the shot-noise floor from G.
VGEstimate estimate_VG(const MatrixXd& freqs, long shots);

/// From exact probabilities: V = E_u[diag(p) - p p^T], G = E_u[p p^T].
VGEstimate estimate_VG_exact(const MatrixXd& probs);

/// Solution of V h = beta^2 G h on the numerically non-null range of G.
/// Columns of `h` are G-orthonormal; `beta2` is ascending.
template <typename Scalar>
struct BasicEigentaskSolution {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> beta2;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h;
};
using EigentaskSolution = BasicEigentaskSolution<double>;

/// Solves within span(subspace) when a K x r orthonormal `subspace` is
/// given. G eigenvalues below rank_tol * max are discarded. Negative
/// estimated NSRs are clamped to zero.
template <typename DerivedV, typename DerivedG>
BasicEigentaskSolution<typename DerivedV::Scalar> solve_generalized(
    const Eigen::MatrixBase<DerivedV>& V, const Eigen::MatrixBase<DerivedG>& G,
    typename DerivedV::Scalar rank_tol,
    const Eigen::Matrix<typename DerivedV::Scalar, Eigen::Dynamic, Eigen::Dynamic>& subspace) {
    using Scalar = typename DerivedV::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    require(V.rows() == V.cols() && G.rows() == G.cols() && V.rows() == G.rows(),
            ErrorCode::DimensionMismatch, "V and G must be square and of equal size");
    const Index K = V.rows();
    const Mat Q = subspace.size() == 0 ? Mat(Mat::Identity(K, K)) : subspace;
    require(Q.rows() == K, ErrorCode::DimensionMismatch, "subspace rows must match V");

    Mat Vs = Q.transpose() * V * Q;
    Mat Gs = Q.transpose() * G * Q;
    Vs = (0.5 * (Vs + Vs.transpose())).eval();
    Gs = (0.5 * (Gs + Gs.transpose())).eval();

    Eigen::SelfAdjointEigenSolver<Mat> ge(Gs);
    const auto& lam = ge.eigenvalues();
    const Scalar lam_max = lam.size() ? lam.maxCoeff() : Scalar(0);
    require(lam_max > Scalar(0) && std::isfinite(static_cast<double>(lam_max)), ErrorCode::Degenerate,
            "G is numerically zero");
    std::vector<Index> keep;
    for (Index i = 0; i < lam.size(); ++i)
        if (lam(i) > rank_tol * lam_max) keep.push_back(i);

    // Whitening W with W^T Gs W = I on the kept range.
    Mat W(Gs.rows(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        W.col(static_cast<Index>(j)) = ge.eigenvectors().col(keep[j]) / std::sqrt(lam(keep[j]));
    Mat M = W.transpose() * Vs * W;
    M = (0.5 * (M + M.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> me(M);

    BasicEigentaskSolution<Scalar> out;
    out.beta2 = me.eigenvalues().cwiseMax(Scalar(0));
    out.h = Q * W * me.eigenvectors();
    // Fix signs: largest-magnitude coefficient positive.
    for (Index j = 0; j < out.h.cols(); ++j) {
        Index arg = 0;
        out.h.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.h(arg, j) < Scalar(0)) out.h.col(j) *= Scalar(-1);
    }
    return out;
}

EigentaskSolution solve_eigentasks(const MatrixXd& V, const MatrixXd& G, double rank_tol = 1e-10,
                                   const MatrixXd& subspace = MatrixXd());

/// Eigentasks of one local subset. `coefficients` holds one column per
/// nontrivial eigentask, ordered by ascending `beta2`; the constant
/// (all-ones) direction is kept apart because the readout has a bias.
struct SubsetEigentasks {
    int id = 0;
    std::vector<int> qubits;
    VectorXd beta2;
    MatrixXd coefficients;
    VectorXd constant;
    double constant_beta2 = 0.0;
};

inline constexpr int kCellOrderVersion = 1;

struct EigentaskBasis {
    long shots = 0;
    double rank_tol = 1e-10;
    std::vector<SubsetEigentasks> subsets;

    Index count() const;
    VectorXd all_beta2() const;  ///< concatenated in feature order
};

/// Orthonormal basis of the span of the randomised-Pauli POVM effects on a
/// one- or two-qubit subset (4 or 16 columns).
MatrixXd effect_span(int weight);

/// Local eigentasks per subset. The problem is restricted to the effect
/// span and, inside it, to the G-orthogonal complement of the constant.
EigentaskBasis local_eigentasks(const std::vector<VGEstimate>& estimates,
                                const std::vector<std::vector<int>>& subsets, double rank_tol = 1e-10);

/// Convenience: `freqs[s]` holds the subset-s frequencies, one input per row.
EigentaskBasis local_eigentasks(const std::vector<MatrixXd>& freqs, const std::vector<std::vector<int>>& subsets,
                                long shots, double rank_tol = 1e-10);

/// Keeps eigentasks with beta^2 / S < lambda.
EigentaskBasis apply_cutoff(const EigentaskBasis& basis, double shots, double lambda);

struct RECReport {
    double c_total = 0.0;
    double c_lambda = 0.0;
    Index n_total = 0;
    Index n_retained = 0;
    double lambda = 1.0;
    double shots = 0.0;
};

/// C_total = sum 1/(1 + beta^2/S); C_lambda sums over beta^2/S < lambda.
RECReport rec(const EigentaskBasis& basis, double shots, double lambda);
RECReport rec(const VectorXd& beta2, double shots, double lambda);

/// Feature matrix with bias column: y_l(u) = h_l . p(u) per subset.
MatrixXd eigentask_features(const std::vector<MatrixXd>& freqs, const EigentaskBasis& basis);

enum class ScalingMode { Unit, NsrAware, Signal };

ScalingMode parse_scaling(const std::string& s);
std::string to_string(ScalingMode m);

/// Per-feature scaling frozen on a training split. Matrices carry the bias
/// in column 0, which passes through untouched. Zero-variance columns are
/// dropped; `dropped()` lists them (as feature-matrix column indices).
class FeatureScaler {
  public:
    /// `beta2` is required for NsrAware, one entry per non-bias column.
    static FeatureScaler fit(const MatrixXd& train, ScalingMode mode, const VectorXd& beta2 = VectorXd());

    MatrixXd transform(const MatrixXd& features) const;

    ScalingMode mode() const { return mode_; }
    const std::vector<Index>& kept() const { return kept_; }
    const std::vector<Index>& dropped() const { return dropped_; }
    const VectorXd& mean() const { return mu_; }
    const VectorXd& stddev() const { return sigma_; }
    const VectorXd& multiplier() const { return mult_; }

  private:
    ScalingMode mode_ = ScalingMode::Unit;
    Index n_cols_ = 0;
    std::vector<Index> kept_, dropped_;
    VectorXd mu_, sigma_, mult_;
};

}  // namespace qelm
