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

#include "qelm/eigentask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qelm/measurement.hpp"

namespace qelm {

VGEstimate estimate_VG(const MatrixXd& freqs, long shots) {
    require(freqs.rows() >= 2, ErrorCode::InsufficientData, "need at least two inputs");
    require(shots >= 2, ErrorCode::InsufficientData, "need at least two shots per input");
    require(freqs.allFinite(), ErrorCode::NonFinite, "frequencies must be finite");
    const double T = static_cast<double>(freqs.rows());
    const double S = static_cast<double>(shots);
    const VectorXd mean = freqs.colwise().mean().transpose();
    const MatrixXd second = freqs.transpose() * freqs / T;

    VGEstimate est;
    est.V = (S / (S - 1.0)) * (MatrixXd(mean.asDiagonal()) - second);
    est.G = second - est.V / S;
    est.V = 0.5 * (est.V + est.V.transpose());
    est.G = 0.5 * (est.G + est.G.transpose());
    est.n_inputs = freqs.rows();
    est.shots = shots;
    return est;
}

VGEstimate estimate_VG_exact(const MatrixXd& probs) {
    require(probs.rows() >= 2, ErrorCode::InsufficientData, "need at least two inputs");
    const double T = static_cast<double>(probs.rows());
    const VectorXd mean = probs.colwise().mean().transpose();
    VGEstimate est;
    est.G = probs.transpose() * probs / T;
    est.V = MatrixXd(mean.asDiagonal()) - est.G;
    est.n_inputs = probs.rows();
    est.shots = 0;
    return est;
}

EigentaskSolution solve_eigentasks(const MatrixXd& V, const MatrixXd& G, double rank_tol,
                                   const MatrixXd& subspace) {
    return solve_generalized(V, G, rank_tol, subspace);
}

Index EigentaskBasis::count() const {
    Index n = 0;
    for (const auto& s : subsets) n += s.beta2.size();
    return n;
}

VectorXd EigentaskBasis::all_beta2() const {
    VectorXd out(count());
    Index k = 0;
    for (const auto& s : subsets) {
        out.segment(k, s.beta2.size()) = s.beta2;
        k += s.beta2.size();
    }
    return out;
}

namespace {

MatrixXd orthonormal_range(const MatrixXd& A, double rel_tol) {
    Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rel_tol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

}  // namespace

MatrixXd effect_span(int weight) { return orthonormal_range(povm_effect_map(weight), 1e-12); }

EigentaskBasis local_eigentasks(const std::vector<VGEstimate>& estimates,
                                const std::vector<std::vector<int>>& subsets, double rank_tol) {
    require(estimates.size() == subsets.size(), ErrorCode::DimensionMismatch,
            "one estimate per subset required");
    EigentaskBasis basis;
    basis.rank_tol = rank_tol;
    basis.shots = estimates.empty() ? 0 : estimates.front().shots;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        const auto& est = estimates[s];
        const int w = static_cast<int>(subsets[s].size());
        const Index K = cells_for_weight(w);
        require(est.V.rows() == K && est.G.rows() == K, ErrorCode::DimensionMismatch,
                "subset of weight " + std::to_string(w) + " needs " + std::to_string(K) + " cells");

        const MatrixXd span = effect_span(w);
        const VectorXd ones = VectorXd::Ones(K);
        const double norm2 = ones.dot(est.G * ones);
        require(norm2 > 0, ErrorCode::Degenerate, "constant direction has no signal");
        const VectorXd c = ones / std::sqrt(norm2);

        // Span directions made G-orthogonal to the constant; rank drops by one.
        const MatrixXd deflated = span - c * (c.transpose() * est.G * span);
        const MatrixXd complement = orthonormal_range(deflated, 1e-8);

        const EigentaskSolution sol = solve_eigentasks(est.V, est.G, rank_tol, complement);
        SubsetEigentasks sub;
        sub.id = static_cast<int>(s);
        sub.qubits = subsets[s];
        sub.beta2 = sol.beta2;
        sub.coefficients = sol.h;
        sub.constant = c;
        sub.constant_beta2 = std::max(0.0, c.dot(est.V * c));
        basis.subsets.push_back(std::move(sub));
    }
    return basis;
}

EigentaskBasis local_eigentasks(const std::vector<MatrixXd>& freqs, const std::vector<std::vector<int>>& subsets,
                                long shots, double rank_tol) {
    std::vector<VGEstimate> est;
    est.reserve(freqs.size());
    for (const auto& f : freqs) est.push_back(estimate_VG(f, shots));
    return local_eigentasks(est, subsets, rank_tol);
}

EigentaskBasis apply_cutoff(const EigentaskBasis& basis, double shots, double lambda) {
    require(lambda > 0, ErrorCode::InvalidArgument, "cutoff lambda must be positive");
    require(shots > 0, ErrorCode::InvalidArgument, "shot budget must be positive");
    EigentaskBasis out = basis;
    for (auto& sub : out.subsets) {
        std::vector<Index> keep;
        for (Index l = 0; l < sub.beta2.size(); ++l)
            if (sub.beta2(l) / shots < lambda) keep.push_back(l);
        VectorXd b(static_cast<Index>(keep.size()));
        MatrixXd h(sub.coefficients.rows(), static_cast<Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            b(static_cast<Index>(j)) = sub.beta2(keep[j]);
            h.col(static_cast<Index>(j)) = sub.coefficients.col(keep[j]);
        }
        sub.beta2 = std::move(b);
        sub.coefficients = std::move(h);
    }
    return out;
}

RECReport rec(const VectorXd& beta2, double shots, double lambda) {
    require(shots >= 1, ErrorCode::InvalidArgument, "shot budget must be >= 1");
    RECReport r;
    r.lambda = lambda;
    r.shots = shots;
    r.n_total = beta2.size();
    for (Index l = 0; l < beta2.size(); ++l) {
        const double nsr = beta2(l) / shots;
        const double c = 1.0 / (1.0 + nsr);
        r.c_total += c;
        if (nsr < lambda) {
            r.c_lambda += c;
            ++r.n_retained;
        }
    }
    return r;
}

RECReport rec(const EigentaskBasis& basis, double shots, double lambda) {
    return rec(basis.all_beta2(), shots, lambda);
}

MatrixXd eigentask_features(const std::vector<MatrixXd>& freqs, const EigentaskBasis& basis) {
    require(freqs.size() == basis.subsets.size(), ErrorCode::DimensionMismatch,
            "one frequency block per subset required");
    const Index T = freqs.empty() ? 0 : freqs.front().rows();
    MatrixXd out(T, basis.count() + 1);
    out.col(0).setOnes();
    Index k = 1;
    for (std::size_t s = 0; s < freqs.size(); ++s) {
        const auto& sub = basis.subsets[s];
        require(freqs[s].rows() == T, ErrorCode::DimensionMismatch, "frequency blocks differ in row count");
        require(freqs[s].cols() == sub.coefficients.rows(), ErrorCode::DimensionMismatch,
                "frequency length does not match eigentask dimension");
        out.middleCols(k, sub.coefficients.cols()) = freqs[s] * sub.coefficients;
        k += sub.coefficients.cols();
    }
    return out;
}

ScalingMode parse_scaling(const std::string& s) {
    if (s == "unit") return ScalingMode::Unit;
    if (s == "nsr") return ScalingMode::NsrAware;
    if (s == "signal") return ScalingMode::Signal;
    fail(ErrorCode::InvalidArgument, "unknown scaling '" + s + "' (expected unit|signal|nsr)");
}

std::string to_string(ScalingMode m) {
    switch (m) {
        case ScalingMode::Unit: return "unit";
        case ScalingMode::NsrAware: return "nsr";
        case ScalingMode::Signal: return "signal";
    }
    return "unit";
}

FeatureScaler FeatureScaler::fit(const MatrixXd& train, ScalingMode mode, const VectorXd& beta2) {
    require(train.rows() >= 1 && train.cols() >= 1, ErrorCode::InsufficientData, "empty training matrix");
    const Index m = train.cols() - 1;
    if (mode == ScalingMode::NsrAware)
        require(beta2.size() == m, ErrorCode::DimensionMismatch, "NSR scaling needs one beta^2 per feature");

    FeatureScaler sc;
    sc.mode_ = mode;
    sc.n_cols_ = train.cols();
    sc.mu_ = VectorXd::Zero(m);
    sc.sigma_ = VectorXd::Zero(m);
    sc.mult_ = VectorXd::Zero(m);
    for (Index j = 0; j < m; ++j) {
        const auto col = train.col(j + 1);
        const double mu = col.mean();
        const double var = (col.array() - mu).square().mean();
        sc.mu_(j) = mu;
        sc.sigma_(j) = std::sqrt(var);
        if (sc.sigma_(j) <= 1e-12 * std::max(1.0, std::abs(mu)))
            sc.dropped_.push_back(j + 1);
        else
            sc.kept_.push_back(j + 1);
    }

    double max_sigma = 0.0, min_beta = INFINITY;
    for (Index c : sc.kept_) {
        max_sigma = std::max(max_sigma, sc.sigma_(c - 1));
        if (mode == ScalingMode::NsrAware) min_beta = std::min(min_beta, std::sqrt(std::max(beta2(c - 1), 0.0)));
    }
    for (Index c : sc.kept_) {
        const Index j = c - 1;
        switch (mode) {
            case ScalingMode::Unit: sc.mult_(j) = 1.0; break;
            case ScalingMode::Signal: sc.mult_(j) = sc.sigma_(j) / max_sigma; break;
            case ScalingMode::NsrAware: {
                // beta^{-1} / max beta^{-1} = beta_min / beta
                const double beta = std::sqrt(std::max(beta2(j), 0.0));
                sc.mult_(j) = beta == 0.0 ? 1.0 : min_beta / beta;
                break;
            }
        }
    }
    return sc;
}

MatrixXd FeatureScaler::transform(const MatrixXd& features) const {
    require(features.cols() == n_cols_, ErrorCode::DimensionMismatch, "feature count differs from fit");
    MatrixXd out(features.rows(), static_cast<Index>(kept_.size()) + 1);
    out.col(0) = features.col(0);
    for (std::size_t k = 0; k < kept_.size(); ++k) {
        const Index c = kept_[k];
        const Index j = c - 1;
        out.col(static_cast<Index>(k) + 1) =
            ((features.col(c).array() - mu_(j)) / sigma_(j) * mult_(j)).matrix();
    }
    return out;
}

}  // namespace qelm
