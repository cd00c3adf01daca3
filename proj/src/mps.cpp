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

#include "qelm/mps.hpp"

#include <algorithm>
#include <string>

namespace qelm {

MPSState::MPSState(int n_qubits, std::vector<Site> sites) : n_(n_qubits), sites_(std::move(sites)) {
    require(static_cast<int>(sites_.size()) == n_, ErrorCode::DimensionMismatch, "one site per qubit required");
}

std::vector<int> MPSState::bond_dimensions() const {
    std::vector<int> out;
    for (int k = 0; k + 1 < n_; ++k) out.push_back(static_cast<int>(sites_[static_cast<std::size_t>(k)][0].cols()));
    return out;
}

int MPSState::max_bond_dimension() const {
    const auto dims = bond_dimensions();
    return dims.empty() ? 1 : *std::max_element(dims.begin(), dims.end());
}

VectorXcd MPSState::to_vector() const {
    // Rows index the already-contracted qubits (qubit 0 least significant).
    MatrixXcd left = MatrixXcd::Ones(1, 1);
    for (const auto& site : sites_) {
        const Index rows = left.rows();
        MatrixXcd next(2 * rows, site[0].cols());
        next.topRows(rows) = left * site[0];
        next.bottomRows(rows) = left * site[1];
        left = std::move(next);
    }
    return left.col(0);
}

MPSState to_mps(const StateVector& state, int chi_max) {
    require(chi_max >= 1, ErrorCode::InvalidArgument, "chi_max must be >= 1");
    const int n = state.n_qubits();
    std::vector<MPSState::Site> sites;
    sites.reserve(static_cast<std::size_t>(n));

    // remainder(a, s + 2 r): left bond a, current physical index s, rest r.
    MatrixXcd remainder = state.amplitudes().transpose();
    for (int k = 0; k < n; ++k) {
        const Index chi_l = remainder.rows();
        const Index rest = remainder.cols() / 2;
        if (k == n - 1) {
            MPSState::Site site{remainder.col(0), remainder.col(1)};
            sites.push_back(std::move(site));
            break;
        }
        // Regroup to M(a + chi_l s, r).
        MatrixXcd m(2 * chi_l, rest);
        for (Index r = 0; r < rest; ++r) {
            m.col(r).head(chi_l) = remainder.col(2 * r);
            m.col(r).tail(chi_l) = remainder.col(2 * r + 1);
        }
        Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& s = svd.singularValues();
        Index keep = 0;
        const double cutoff = s.size() > 0 ? 1e-12 * s(0) : 0.0;
        while (keep < s.size() && keep < chi_max && s(keep) > cutoff) ++keep;
        keep = std::max<Index>(keep, 1);

        const MatrixXcd u = svd.matrixU().leftCols(keep);
        MPSState::Site site{u.topRows(chi_l), u.bottomRows(chi_l)};
        sites.push_back(std::move(site));
        remainder = s.head(keep).cast<cplx>().asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    }
    return MPSState(n, std::move(sites));
}

double fidelity(const MPSState& mps, const StateVector& state) {
    require(mps.n_qubits() == state.n_qubits(), ErrorCode::DimensionMismatch,
            "MPS and state qubit counts differ");
    const VectorXcd v = mps.to_vector();
    const double nv = v.squaredNorm();
    const double ns = state.amplitudes().squaredNorm();
    if (nv == 0.0 || ns == 0.0) return 0.0;
    const double f = std::norm(v.dot(state.amplitudes())) / (nv * ns);
    return std::clamp(f, 0.0, 1.0);
}

int min_bond_dimension(const StateVector& state, double fidelity_floor) {
    require(fidelity_floor > 0.0 && fidelity_floor <= 1.0, ErrorCode::InvalidArgument,
            "fidelity floor must lie in (0, 1]");
    int lo = 1;
    int hi = 1 << (state.n_qubits() / 2);
    // A floor of exactly 1 is met by the exact decomposition up to rounding.
    const double target = std::min(fidelity_floor, 1.0 - 1e-12);
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (fidelity(to_mps(state, mid), state) >= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace qelm
