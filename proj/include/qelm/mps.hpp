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

#include <array>
#include <vector>

#include "qelm/common.hpp"
#include "qelm/statevec.hpp"

namespace qelm {

inline constexpr double kDefaultFidelityFloor = 1.0 - 5e-4;

/// Matrix-product state of a qubit chain (site k = qubit k). Every site but
/// the last is a left-canonical isometry; the last site carries the norm.
class MPSState {
  public:
    using Site = std::array<MatrixXcd, 2>;  ///< A^0, A^1, each chi_left x chi_right

    MPSState(int n_qubits, std::vector<Site> sites);

    int n_qubits() const { return n_; }
    const std::vector<Site>& sites() const { return sites_; }

    /// Bond dimension at each of the N-1 cuts.
    std::vector<int> bond_dimensions() const;
    int max_bond_dimension() const;

    /// Contracts back to a (possibly unnormalised) amplitude vector.
    VectorXcd to_vector() const;

  private:
    int n_;
    std::vector<Site> sites_;
};

/// Left-to-right SVD sweep keeping at most `chi_max` singular values per cut.
/// Singular values below 1e-12 of the largest are always discarded.
MPSState to_mps(const StateVector& state, int chi_max);

/// |<mps|state>|^2 after normalising both.
double fidelity(const MPSState& mps, const StateVector& state);

/// Smallest chi with fidelity(to_mps(state, chi), state) >= floor, by
/// bisection over 1 .. 2^floor(N/2).
int min_bond_dimension(const StateVector& state, double fidelity_floor = kDefaultFidelityFloor);

}  // namespace qelm
