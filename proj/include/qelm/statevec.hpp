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
#include <string>
#include <vector>

#include "qelm/circuit.hpp"
#include "qelm/common.hpp"

namespace qelm {

inline constexpr int kDefaultQubitCap = 16;

/// Dense pure state of `n_qubits`. Qubit 0 is the least significant bit of
/// the basis index.
template <typename Scalar>
class BasicStateVector {
  public:
    using Complex = std::complex<Scalar>;
    using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    BasicStateVector() = default;
    BasicStateVector(int n_qubits, Amplitudes amps) : n_(n_qubits), amps_(std::move(amps)) {
        require(amps_.size() == (Index(1) << n_), ErrorCode::DimensionMismatch,
                "amplitude vector must have length 2^N");
    }

    int n_qubits() const { return n_; }
    Index dim() const { return amps_.size(); }
    const Amplitudes& amplitudes() const { return amps_; }
    Amplitudes& amplitudes() { return amps_; }
    Scalar norm() const { return amps_.norm(); }

    /// Applies a 4x4 gate to qubits (qa, qb); qa indexes the low bit of the
    /// gate's basis.
    void apply2(const Eigen::Matrix<Complex, 4, 4>& U, int qa, int qb) {
        const Index ma = Index(1) << qa;
        const Index mb = Index(1) << qb;
        const Index lo = std::min(ma, mb);
        const Index hi = std::max(ma, mb);
        const Index d = dim();
        for (Index base = 0; base < d; ++base) {
            if (base & (lo | hi)) continue;
            const Index i0 = base, i1 = base | ma, i2 = base | mb, i3 = base | ma | mb;
            const Complex a0 = amps_(i0), a1 = amps_(i1), a2 = amps_(i2), a3 = amps_(i3);
            amps_(i0) = U(0, 0) * a0 + U(0, 1) * a1 + U(0, 2) * a2 + U(0, 3) * a3;
            amps_(i1) = U(1, 0) * a0 + U(1, 1) * a1 + U(1, 2) * a2 + U(1, 3) * a3;
            amps_(i2) = U(2, 0) * a0 + U(2, 1) * a1 + U(2, 2) * a2 + U(2, 3) * a3;
            amps_(i3) = U(3, 0) * a0 + U(3, 1) * a1 + U(3, 2) * a2 + U(3, 3) * a3;
        }
    }

  private:
    int n_ = 0;
    Amplitudes amps_;
};

using StateVector = BasicStateVector<double>;

/// Product of Bell pairs (|00> + |11>)/sqrt(2) on (0,1), (2,3), ...
StateVector init_bell_chain(int n_qubits, int qubit_cap = kDefaultQubitCap);

/// |0...0>.
StateVector init_zero(int n_qubits, int qubit_cap = kDefaultQubitCap);

StateVector initial_state(const BoundCircuit& bound, int qubit_cap = kDefaultQubitCap);

/// Applies every layer of `bound` in schedule order.
StateVector apply_circuit(StateVector state, const BoundCircuit& bound);

/// Applies the inverse of `bound` (layers reversed, blocks adjointed).
StateVector apply_circuit_inverse(StateVector state, const BoundCircuit& bound);

/// Final state of `spec` bound to `u`, starting from the schedule's initial state.
StateVector run_circuit(const CircuitSpec& spec, const VectorXd& u, int qubit_cap = kDefaultQubitCap);

/// Weight-1 or nearest-neighbour weight-2 Pauli string on the ring.
struct PauliObservable {
    int weight = 1;
    std::array<int, 2> qubits{0, 0};
    std::array<char, 2> labels{'Z', 'Z'};

    static PauliObservable single(char label, int q);
    static PauliObservable pair(char la, char lb, int qa, int qb);

    /// "X@3" or "ZZ@5-6".
    std::string name() const;
    bool operator==(const PauliObservable&) const = default;
};

/// Parses names of the form produced by `PauliObservable::name()`.
PauliObservable parse_observable(const std::string& name);

/// Checks labels and ring adjacency for an `n_qubits` ring.
void validate_observable(const PauliObservable& obs, int n_qubits);

/// <psi|P|psi>; the imaginary residue is discarded.
double expect(const StateVector& state, const PauliObservable& obs);

enum class BondSet { Ring, DisjointPairs };

/// Single-qubit observables with the given labels on every qubit.
std::vector<PauliObservable> weight1_observables(int n_qubits, const std::string& labels = "XYZ");

/// Two-qubit labels (e.g. {"XX","YY","ZZ"}) on every ring bond or on the
/// disjoint pairs (0,1),(2,3),...
std::vector<PauliObservable> weight2_observables(int n_qubits, const std::vector<std::string>& labels,
                                                 BondSet bonds = BondSet::Ring);

std::vector<std::string> all_pair_labels();

/// Weight-1 {X,Y,Z} plus weight-2 {XX,YY,ZZ} on all ring bonds.
std::vector<PauliObservable> default_observables(int n_qubits);

/// Weight-1 {X,Y,Z} plus all nine weight-2 labels on all ring bonds.
std::vector<PauliObservable> full_observables(int n_qubits);

/// Expectations of `observables`; entry 0 is the bias 1.
VectorXd feature_row(const StateVector& state, const std::vector<PauliObservable>& observables);
VectorXd feature_row(const CircuitSpec& spec, const VectorXd& u,
                     const std::vector<PauliObservable>& observables);

/// One feature row per input row of `inputs`; samples run in parallel.
MatrixXd feature_matrix(const CircuitSpec& spec, const MatrixXd& inputs,
                        const std::vector<PauliObservable>& observables);

std::vector<std::string> feature_names(const std::vector<PauliObservable>& observables);

}  // namespace qelm
