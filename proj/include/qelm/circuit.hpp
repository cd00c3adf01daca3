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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qelm/common.hpp"

namespace qelm {

/// Raw angles of one two-qubit kicked-Ising block. The time step is absorbed
/// into the parameters.
struct BlockParams {
    double J = 0.0;  ///< ZZ coupling
    double h = 0.0;  ///< longitudinal field
    double b = 0.0;  ///< transverse kick
};

/// Distribution hyperparameters for block sampling. Means and standard
/// deviations of the normal laws plus the input strength `a_in`.
struct HyperParams {
    double a_in = 0.2;
    double b0 = 0.707;
    double db = 0.031;
    double h0 = 0.683;
    double dh = 0.034;
    double J0 = 0.237;
    double dJ = 0.038;
    std::uint64_t seed = 0;

    /// The reference operating point used for every experiment.
    static HyperParams reference(std::uint64_t seed = 0) {
        HyperParams hp;
        hp.seed = seed;
        return hp;
    }

    void validate() const;
    bool operator==(const HyperParams&) const = default;
};

enum class LayerKind { Encoding, Dynamics };
enum class BondParity { Even, Odd };
enum class InitialState { BellPairs, AllZero };

/// Brickwork layer layout on a ring of `n_qubits`.
///
/// Even layers act on (0,1),(2,3),...; odd layers on (1,2),...,(N-1,0).
/// Encoding layers read their input through a cyclic offset that advances
/// by `encoding_stride` per encoding layer of the same source.
struct LayerSchedule {
    int n_qubits = 0;
    std::vector<LayerKind> kinds;
    std::vector<BondParity> parities;
    int encoding_stride = 2;
    /// Input source per encoding layer (empty means every layer reads source 0).
    std::vector<int> encoding_sources;
    InitialState initial_state = InitialState::BellPairs;

    /// `groups` repetitions of `n_encoding` encoding layers followed by
    /// `n_dynamics` dynamics layers, cut to `n_layers` layers.
    static LayerSchedule brickwork(int n_qubits, int n_layers, int n_encoding = 1,
                                   int n_dynamics = 3, int encoding_stride = 2);

    /// Default schedule: N/2 layers of the [1 encoding, 3 dynamics] pattern.
    static LayerSchedule standard(int n_qubits) { return brickwork(n_qubits, n_qubits / 2); }

    int n_layers() const { return static_cast<int>(kinds.size()); }
    int blocks_per_layer() const { return n_qubits / 2; }
    int n_encoding_layers() const;
    int n_sources() const;
    int source_of(int encoding_ordinal) const;

    /// Qubit pairs acted on by `layer`, in block order.
    std::vector<std::pair<int, int>> pairs(int layer) const;

    /// Input elements one source can feed without an encoding layer reusing
    /// a block: (#encoding layers of the source) x N/2.
    int input_capacity(int source = 0) const;

    void validate() const;
    bool operator==(const LayerSchedule&) const = default;
};

/// Frozen parameters of one block. `b` is empty for encoding blocks.
struct FrozenBlock {
    double J = 0.0;
    double h = 0.0;
    std::optional<double> b;
    bool operator==(const FrozenBlock&) const = default;
};

/// Per encoding layer: the input source it reads and, per block, the offset
/// into that source (reduced modulo the source length at bind time).
struct EncodingSlot {
    int layer = 0;
    int source = 0;
    std::vector<int> offsets;
    bool operator==(const EncodingSlot&) const = default;
};

/// A sampled circuit. Immutable after construction.
class CircuitSpec {
  public:
    CircuitSpec(LayerSchedule schedule, HyperParams hp, std::vector<std::vector<FrozenBlock>> blocks,
                std::vector<EncodingSlot> encoding);

    const LayerSchedule& schedule() const { return schedule_; }
    const HyperParams& hyper() const { return hp_; }
    double a_in() const { return hp_.a_in; }
    int n_qubits() const { return schedule_.n_qubits; }
    const std::vector<std::vector<FrozenBlock>>& blocks() const { return blocks_; }
    const std::vector<EncodingSlot>& encoding() const { return encoding_; }

    bool operator==(const CircuitSpec&) const = default;

  private:
    LayerSchedule schedule_;
    HyperParams hp_;
    std::vector<std::vector<FrozenBlock>> blocks_;
    std::vector<EncodingSlot> encoding_;
};

/// A circuit with every kick bound; ready for simulation.
struct BoundCircuit {
    int n_qubits = 0;
    InitialState initial_state = InitialState::BellPairs;
    std::vector<std::vector<std::pair<int, int>>> pairs;
    std::vector<std::vector<BlockParams>> params;

    bool operator==(const BoundCircuit&) const = default;
};

/// Draws J ~ N(J0, dJ^2) and h ~ N(h0, dh^2) for every block and
/// b ~ N(b0, db^2) for dynamics blocks. Deterministic in `hp.seed`.
CircuitSpec sample_circuit(const HyperParams& hp, const LayerSchedule& schedule);

/// Binds b = a_in * u[(k + stride * l) mod d] on encoding layer l, block k.
BoundCircuit bind_input(const CircuitSpec& spec, const VectorXd& u);

/// Multi-source binding; encoding slot s reads `sources[slot.source]`.
BoundCircuit bind_inputs(const CircuitSpec& spec, std::span<const VectorXd> sources);

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

/// exp(-i b (XI + IX)) * exp(-i (J ZZ + h (ZI + IZ))), basis |q1 q0> with
/// the first qubit of the pair as the least significant bit.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 4, 4> block_unitary(Scalar J, Scalar h, Scalar b) {
    using C = std::complex<Scalar>;
    using M4 = Eigen::Matrix<C, 4, 4>;
    const C I(0, 1);

    // Ising part is diagonal: phase exp(-i (J z0 z1 + h (z0 + z1))).
    Eigen::Matrix<C, 4, 1> ising;
    for (int k = 0; k < 4; ++k) {
        const Scalar z0 = (k & 1) ? Scalar(-1) : Scalar(1);
        const Scalar z1 = (k & 2) ? Scalar(-1) : Scalar(1);
        ising(k) = std::exp(-I * (J * z0 * z1 + h * (z0 + z1)));
    }

    // The kick factorises: exp(-i b X) (x) exp(-i b X).
    Eigen::Matrix<C, 2, 2> rx;
    rx << C(std::cos(b)), -I * std::sin(b), -I * std::sin(b), C(std::cos(b));
    M4 u;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) u(r, c) = rx(r >> 1, c >> 1) * rx(r & 1, c & 1) * ising(c);
    return u;
}

Matrix4c block_unitary(const BlockParams& p);

}  // namespace qelm
