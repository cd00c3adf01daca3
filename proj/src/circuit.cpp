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

#include "qelm/circuit.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "qelm/rng.hpp"

namespace qelm {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void HyperParams::validate() const {
    for (double v : {a_in, b0, db, h0, dh, J0, dJ})
        require(finite(v), ErrorCode::NonFinite, "hyperparameters must be finite");
    require(db >= 0 && dh >= 0 && dJ >= 0, ErrorCode::InvalidArgument,
            "standard deviations must be non-negative");
}

LayerSchedule LayerSchedule::brickwork(int n_qubits, int n_layers, int n_encoding, int n_dynamics,
                                       int encoding_stride) {
    require(n_encoding >= 0 && n_dynamics >= 0 && n_encoding + n_dynamics > 0,
            ErrorCode::InvalidArgument, "layer pattern must be non-empty");
    LayerSchedule s;
    s.n_qubits = n_qubits;
    s.encoding_stride = encoding_stride;
    const int period = n_encoding + n_dynamics;
    for (int l = 0; l < n_layers; ++l) {
        s.kinds.push_back(l % period < n_encoding ? LayerKind::Encoding : LayerKind::Dynamics);
        s.parities.push_back(l % 2 == 0 ? BondParity::Even : BondParity::Odd);
    }
    s.validate();
    return s;
}

int LayerSchedule::n_encoding_layers() const {
    return static_cast<int>(std::count(kinds.begin(), kinds.end(), LayerKind::Encoding));
}

int LayerSchedule::source_of(int encoding_ordinal) const {
    if (encoding_sources.empty()) return 0;
    return encoding_sources.at(static_cast<std::size_t>(encoding_ordinal));
}

int LayerSchedule::n_sources() const {
    if (encoding_sources.empty()) return n_encoding_layers() > 0 ? 1 : 0;
    return *std::max_element(encoding_sources.begin(), encoding_sources.end()) + 1;
}

std::vector<std::pair<int, int>> LayerSchedule::pairs(int layer) const {
    const int offset = parities.at(static_cast<std::size_t>(layer)) == BondParity::Even ? 0 : 1;
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(n_qubits / 2));
    for (int k = 0; k < n_qubits / 2; ++k) {
        const int a = 2 * k + offset;
        out.emplace_back(a % n_qubits, (a + 1) % n_qubits);
    }
    return out;
}

int LayerSchedule::input_capacity(int source) const {
    int layers = 0;
    for (int e = 0; e < n_encoding_layers(); ++e)
        if (source_of(e) == source) ++layers;
    return layers * blocks_per_layer();
}

void LayerSchedule::validate() const {
    require(n_qubits >= 4, ErrorCode::InvalidArgument, "need at least 4 qubits");
    require(n_qubits % 2 == 0, ErrorCode::InvalidArgument,
            "qubit count must be even, got " + std::to_string(n_qubits));
    require(!kinds.empty(), ErrorCode::InvalidArgument, "schedule has no layers");
    require(kinds.size() == parities.size(), ErrorCode::InvalidArgument,
            "layer kinds and parities differ in length");
    for (std::size_t l = 1; l < parities.size(); ++l)
        require(parities[l] != parities[l - 1], ErrorCode::InvalidArgument,
                "bond parity must alternate between layers");
    require(encoding_stride >= 0, ErrorCode::InvalidArgument, "encoding stride must be >= 0");
    if (!encoding_sources.empty()) {
        require(static_cast<int>(encoding_sources.size()) == n_encoding_layers(),
                ErrorCode::InvalidArgument, "one encoding source per encoding layer required");
        for (int s : encoding_sources)
            require(s >= 0, ErrorCode::InvalidArgument, "encoding source must be >= 0");
    }
}

CircuitSpec::CircuitSpec(LayerSchedule schedule, HyperParams hp,
                         std::vector<std::vector<FrozenBlock>> blocks,
                         std::vector<EncodingSlot> encoding)
    : schedule_(std::move(schedule)), hp_(hp), blocks_(std::move(blocks)),
      encoding_(std::move(encoding)) {
    schedule_.validate();
    hp_.validate();
    const auto n_layers = static_cast<std::size_t>(schedule_.n_layers());
    require(blocks_.size() == n_layers, ErrorCode::DimensionMismatch,
            "one block list per layer required");
    for (std::size_t l = 0; l < n_layers; ++l) {
        require(static_cast<int>(blocks_[l].size()) == schedule_.blocks_per_layer(),
                ErrorCode::DimensionMismatch, "each layer holds N/2 blocks");
        const bool enc = schedule_.kinds[l] == LayerKind::Encoding;
        for (const auto& blk : blocks_[l]) {
            require(finite(blk.J) && finite(blk.h), ErrorCode::NonFinite, "non-finite block parameter");
            require(enc != blk.b.has_value(), ErrorCode::InvalidArgument,
                    "encoding blocks leave b unbound; dynamics blocks bind it");
            if (blk.b) require(finite(*blk.b), ErrorCode::NonFinite, "non-finite block parameter");
        }
    }
    require(static_cast<int>(encoding_.size()) == schedule_.n_encoding_layers(),
            ErrorCode::DimensionMismatch, "one encoding slot per encoding layer required");
    for (const auto& slot : encoding_) {
        require(slot.layer >= 0 && slot.layer < schedule_.n_layers() &&
                    schedule_.kinds[static_cast<std::size_t>(slot.layer)] == LayerKind::Encoding,
                ErrorCode::InvalidArgument, "encoding slot must point at an encoding layer");
        require(static_cast<int>(slot.offsets.size()) == schedule_.blocks_per_layer(),
                ErrorCode::DimensionMismatch, "encoding slot needs one offset per block");
    }
}

CircuitSpec sample_circuit(const HyperParams& hp, const LayerSchedule& schedule) {
    hp.validate();
    schedule.validate();

    Rng rng = make_rng(hp.seed, streams::kCircuit);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](double mean, double sd) { return mean + sd * normal(rng); };

    std::vector<std::vector<FrozenBlock>> blocks(static_cast<std::size_t>(schedule.n_layers()));
    std::vector<EncodingSlot> encoding;
    std::vector<int> per_source_ordinal(static_cast<std::size_t>(std::max(1, schedule.n_sources())), 0);

    int enc_ordinal = 0;
    for (int l = 0; l < schedule.n_layers(); ++l) {
        const bool enc = schedule.kinds[static_cast<std::size_t>(l)] == LayerKind::Encoding;
        auto& layer = blocks[static_cast<std::size_t>(l)];
        for (int k = 0; k < schedule.blocks_per_layer(); ++k) {
            FrozenBlock blk;
            blk.J = draw(hp.J0, hp.dJ);
            blk.h = draw(hp.h0, hp.dh);
            if (!enc) blk.b = draw(hp.b0, hp.db);
            layer.push_back(blk);
        }
        if (enc) {
            EncodingSlot slot;
            slot.layer = l;
            slot.source = schedule.source_of(enc_ordinal);
            const int shift = schedule.encoding_stride *
                              per_source_ordinal[static_cast<std::size_t>(slot.source)]++;
            for (int k = 0; k < schedule.blocks_per_layer(); ++k) slot.offsets.push_back(k + shift);
            encoding.push_back(std::move(slot));
            ++enc_ordinal;
        }
    }
    return CircuitSpec(schedule, hp, std::move(blocks), std::move(encoding));
}

BoundCircuit bind_inputs(const CircuitSpec& spec, std::span<const VectorXd> sources) {
    const auto& sched = spec.schedule();
    require(static_cast<int>(sources.size()) >= sched.n_sources(), ErrorCode::DimensionMismatch,
            "circuit reads " + std::to_string(sched.n_sources()) + " input sources");
    for (std::size_t s = 0; s < sources.size(); ++s) {
        require(sources[s].allFinite(), ErrorCode::NonFinite, "input contains non-finite entries");
        const int d = static_cast<int>(sources[s].size());
        if (static_cast<int>(s) < sched.n_sources()) {
            require(d > 0, ErrorCode::InvalidArgument, "input source is empty");
            require(d <= sched.input_capacity(static_cast<int>(s)), ErrorCode::CapacityExceeded,
                    "input of length " + std::to_string(d) + " exceeds capacity " +
                        std::to_string(sched.input_capacity(static_cast<int>(s))));
        }
    }

    BoundCircuit out;
    out.n_qubits = sched.n_qubits;
    out.initial_state = sched.initial_state;
    for (int l = 0; l < sched.n_layers(); ++l) {
        out.pairs.push_back(sched.pairs(l));
        std::vector<BlockParams> layer;
        for (const auto& blk : spec.blocks()[static_cast<std::size_t>(l)])
            layer.push_back({blk.J, blk.h, blk.b.value_or(0.0)});
        out.params.push_back(std::move(layer));
    }
    for (const auto& slot : spec.encoding()) {
        const VectorXd& u = sources[static_cast<std::size_t>(slot.source)];
        const auto d = static_cast<int>(u.size());
        auto& layer = out.params[static_cast<std::size_t>(slot.layer)];
        for (std::size_t k = 0; k < layer.size(); ++k)
            layer[k].b = spec.a_in() * u(slot.offsets[k] % d);
    }
    return out;
}

BoundCircuit bind_input(const CircuitSpec& spec, const VectorXd& u) {
    require(spec.schedule().n_sources() <= 1, ErrorCode::InvalidArgument,
            "circuit reads several sources; use bind_inputs");
    return bind_inputs(spec, std::span<const VectorXd>(&u, 1));
}

Matrix4c block_unitary(const BlockParams& p) {
    require(finite(p.J) && finite(p.h) && finite(p.b), ErrorCode::NonFinite,
            "block parameters must be finite");
    return block_unitary<double>(p.J, p.h, p.b);
}

}  // namespace qelm
