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

#include "qelm/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qelm/parallel.hpp"

namespace qelm {

namespace {

void check_size(int n_qubits, int cap) {
    require(n_qubits >= 2 && n_qubits % 2 == 0, ErrorCode::InvalidArgument,
            "qubit count must be even and >= 2, got " + std::to_string(n_qubits));
    require(n_qubits <= cap, ErrorCode::CapacityExceeded,
            std::to_string(n_qubits) + " qubits exceeds the simulator cap of " + std::to_string(cap));
}

bool valid_label(char c) { return c == 'X' || c == 'Y' || c == 'Z'; }

}  // namespace

StateVector init_zero(int n_qubits, int qubit_cap) {
    check_size(n_qubits, qubit_cap);
    StateVector::Amplitudes a = StateVector::Amplitudes::Zero(Index(1) << n_qubits);
    a(0) = 1.0;
    return StateVector(n_qubits, std::move(a));
}

StateVector init_bell_chain(int n_qubits, int qubit_cap) {
    check_size(n_qubits, qubit_cap);
    const Index dim = Index(1) << n_qubits;
    StateVector::Amplitudes a = StateVector::Amplitudes::Zero(dim);
    const double amp = std::pow(0.5, n_qubits / 4.0);
    // Nonzero exactly where each pair (2k, 2k+1) carries equal bits.
    for (Index i = 0; i < dim; ++i) {
        bool ok = true;
        for (int k = 0; k < n_qubits / 2 && ok; ++k) ok = ((i >> (2 * k)) & 1) == ((i >> (2 * k + 1)) & 1);
        if (ok) a(i) = amp;
    }
    return StateVector(n_qubits, std::move(a));
}

StateVector initial_state(const BoundCircuit& bound, int qubit_cap) {
    return bound.initial_state == InitialState::BellPairs ? init_bell_chain(bound.n_qubits, qubit_cap)
                                                          : init_zero(bound.n_qubits, qubit_cap);
}

StateVector apply_circuit(StateVector state, const BoundCircuit& bound) {
    require(state.n_qubits() == bound.n_qubits, ErrorCode::DimensionMismatch,
            "state has " + std::to_string(state.n_qubits()) + " qubits, circuit " +
                std::to_string(bound.n_qubits));
    for (std::size_t l = 0; l < bound.params.size(); ++l) {
        const auto& pairs = bound.pairs[l];
        for (std::size_t k = 0; k < pairs.size(); ++k)
            state.apply2(block_unitary(bound.params[l][k]), pairs[k].first, pairs[k].second);
    }
    return state;
}

StateVector apply_circuit_inverse(StateVector state, const BoundCircuit& bound) {
    require(state.n_qubits() == bound.n_qubits, ErrorCode::DimensionMismatch,
            "state and circuit qubit counts differ");
    for (std::size_t l = bound.params.size(); l-- > 0;) {
        const auto& pairs = bound.pairs[l];
        for (std::size_t k = pairs.size(); k-- > 0;)
            state.apply2(block_unitary(bound.params[l][k]).adjoint(), pairs[k].first, pairs[k].second);
    }
    return state;
}

StateVector run_circuit(const CircuitSpec& spec, const VectorXd& u, int qubit_cap) {
    const BoundCircuit bound = bind_input(spec, u);
    return apply_circuit(initial_state(bound, qubit_cap), bound);
}

PauliObservable PauliObservable::single(char label, int q) {
    PauliObservable o;
    o.weight = 1;
    o.qubits = {q, q};
    o.labels = {label, label};
    return o;
}

PauliObservable PauliObservable::pair(char la, char lb, int qa, int qb) {
    PauliObservable o;
    o.weight = 2;
    o.qubits = {qa, qb};
    o.labels = {la, lb};
    return o;
}

std::string PauliObservable::name() const {
    if (weight == 1) return std::string(1, labels[0]) + "@" + std::to_string(qubits[0]);
    return std::string{labels[0], labels[1]} + "@" + std::to_string(qubits[0]) + "-" +
           std::to_string(qubits[1]);
}

PauliObservable parse_observable(const std::string& name) {
    const auto at = name.find('@');
    require(at != std::string::npos && (at == 1 || at == 2), ErrorCode::Parse,
            "bad observable name '" + name + "'");
    for (std::size_t k = 0; k < at; ++k)
        require(valid_label(name[k]), ErrorCode::Parse, "unsupported Pauli label in '" + name + "'");
    try {
        if (at == 1) return PauliObservable::single(name[0], std::stoi(name.substr(2)));
        const auto dash = name.find('-', at);
        require(dash != std::string::npos, ErrorCode::Parse, "bad observable name '" + name + "'");
        return PauliObservable::pair(name[0], name[1], std::stoi(name.substr(at + 1, dash - at - 1)),
                                     std::stoi(name.substr(dash + 1)));
    } catch (const std::logic_error&) {
        fail(ErrorCode::Parse, "bad observable name '" + name + "'");
    }
}

void validate_observable(const PauliObservable& obs, int n_qubits) {
    require(obs.weight == 1 || obs.weight == 2, ErrorCode::InvalidArgument, "weight must be 1 or 2");
    for (int w = 0; w < obs.weight; ++w) {
        require(valid_label(obs.labels[static_cast<std::size_t>(w)]), ErrorCode::InvalidArgument,
                "unsupported Pauli label in " + obs.name());
        const int q = obs.qubits[static_cast<std::size_t>(w)];
        require(q >= 0 && q < n_qubits, ErrorCode::InvalidArgument, "observable support out of range: " + obs.name());
    }
    if (obs.weight == 2) {
        const int a = obs.qubits[0], b = obs.qubits[1];
        require((a + 1) % n_qubits == b || (b + 1) % n_qubits == a, ErrorCode::InvalidArgument,
                "weight-2 support must be ring neighbours: " + obs.name());
    }
}

double expect(const StateVector& state, const PauliObservable& obs) {
    validate_observable(obs, state.n_qubits());
    Index flip = 0;
    Index zmask = 0;  // bits contributing a (-1)^bit sign (Z and Y)
    int n_y = 0;
    for (int w = 0; w < obs.weight; ++w) {
        const char c = obs.labels[static_cast<std::size_t>(w)];
        const Index m = Index(1) << obs.qubits[static_cast<std::size_t>(w)];
        if (c == 'X' || c == 'Y') flip |= m;
        if (c == 'Z' || c == 'Y') zmask |= m;
        if (c == 'Y') ++n_y;
    }
    // P|i> = i^{n_y} (-1)^{popcount(i & zmask)} |i ^ flip>, using Y = i X Z.
    const auto& a = state.amplitudes();
    cplx acc = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double sign = (__builtin_popcountll(static_cast<unsigned long long>(i & zmask)) & 1) ? -1.0 : 1.0;
        acc += std::conj(a(i ^ flip)) * a(i) * sign;
    }
    static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    acc *= kIPow[n_y % 4];
    return acc.real();
}

std::vector<PauliObservable> weight1_observables(int n_qubits, const std::string& labels) {
    std::vector<PauliObservable> out;
    for (int q = 0; q < n_qubits; ++q)
        for (char c : labels) out.push_back(PauliObservable::single(c, q));
    return out;
}

std::vector<PauliObservable> weight2_observables(int n_qubits, const std::vector<std::string>& labels,
                                                 BondSet bonds) {
    std::vector<PauliObservable> out;
    const int step = bonds == BondSet::Ring ? 1 : 2;
    for (int q = 0; q < n_qubits; q += step)
        for (const auto& l : labels) {
            require(l.size() == 2, ErrorCode::InvalidArgument, "weight-2 label must have two letters");
            out.push_back(PauliObservable::pair(l[0], l[1], q, (q + 1) % n_qubits));
        }
    return out;
}

std::vector<std::string> all_pair_labels() {
    std::vector<std::string> out;
    for (char a : std::string("XYZ"))
        for (char b : std::string("XYZ")) out.push_back(std::string{a, b});
    return out;
}

std::vector<PauliObservable> default_observables(int n_qubits) {
    auto out = weight1_observables(n_qubits);
    auto w2 = weight2_observables(n_qubits, {"XX", "YY", "ZZ"});
    out.insert(out.end(), w2.begin(), w2.end());
    return out;
}

std::vector<PauliObservable> full_observables(int n_qubits) {
    auto out = weight1_observables(n_qubits);
    auto w2 = weight2_observables(n_qubits, all_pair_labels());
    out.insert(out.end(), w2.begin(), w2.end());
    return out;
}

VectorXd feature_row(const StateVector& state, const std::vector<PauliObservable>& observables) {
    VectorXd r(static_cast<Index>(observables.size()) + 1);
    r(0) = 1.0;
    for (std::size_t i = 0; i < observables.size(); ++i)
        r(static_cast<Index>(i) + 1) = expect(state, observables[i]);
    return r;
}

VectorXd feature_row(const CircuitSpec& spec, const VectorXd& u,
                     const std::vector<PauliObservable>& observables) {
    return feature_row(run_circuit(spec, u), observables);
}

MatrixXd feature_matrix(const CircuitSpec& spec, const MatrixXd& inputs,
                        const std::vector<PauliObservable>& observables) {
    MatrixXd out(inputs.rows(), static_cast<Index>(observables.size()) + 1);
    parallel_for(static_cast<std::size_t>(inputs.rows()), [&](std::size_t i) {
        const VectorXd u = inputs.row(static_cast<Index>(i)).transpose();
        out.row(static_cast<Index>(i)) = feature_row(spec, u, observables).transpose();
    });
    return out;
}

std::vector<std::string> feature_names(const std::vector<PauliObservable>& observables) {
    std::vector<std::string> out{"bias"};
    for (const auto& o : observables) out.push_back(o.name());
    return out;
}

}  // namespace qelm
