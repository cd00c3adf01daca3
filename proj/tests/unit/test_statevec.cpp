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

#include <cmath>

#include "oracles.hpp"
#include "qelm/statevec.hpp"
#include "test_util.hpp"

using namespace qelm;

TEST(BellChain, TwoQubitAmplitudes) {
    const auto psi = init_bell_chain(2);
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(psi.amplitudes()(0) - r), 0.0, 1e-15);
    EXPECT_EQ(psi.amplitudes()(1), cplx(0));
    EXPECT_EQ(psi.amplitudes()(2), cplx(0));
    EXPECT_NEAR(std::abs(psi.amplitudes()(3) - r), 0.0, 1e-15);
}

TEST(BellChain, FourQubitStabilisers) {
    const auto psi = init_bell_chain(4);
    EXPECT_NEAR(expect(psi, parse_observable("ZZ@0-1")), 1.0, 1e-12);
    EXPECT_NEAR(expect(psi, parse_observable("XX@0-1")), 1.0, 1e-12);
    EXPECT_NEAR(expect(psi, parse_observable("YY@0-1")), -1.0, 1e-12);
    EXPECT_NEAR(expect(psi, parse_observable("Z@0")), 0.0, 1e-12);
    EXPECT_NEAR(expect(psi, parse_observable("ZZ@1-2")), 0.0, 1e-12);
}

TEST(BellChain, EightQubitSupport) {
    const auto psi = init_bell_chain(8);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
    int nonzero = 0;
    for (const auto& a : psi.amplitudes())
        if (std::abs(a) > 0) {
            ++nonzero;
            EXPECT_NEAR(a.real(), 0.25, 1e-15);
        }
    EXPECT_EQ(nonzero, 16);
    EXPECT_LT((psi.amplitudes() - oracle::bell_chain(8)).norm(), 1e-14);
}

TEST(BellChain, Errors) {
    EXPECT_QELM_ERROR(init_bell_chain(5), ErrorCode::InvalidArgument);
    EXPECT_QELM_ERROR(init_bell_chain(18), ErrorCode::CapacityExceeded);
    EXPECT_NO_THROW(init_bell_chain(18, 18));
}

TEST(ApplyCircuit, ZeroParametersIsIdentity) {
    HyperParams hp;
    hp.J0 = hp.h0 = hp.b0 = hp.dJ = hp.dh = hp.db = hp.a_in = 0.0;
    const auto spec = sample_circuit(hp, LayerSchedule::brickwork(6, 6));
    const auto in = init_bell_chain(6);
    const auto out = apply_circuit(in, bind_input(spec, VectorXd::Ones(3)));
    EXPECT_LT((out.amplitudes() - in.amplitudes()).norm(), 1e-15);
}

TEST(ApplyCircuit, InverseRestoresState) {
    const auto spec = sample_circuit(HyperParams::reference(3), LayerSchedule::brickwork(8, 12));
    const auto bound = bind_input(spec, VectorXd::LinSpaced(4, -1, 1));
    const auto in = init_bell_chain(8);
    const auto back = apply_circuit_inverse(apply_circuit(in, bound), bound);
    EXPECT_NEAR(std::norm(in.amplitudes().dot(back.amplitudes())), 1.0, 1e-9);
}

TEST(ApplyCircuit, MatchesDenseOperator) {
    for (int n : {4, 6, 8}) {
        const auto spec = sample_circuit(HyperParams::reference(11 + n), LayerSchedule::brickwork(n, n));
        const auto bound = bind_input(spec, VectorXd::Zero(n / 2));
        const auto psi = apply_circuit(init_bell_chain(n), bound);
        const VectorXcd ref = oracle::circuit_operator(bound) * oracle::bell_chain(n);
        EXPECT_LT((psi.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-9) << "N=" << n;
        EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
        for (int q = 0; q < n; ++q) {
            std::string labels(n, 'I');
            labels[q] = 'X';
            EXPECT_NEAR(expect(psi, PauliObservable::single('X', q)),
                        oracle::expectation(ref, oracle::pauli_string(labels)), 1e-9);
        }
    }
}

TEST(ApplyCircuit, DimensionMismatch) {
    const auto spec = sample_circuit(HyperParams::reference(1), LayerSchedule::brickwork(6, 3));
    EXPECT_QELM_ERROR(apply_circuit(init_bell_chain(4), bind_input(spec, VectorXd::Zero(3))),
                      ErrorCode::DimensionMismatch);
}

TEST(Expect, MatchesDensePauliStrings) {
    const VectorXcd ref = oracle::random_state(6, 9);
    const StateVector psi(6, ref);
    for (const auto& obs : full_observables(6)) {
        std::string labels(6, 'I');
        labels[obs.qubits[0]] = obs.labels[0];
        if (obs.weight == 2) labels[obs.qubits[1]] = obs.labels[1];
        const double e = expect(psi, obs);
        EXPECT_NEAR(e, oracle::expectation(ref, oracle::pauli_string(labels)), 1e-12) << obs.name();
        EXPECT_LE(std::abs(e), 1.0 + 1e-12);
    }
}

TEST(Observables, ParseAndValidate) {
    const auto o = parse_observable("XY@7-0");
    EXPECT_EQ(o.weight, 2);
    EXPECT_EQ(o.name(), "XY@7-0");
    EXPECT_EQ(parse_observable("Z@3"), PauliObservable::single('Z', 3));
    EXPECT_QELM_ERROR(parse_observable("Q@1"), ErrorCode::Parse);
    EXPECT_QELM_ERROR(validate_observable(parse_observable("ZZ@0-2"), 8), ErrorCode::InvalidArgument);
}

TEST(FeatureRow, Lengths) {
    const auto spec = sample_circuit(HyperParams::reference(2), LayerSchedule::brickwork(8, 4));
    const VectorXd u = VectorXd::Constant(4, 0.3);
    const auto empty = feature_row(spec, u, {});
    ASSERT_EQ(empty.size(), 1);
    EXPECT_EQ(empty(0), 1.0);
    const auto w1 = weight1_observables(8);
    EXPECT_EQ(feature_row(spec, u, w1).size(), 25);
    EXPECT_EQ(feature_row(spec, u, full_observables(8)).size(), 97);
    EXPECT_EQ(feature_names(w1).size(), 25u);
    EXPECT_EQ(feature_names(w1).front(), "bias");
}

TEST(FeatureMatrix, RowsMatchFeatureRow) {
    const auto spec = sample_circuit(HyperParams::reference(2), LayerSchedule::brickwork(6, 3));
    const MatrixXd U = MatrixXd::Random(5, 3);
    const auto obs = default_observables(6);
    const MatrixXd F = feature_matrix(spec, U, obs);
    for (Index i = 0; i < U.rows(); ++i) EXPECT_EQ(F.row(i).transpose(), feature_row(spec, U.row(i).transpose(), obs));
}
