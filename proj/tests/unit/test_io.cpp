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
#include <limits>

#include "qelm/experiments.hpp"
#include "qelm/io.hpp"
#include "test_util.hpp"

using namespace qelm;

TEST(Hash, Fnv1aVectors) {
    EXPECT_EQ(io::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(io::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(io::hex64(0xabcULL), "0000000000000abc");
}

TEST(Fmt, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0}) EXPECT_EQ(std::stod(io::fmt(v)), v);
    EXPECT_EQ(io::fmt(0.1), "0.1");
    EXPECT_EQ(io::fmt(2.0), "2");
}

TEST(Csv, RoundTripAndSchemaLine) {
    io::CsvTable t{"r2_vs_order", 1, {"n", "r2_train", "r2_test", "variant"}, {{"1", "0.5", "0.25", "exact"}}};
    const std::string text = io::to_csv(t);
    EXPECT_EQ(text.substr(0, text.find('\n')), "#schema=qelm.r2_vs_order/1");
    const auto back = io::parse_csv(text, "r2_vs_order");
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.numeric("r2_test"), std::vector<double>{0.25});
    EXPECT_QELM_ERROR(back.column("missing"), ErrorCode::Parse);
}

TEST(Csv, RejectsUnknownVersionsAndKinds) {
    EXPECT_QELM_ERROR(io::parse_csv("#schema=qelm.r2_vs_order/2\nn\n1\n"), ErrorCode::SchemaVersion);
    EXPECT_QELM_ERROR(io::parse_csv("n,r2\n1,2\n"), ErrorCode::SchemaVersion);
    EXPECT_QELM_ERROR(io::parse_csv("#schema=qelm.ablation/1\nn\n1\n", "r2_vs_order"), ErrorCode::SchemaVersion);
    EXPECT_QELM_ERROR(io::parse_csv("#schema=qelm.ablation/x\nn\n"), ErrorCode::SchemaVersion);
    EXPECT_QELM_ERROR(io::parse_csv("#schema=qelm.ablation/1\na,b\n1\n"), ErrorCode::Parse);
}

TEST(Csv, BlankCellsSurvive) {
    io::CsvTable t{"ablation", 1, {"a", "b", "c"}, {{"x", "", ""}}};
    const auto back = io::parse_csv(io::to_csv(t));
    EXPECT_EQ(back.rows.front(), (std::vector<std::string>{"x", "", ""}));
}

TEST(Json, CircuitRoundTrip) {
    const auto spec = sample_circuit(HyperParams::reference(4), LayerSchedule::brickwork(8, 8));
    EXPECT_EQ(io::circuit_from_json(io::to_json(spec)), spec);
    auto j = io::to_json(spec);
    j["schema"] = "qelm.circuit/9";
    EXPECT_QELM_ERROR(io::circuit_from_json(j), ErrorCode::SchemaVersion);
}

TEST(Json, HyperRoundTrip) {
    HyperParams hp = HyperParams::reference(0xffffffffffffULL);
    hp.a_in = 0.123456789;
    EXPECT_EQ(io::hyper_from_json(io::to_json(hp)), hp);
}

TEST(Json, BasisRoundTrip) {
    const auto spec = sample_circuit(HyperParams::reference(1), LayerSchedule::brickwork(4, 4));
    const auto banks = sample_frequency_banks(spec, single_source(MatrixXd::Random(40, 2)), {2000}, 3);
    const auto basis = local_eigentasks(banks[0].pairs, {{0, 1}, {2, 3}}, 2000);
    const auto back = io::basis_from_json(io::to_json(basis));
    ASSERT_EQ(back.subsets.size(), basis.subsets.size());
    for (std::size_t s = 0; s < basis.subsets.size(); ++s) {
        EXPECT_EQ(back.subsets[s].beta2, basis.subsets[s].beta2);
        EXPECT_EQ(back.subsets[s].coefficients, basis.subsets[s].coefficients);
        EXPECT_EQ(back.subsets[s].qubits, basis.subsets[s].qubits);
    }
    EXPECT_EQ(back.shots, 2000);
    EXPECT_EQ(io::to_json(basis).at("cell_order_version"), kCellOrderVersion);
}

TEST(Json, ModelHashValidated) {
    RidgeModel m;
    m.weights = MatrixXd::Random(3, 2);
    m.lambda = 1e-3;
    m.classes = {1, 2};
    m.feature_names = {"bias", "X@0", "Z@1"};
    auto j = io::to_json(m);
    const auto back = io::model_from_json(j);
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(back.classes, m.classes);
    j["feature_names"][1] = "Y@0";
    EXPECT_QELM_ERROR(io::model_from_json(j), ErrorCode::Parse);
}

TEST(Json, TrialRoundTrip) {
    TrialRecord t;
    t.id = 3;
    t.hp = HyperParams::reference(99);
    t.status = TrialStatus::Complete;
    t.n_realizations = 2;
    t.evaluation.names = {"narma_noiseless@4q2l"};
    t.evaluation.means = {1.5};
    t.evaluation.raw = {{1.0, 2.0}};
    t.pareto_rank = 0;
    const auto back = io::trial_from_json(io::to_json(t));
    EXPECT_EQ(back.id, 3);
    EXPECT_EQ(back.hp, t.hp);
    EXPECT_EQ(back.status, TrialStatus::Complete);
    EXPECT_EQ(back.evaluation.raw, t.evaluation.raw);
    EXPECT_EQ(back.pareto_rank, 0);
    EXPECT_EQ(io::to_json(t).at("status"), "COMPLETE");
}

TEST(Frequencies, RoundTripMixedWeights) {
    testutil::TempDir dir("freq");
    io::FrequencyTable t;
    t.shots = 500;
    t.subsets = {{0}, {0, 1}};
    t.blocks = {MatrixXd::Random(3, 6).cwiseAbs(), MatrixXd::Random(3, 36).cwiseAbs()};
    io::write_frequencies(dir / "f.csv", t);
    const auto back = io::read_frequencies(dir / "f.csv");
    EXPECT_EQ(back.subsets, t.subsets);
    EXPECT_EQ(back.shots, 500);
    for (int s = 0; s < 2; ++s) EXPECT_EQ(back.blocks[s], t.blocks[s]);
    EXPECT_EQ(io::read_csv(dir / "f.csv").kind, "frequencies");
}

TEST(Files, ReadMissing) {
    EXPECT_QELM_ERROR(io::read_text("/nonexistent/qelm/x"), ErrorCode::Io);
    testutil::TempDir dir("json");
    io::write_text(dir / "bad.json", "{not json");
    EXPECT_QELM_ERROR(io::read_json(dir / "bad.json"), ErrorCode::Parse);
}
