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

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "qelm/tasks.hpp"
#include "test_util.hpp"

using namespace qelm;

namespace {

const std::string kLandsat = std::string(QELM_SOURCE_DIR) + "/data/landsat/sat.all";

}  // namespace

TEST(Narma, HandIteration) {
    const VectorXd y = narma_targets(VectorXd::Zero(5), 1);
    EXPECT_DOUBLE_EQ(y(0), 0.001);
    EXPECT_DOUBLE_EQ(y(1), 0.24 * 0.001 + 0.001);
}

TEST(Narma, RecurrenceAndLength) {
    for (int n : {1, 2, 5, 10}) {
        const auto seq = gen_narma(n, 100, 250, 250, 12, 3);
        EXPECT_EQ(seq.u.size(), 611);
        EXPECT_EQ(seq.total_length(), 611);
        EXPECT_EQ(narma_residual(seq), 0.0);
        EXPECT_EQ(narma_targets(seq.u, n), seq.y);
        EXPECT_LE(seq.y.cwiseAbs().maxCoeff(), kNarmaDivergence);
        EXPECT_GE(seq.u.minCoeff(), 0.0);
        EXPECT_LE(seq.u.maxCoeff(), 0.5);
    }
    EXPECT_EQ(gen_narma(3, 10, 20, 20, 4, 9).u, gen_narma(3, 10, 20, 20, 4, 9).u);
}

TEST(Narma, SharedInputAcrossOrders) {
    const auto fam = gen_narma_orders({1, 2, 3}, 20, 50, 50, 4, 5);
    ASSERT_EQ(fam.size(), 3u);
    EXPECT_EQ(fam[0].u, fam[2].u);
    EXPECT_EQ(fam[2].order, 3);
}

TEST(Windows, Enumeration) {
    VectorXd s(3);
    s << 1, 2, 3;
    const MatrixXd w = rolling_windows(s, 2, 1, 2);
    MatrixXd expected(2, 2);
    expected << 2, 1, 3, 2;
    EXPECT_EQ(w, expected);
    EXPECT_EQ(rolling_windows(s, 1, 0, 3), MatrixXd(s));
    EXPECT_QELM_ERROR(rolling_windows(s, 2, 0, 2), ErrorCode::InsufficientData);
    EXPECT_QELM_ERROR(rolling_windows(s, 2, 2, 2), ErrorCode::InsufficientData);
}

TEST(Windows, NarmaDataset) {
    const auto seq = gen_narma(2, 100, 250, 250, 4, 1);
    const auto ds = make_windows(seq, 4);
    EXPECT_EQ(ds.windows.rows(), 500);
    EXPECT_EQ(ds.n_train, 250);
    EXPECT_EQ(ds.n_test(), 250);
    EXPECT_EQ(ds.memory_boundary, 4);
    EXPECT_EQ(ds.end_index.front(), 100 + 4 - 1);
    const VectorXd x = seq.transformed();
    for (Index j = 0; j < ds.windows.rows(); ++j) {
        const Index t = ds.end_index[j];
        EXPECT_EQ(ds.targets(j), seq.y(t));
        for (int k = 0; k < 4; ++k) EXPECT_EQ(ds.windows(j, k), x(t - k));
        if (j > 0) EXPECT_EQ(t, ds.end_index[j - 1] + 1);
    }
    EXPECT_GE(ds.windows.minCoeff(), -1.0);
    EXPECT_LE(ds.windows.maxCoeff(), 0.0);
}

TEST(Landsat, FullFileAndClasses) {
    const auto d = read_landsat(kLandsat);
    EXPECT_EQ(d.features.rows(), 6435);
    EXPECT_EQ(d.features.cols(), 36);
    const std::set<int> classes(d.labels.begin(), d.labels.end());
    EXPECT_EQ(classes, (std::set<int>{1, 2, 3, 4, 5, 7}));
}

TEST(Landsat, StratifiedSubsample) {
    const auto full = read_landsat(kLandsat);
    const auto d = load_landsat(kLandsat, kLandsatSubsample, 4);
    EXPECT_EQ(d.features.rows(), 860);
    std::map<int, int> nf, ns;
    for (int l : full.labels) ++nf[l];
    for (int l : d.labels) ++ns[l];
    for (auto [l, k] : nf) EXPECT_NEAR(ns[l], 860.0 * k / 6435, 1.0);
    EXPECT_EQ(d.features, load_landsat(kLandsat, kLandsatSubsample, 4).features);
    EXPECT_EQ(load_landsat(kLandsat, 100000, 1).features.rows(), 6435);
}

TEST(Landsat, SplitAndScale) {
    const auto d = load_landsat(kLandsat, kLandsatSubsample, 2);
    const auto [tr, te] = stratified_split(d.labels, 600, 3);
    EXPECT_EQ(tr.size(), 600u);
    EXPECT_EQ(te.size(), 260u);
    std::vector<Index> all(tr);
    all.insert(all.end(), te.begin(), te.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
    const auto mm = MinMaxScaler::fit(d.select(tr).features);
    const MatrixXd Xtr = mm.transform(d.select(tr).features);
    EXPECT_GE(Xtr.minCoeff(), -1.0);
    EXPECT_LE(Xtr.maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(Xtr.colwise().minCoeff().maxCoeff(), -1.0);
    const MatrixXd Xte = mm.transform(d.select(te).features);
    EXPECT_GE(Xte.minCoeff(), -1.0);
    EXPECT_LE(Xte.maxCoeff(), 1.0);
}

TEST(Landsat, MalformedRowsReportLine) {
    testutil::TempDir dir("landsat");
    {
        std::ofstream f(dir / "bad.txt");
        for (int r = 0; r < 3; ++r) {
            for (int i = 0; i < 36; ++i) f << (r == 2 && i == 5 ? "x" : "1") << ' ';
            f << "1\n";
        }
    }
    try {
        read_landsat(dir / "bad.txt");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    {
        std::ofstream f(dir / "short.txt");
        f << "1 2 3 4\n";
    }
    EXPECT_QELM_ERROR(read_landsat(dir / "short.txt"), ErrorCode::Parse);
    EXPECT_QELM_ERROR(read_landsat(dir / "missing.txt"), ErrorCode::Io);
}

TEST(ClassificationInput, Stacking) {
    EXPECT_EQ(build_classification_input(VectorXd::Zero(36)), VectorXd::Zero(72));
    const VectorXd f = VectorXd::LinSpaced(36, 1, 36) / 36.0;
    const VectorXd u = build_classification_input(f);
    VectorXd expected(72);
    expected << f, f;
    EXPECT_EQ(u, expected);
    for (int k = 0; k < 36; ++k) EXPECT_EQ(u(k), u(k + 36));
    EXPECT_QELM_ERROR(build_classification_input(VectorXd::Zero(35)), ErrorCode::DimensionMismatch);
}

TEST(MultiSeries, SingleSeriesReduces) {
    const VectorXd s = VectorXd::LinSpaced(20, -1, 1);
    const auto m = multi_series_windows({s}, 8, 1, 3, 5, 10);
    const auto ref = LayerSchedule::brickwork(8, 4);
    EXPECT_EQ(m.schedule.kinds, ref.kinds);
    EXPECT_EQ(m.schedule.parities, ref.parities);
    const MatrixXd w = rolling_windows(s, 4, 5, 10);
    for (Index j = 0; j < 10; ++j) EXPECT_EQ(m.inputs[j][0], w.row(j).transpose());
}

TEST(MultiSeries, ThreeSeriesLayout) {
    const VectorXd s = VectorXd::Constant(30, 0.25);
    const auto m = multi_series_windows({s, s, s}, 12, 2, 3, 10, 4);
    ASSERT_EQ(m.schedule.n_layers(), 12);
    int enc = 0;
    for (int l = 0; l < 12; ++l) {
        EXPECT_EQ(m.schedule.kinds[l], l % 6 < 3 ? LayerKind::Encoding : LayerKind::Dynamics);
        enc += m.schedule.kinds[l] == LayerKind::Encoding;
    }
    EXPECT_EQ(enc, 6);
    EXPECT_EQ(m.schedule.encoding_sources, (std::vector<int>{0, 1, 2, 0, 1, 2}));
    for (const auto& in : m.inputs) {
        EXPECT_EQ(in[0], in[1]);
        EXPECT_EQ(in[1], in[2]);
    }
    EXPECT_QELM_ERROR(multi_series_windows({s, VectorXd::Zero(29)}, 12, 1, 3, 10, 4), ErrorCode::DimensionMismatch);
}
