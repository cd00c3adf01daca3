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
#include <random>

#include "oracles.hpp"
#include "qelm/measurement.hpp"
#include "qelm/readout.hpp"
#include "test_util.hpp"

using namespace qelm;

namespace {

MatrixXd with_bias(const MatrixXd& X) {
    MatrixXd R(X.rows(), X.cols() + 1);
    R << VectorXd::Ones(X.rows()), X;
    return R;
}

}  // namespace

TEST(Ridge, ExactLinearFit) {
    const MatrixXd R = with_bias(MatrixXd::Random(30, 4));
    VectorXd w(5);
    w << 0.5, -1, 2, 0.25, 3;
    const VectorXd y = R * w;
    const auto m = fit_ridge(R, y, 0.0);
    EXPECT_LT(mse(y, m.predict(R)) / y.squaredNorm(), 1e-18);
}

TEST(Ridge, HugePenaltyLeavesMean) {
    const MatrixXd R = with_bias(MatrixXd::Random(40, 3));
    const VectorXd y = VectorXd::Random(40);
    const auto m = fit_ridge(R, y, 1e12);
    EXPECT_LT(m.weights.bottomRows(3).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(m.weights(0, 0), y.mean(), 1e-9);
}

TEST(Ridge, MatchesIterativeOracle) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (double lambda : {0.0, 1e-6, 0.1, 3.0}) {
        MatrixXd X(20, 4);
        for (auto& x : X.reshaped()) x = g(rng);
        const MatrixXd R = with_bias(X);
        VectorXd y(20);
        for (auto& v : y) v = g(rng);
        const auto m = fit_ridge(R, y, lambda);
        EXPECT_LT((m.weights.col(0) - oracle::ridge_iterative(R, y, lambda)).cwiseAbs().maxCoeff(), 1e-6)
            << "lambda=" << lambda;
    }
}

TEST(Ridge, Errors) {
    EXPECT_QELM_ERROR(fit_ridge(MatrixXd::Zero(5, 3), VectorXd::Ones(5), 0.0), ErrorCode::Degenerate);
    EXPECT_QELM_ERROR(fit_ridge(MatrixXd::Ones(5, 3), VectorXd::Ones(4), 0.0), ErrorCode::DimensionMismatch);
    EXPECT_QELM_ERROR(fit_ridge(MatrixXd::Ones(5, 3), VectorXd::Ones(5), -1.0), ErrorCode::InvalidArgument);
}

TEST(RSquared, Fixtures) {
    VectorXd y(3), yhat(3);
    y << 0, 1, 2;
    yhat << 0, 0, 0;
    EXPECT_DOUBLE_EQ(r_squared(y, yhat), -1.5);
    EXPECT_DOUBLE_EQ(r_squared(y, y), 1.0);
    EXPECT_DOUBLE_EQ(r_squared(y, VectorXd::Constant(3, 1.0)), 0.0);
    EXPECT_QELM_ERROR(r_squared(VectorXd::Ones(3), y), ErrorCode::Degenerate);
}

TEST(Classifier, SeparableTwoClass) {
    MatrixXd X(40, 2);
    std::vector<int> labels;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 0.3);
    for (int i = 0; i < 40; ++i) {
        const int c = i % 2;
        X.row(i) << (c ? 2 : -2) + g(rng), g(rng);
        labels.push_back(c ? 7 : 3);
    }
    const auto m = fit_classifier(with_bias(X), labels, 1e-8);
    EXPECT_EQ(m.classes, (std::vector<int>{3, 7}));
    EXPECT_EQ(classification_metrics(labels, m.predict_labels(with_bias(X))).accuracy, 1.0);
}

TEST(Classifier, LabelPermutationSymmetry) {
    MatrixXd X = MatrixXd::Random(60, 3);
    std::vector<int> a, b;
    for (int i = 0; i < 60; ++i) {
        const int c = (X(i, 0) > 0.3) + (X(i, 1) > 0);
        a.push_back(c);
        b.push_back(c == 0 ? 5 : c == 1 ? 1 : 3);
    }
    const MatrixXd R = with_bias(X);
    const auto pa = fit_classifier(R, a, 1e-3).predict_labels(R);
    const auto pb = fit_classifier(R, b, 1e-3).predict_labels(R);
    for (int i = 0; i < 60; ++i) EXPECT_EQ(pb[i], pa[i] == 0 ? 5 : pa[i] == 1 ? 1 : 3);
}

TEST(Classifier, BlobsMatchLeastSquaresOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const int n = 300;
    MatrixXd X(n, 2);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
        const int c = i % 3;
        X.row(i) << 2 * std::cos(2.1 * c) + g(rng), 2 * std::sin(2.1 * c) + g(rng);
        labels.push_back(c);
    }
    const MatrixXd R = with_bias(X);
    MatrixXd scores(n, 3);
    for (int c = 0; c < 3; ++c) {
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = labels[i] == c;
        scores.col(c) = R * oracle::ridge_iterative(R, y, 1e-3);
    }
    const auto ref = argmax_rows(scores);
    const auto got = fit_classifier(R, labels, 1e-3).predict_labels(R);
    const double acc_ref = classification_metrics(labels, ref).accuracy;
    const double acc = classification_metrics(labels, got).accuracy;
    EXPECT_NEAR(acc, acc_ref, 0.02);
}

TEST(Classifier, SingleClassRejected) {
    EXPECT_QELM_ERROR(fit_classifier(MatrixXd::Random(5, 2), std::vector<int>(5, 1)), ErrorCode::InsufficientData);
}

TEST(Argmax, TiesGoToLowestIndex) {
    MatrixXd s(2, 3);
    s << 1, 1, 0, 0, 2, 2;
    EXPECT_EQ(argmax_rows(s), (std::vector<int>{0, 1}));
}

TEST(Metrics, Fixtures) {
    const std::vector<int> t{1, 1, 2, 2};
    const auto perfect = classification_metrics(t, t);
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.f1_macro, 1.0);
    EXPECT_EQ(perfect.f1_weighted, 1.0);
    EXPECT_EQ(perfect.precision_macro, 1.0);

    const auto half = classification_metrics(t, {1, 2, 1, 2});
    EXPECT_DOUBLE_EQ(half.accuracy, 0.5);
    EXPECT_DOUBLE_EQ(half.f1_macro, 0.5);
    EXPECT_DOUBLE_EQ(half.f1_weighted, 0.5);

    const auto one = classification_metrics(t, {1, 1, 1, 1});
    EXPECT_DOUBLE_EQ(one.accuracy, 0.5);
    EXPECT_DOUBLE_EQ(one.f1_macro, (2.0 / 3.0 + 0.0) / 2.0);
    EXPECT_DOUBLE_EQ(one.precision_macro, 0.25);
}

TEST(Metrics, MajorityClass) {
    EXPECT_EQ(majority_class({4, 2, 4, 7, 2, 4}), 4);
    EXPECT_EQ(majority_class({3, 1, 3, 1}), 1);
}

TEST(Bootstrap, Percentile) {
    EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 50), 2.5);
    EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 25), 1.75);
    EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0), 1.0);
    EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 100), 4.0);
}

TEST(Bootstrap, ZeroVariance) {
    const auto ci = bootstrap_ci([](Rng&) { return 0.7; }, 100, 1);
    EXPECT_EQ(ci.lo, 0.7);
    EXPECT_EQ(ci.hi, 0.7);
    EXPECT_QELM_ERROR(bootstrap_ci([](Rng&) { return 0.0; }, 99, 1), ErrorCode::InvalidArgument);
}

TEST(Bootstrap, DeterministicAndCovering) {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        VectorXd x(60);
        for (auto& v : x) v = g(rng);
        const double point = x.mean();
        auto eval = [&](Rng& r) {
            double s = 0;
            for (Index i : resample_indices(x.size(), r)) s += x(i);
            return s / x.size();
        };
        const auto ci = bootstrap_ci(eval, 200, seed);
        const auto again = bootstrap_ci(eval, 200, seed);
        EXPECT_EQ(ci.lo, again.lo);
        EXPECT_EQ(ci.hi, again.hi);
        covered += ci.lo <= point && point <= ci.hi;
    }
    EXPECT_GE(covered, 38);
}

TEST(Bootstrap, MoreShotsNarrowShotInterval) {
    VectorXd p(3);
    p << 0.2, 0.5, 0.3;
    double prev = INFINITY;
    for (long S : {100L, 1000L, 10000L}) {
        double width = 0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Rng rng(seed);
            const VectorXd observed = sample_frequencies(p, S, rng);
            const auto ci = bootstrap_ci([&](Rng& r) { return sample_frequencies(observed, S, r)(1); }, 200, seed);
            width += ci.hi - ci.lo;
        }
        EXPECT_LT(width, prev);
        prev = width;
    }
}

TEST(Report, Values) {
    const auto r = to_report(classification_metrics({1, 2}, {1, 2}));
    EXPECT_EQ(r.values.at("f1_macro"), 1.0);
    EXPECT_EQ(r.values.size(), 5u);
}
