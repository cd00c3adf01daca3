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

#include "qelm/readout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qelm/parallel.hpp"

namespace qelm {

MatrixXd ridge_solve(const MatrixXd& R, const MatrixXd& Y, double lambda) {
    require(R.rows() >= 2, ErrorCode::InsufficientData, "ridge needs at least two samples");
    require(R.rows() == Y.rows(), ErrorCode::DimensionMismatch, "feature rows and targets differ");
    require(lambda >= 0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be >= 0");
    require(R.allFinite() && Y.allFinite(), ErrorCode::NonFinite, "ridge inputs must be finite");
    if (lambda == 0.0) {
        require(R.cwiseAbs().maxCoeff() > 0, ErrorCode::Degenerate, "all-zero feature matrix with lambda = 0");
        return R.completeOrthogonalDecomposition().solve(Y);
    }
    MatrixXd A = R.transpose() * R;
    A.diagonal().tail(A.rows() - 1).array() += lambda;
    Eigen::LDLT<MatrixXd> ldlt(A);
    require(ldlt.info() == Eigen::Success, ErrorCode::Degenerate, "normal equations are singular");
    MatrixXd W = ldlt.solve(R.transpose() * Y);
    require(W.allFinite(), ErrorCode::Degenerate, "normal equations are singular");
    return W;
}

MatrixXd RidgeModel::scores(const MatrixXd& R) const {
    require(R.cols() == weights.rows(), ErrorCode::DimensionMismatch,
            "model expects " + std::to_string(weights.rows()) + " features, got " + std::to_string(R.cols()));
    return R * weights;
}

VectorXd RidgeModel::predict(const MatrixXd& R) const { return scores(R).col(0); }

std::vector<int> RidgeModel::predict_labels(const MatrixXd& R) const {
    require(is_classifier(), ErrorCode::InvalidArgument, "model is not a classifier");
    std::vector<int> idx = argmax_rows(scores(R));
    for (int& k : idx) k = classes[static_cast<std::size_t>(k)];
    return idx;
}

RidgeModel fit_ridge(const MatrixXd& R, const VectorXd& y, double lambda) {
    RidgeModel m;
    m.weights = ridge_solve(R, y, lambda);
    m.lambda = lambda;
    return m;
}

RidgeModel fit_classifier(const MatrixXd& R, const std::vector<int>& labels, double lambda) {
    require(static_cast<Index>(labels.size()) == R.rows(), ErrorCode::DimensionMismatch,
            "one label per feature row required");
    std::set<int> distinct(labels.begin(), labels.end());
    require(distinct.size() >= 2, ErrorCode::InsufficientData, "classifier needs at least two classes");
    RidgeModel m;
    m.classes.assign(distinct.begin(), distinct.end());
    MatrixXd Y = MatrixXd::Zero(R.rows(), static_cast<Index>(m.classes.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto col = std::lower_bound(m.classes.begin(), m.classes.end(), labels[i]) - m.classes.begin();
        Y(static_cast<Index>(i), col) = 1.0;
    }
    m.weights = ridge_solve(R, Y, lambda);
    m.lambda = lambda;
    return m;
}

std::vector<int> argmax_rows(const MatrixXd& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
    for (Index i = 0; i < scores.rows(); ++i) {
        Index best = 0;
        for (Index k = 1; k < scores.cols(); ++k)
            if (scores(i, k) > scores(i, best)) best = k;
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

double mse(const VectorXd& y, const VectorXd& yhat) {
    require(y.size() == yhat.size() && y.size() > 0, ErrorCode::DimensionMismatch, "mse needs equal nonempty vectors");
    return (y - yhat).squaredNorm() / static_cast<double>(y.size());
}

double r_squared(const VectorXd& y, const VectorXd& yhat) {
    require(y.size() >= 2, ErrorCode::InsufficientData, "R^2 needs at least two targets");
    require(y.size() == yhat.size(), ErrorCode::DimensionMismatch, "target and prediction lengths differ");
    const double ss_tot = (y.array() - y.mean()).square().sum();
    require(ss_tot > 0, ErrorCode::Degenerate, "R^2 undefined for zero-variance targets");
    return 1.0 - (y - yhat).squaredNorm() / ss_tot;
}

ClassificationMetrics classification_metrics(const std::vector<int>& truth, const std::vector<int>& pred) {
    require(!truth.empty(), ErrorCode::InsufficientData, "no labels");
    require(truth.size() == pred.size(), ErrorCode::DimensionMismatch, "truth and prediction lengths differ");
    struct Counts {
        double tp = 0, fp = 0, fn = 0, support = 0;
    };
    std::map<int, Counts> c;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        c[truth[i]].support += 1;
        if (truth[i] == pred[i]) {
            c[truth[i]].tp += 1;
            ++correct;
        } else {
            c[truth[i]].fn += 1;
            c[pred[i]].fp += 1;
        }
    }
    const double n = static_cast<double>(truth.size());
    ClassificationMetrics m;
    m.accuracy = static_cast<double>(correct) / n;
    for (const auto& [label, k] : c) {
        const double prec = k.tp + k.fp > 0 ? k.tp / (k.tp + k.fp) : 0.0;
        const double rec = k.tp + k.fn > 0 ? k.tp / (k.tp + k.fn) : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        m.f1_macro += f1;
        m.precision_macro += prec;
        m.f1_weighted += f1 * k.support / n;
        m.precision_weighted += prec * k.support / n;
    }
    m.f1_macro /= static_cast<double>(c.size());
    m.precision_macro /= static_cast<double>(c.size());
    return m;
}

int majority_class(const std::vector<int>& labels) {
    require(!labels.empty(), ErrorCode::InsufficientData, "no labels");
    std::map<int, std::size_t> count;
    for (int l : labels) ++count[l];
    int best = count.begin()->first;
    for (const auto& [l, k] : count)
        if (k > count[best]) best = l;
    return best;
}

std::string to_string(ResampleAxis a) { return a == ResampleAxis::TrainSet ? "train_set" : "shots"; }

double percentile(std::vector<double> values, double q) {
    require(!values.empty(), ErrorCode::InsufficientData, "percentile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Interval bootstrap_ci(const std::function<double(Rng&)>& eval, int B, std::uint64_t seed) {
    require(B >= 100, ErrorCode::InvalidArgument, "bootstrap needs B >= 100");
    std::vector<double> stats(static_cast<std::size_t>(B));
    parallel_for(stats.size(), [&](std::size_t b) {
        Rng rng = make_rng(seed, b);
        stats[b] = eval(rng);
    });
    return {percentile(stats, 2.5), percentile(stats, 97.5)};
}

std::vector<Index> resample_indices(Index n, Rng& rng) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (auto& i : idx) i = pick(rng);
    return idx;
}

MetricReport to_report(const ClassificationMetrics& m) {
    MetricReport r;
    r.task = "classification";
    r.values = {{"accuracy", m.accuracy},
                {"f1_macro", m.f1_macro},
                {"f1_weighted", m.f1_weighted},
                {"precision_macro", m.precision_macro},
                {"precision_weighted", m.precision_weighted}};
    return r;
}

}  // namespace qelm
