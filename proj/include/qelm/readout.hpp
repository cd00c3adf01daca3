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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qelm/common.hpp"
#include "qelm/rng.hpp"

namespace qelm {

inline constexpr double kRegressionLambda = 1e-6;
inline constexpr double kClassificationLambda = 1e-3;

/// Linear readout. Column 0 of every feature matrix is the bias and is not
/// regularised. Regression models have one output column; classifiers one
/// per class, with `classes` giving the label of each column.
struct RidgeModel {
    MatrixXd weights;
    double lambda = 0.0;
    std::vector<int> classes;
    std::vector<std::string> feature_names;

    bool is_classifier() const { return !classes.empty(); }
    MatrixXd scores(const MatrixXd& R) const;
    VectorXd predict(const MatrixXd& R) const;
    std::vector<int> predict_labels(const MatrixXd& R) const;
};

/// Minimises |Y - R W|^2 + lambda |D W|^2 with D = diag(0, 1, ..., 1).
MatrixXd ridge_solve(const MatrixXd& R, const MatrixXd& Y, double lambda);

RidgeModel fit_ridge(const MatrixXd& R, const VectorXd& y, double lambda = kRegressionLambda);

/// One-hot ridge over the sorted distinct labels.
RidgeModel fit_classifier(const MatrixXd& R, const std::vector<int>& labels,
                          double lambda = kClassificationLambda);

/// Argmax per row; ties go to the lowest column.
std::vector<int> argmax_rows(const MatrixXd& scores);

double mse(const VectorXd& y, const VectorXd& yhat);
double r_squared(const VectorXd& y, const VectorXd& yhat);

struct ClassificationMetrics {
    double accuracy = 0.0;
    double f1_macro = 0.0;
    double f1_weighted = 0.0;
    double precision_macro = 0.0;
    double precision_weighted = 0.0;
};

ClassificationMetrics classification_metrics(const std::vector<int>& truth, const std::vector<int>& pred);

/// Most frequent label (lowest on ties).
int majority_class(const std::vector<int>& labels);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class ResampleAxis { TrainSet, Shots };
std::string to_string(ResampleAxis a);

/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

/// Percentile (2.5, 97.5) interval of `eval` over B resamples. Each call
/// receives its own generator seeded from (seed, b), so results do not
/// depend on scheduling. The closure performs the resampling along its axis.
Interval bootstrap_ci(const std::function<double(Rng&)>& eval, int B, std::uint64_t seed);

/// Indices drawn uniformly with replacement.
std::vector<Index> resample_indices(Index n, Rng& rng);

/// Metric report with optional confidence bounds, keyed by metric name.
struct MetricReport {
    std::string task;
    std::map<std::string, double> values;
    std::map<std::string, Interval> ci;
};

MetricReport to_report(const ClassificationMetrics& m);

}  // namespace qelm
