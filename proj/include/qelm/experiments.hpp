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
#include <optional>
#include <string>
#include <vector>

#include "qelm/circuit.hpp"
#include "qelm/eigentask.hpp"
#include "qelm/readout.hpp"
#include "qelm/statevec.hpp"
#include "qelm/tasks.hpp"

namespace qelm {

enum class FeatureKind { X, Pauli, Eigentask, EigentaskCut };

FeatureKind parse_feature_kind(const std::string& s);
std::string to_string(FeatureKind k);

/// Local frequencies of a batch of inputs: one T x 6 block per qubit and one
/// T x 36 block per disjoint pair (0,1),(2,3),... `shots` is 0 for exact
/// probabilities.
struct FrequencyBank {
    int n_qubits = 0;
    long shots = 0;
    std::vector<MatrixXd> singles;
    std::vector<MatrixXd> pairs;

    Index rows() const { return singles.empty() ? 0 : singles.front().rows(); }
    const std::vector<MatrixXd>& blocks(int weight) const { return weight == 1 ? singles : pairs; }
    FrequencyBank select(const std::vector<Index>& rows) const;
};

/// Sources fed to the circuit for one sample (one entry per input source).
using SampleInput = std::vector<VectorXd>;

std::vector<SampleInput> single_source(const MatrixXd& inputs);

StateVector simulate(const CircuitSpec& spec, const SampleInput& input);

/// Draws max(budgets) shots per input and records the frequencies of each
/// budget's prefix. Entry k of the result belongs to budgets[k]. Shots for
/// input i are seeded from (seed, i).
std::vector<FrequencyBank> sample_frequency_banks(const CircuitSpec& spec, const std::vector<SampleInput>& inputs,
                                                  const std::vector<long>& budgets, std::uint64_t seed);

FrequencyBank exact_frequency_bank(const CircuitSpec& spec, const std::vector<SampleInput>& inputs);

/// Shadow estimates from a bank. X: X_i (+ XX on disjoint pairs for weight
/// 2). Pauli: X_i, Y_i, Z_i (+ all nine labels on disjoint pairs). Bias first.
MatrixXd shadow_features(const FrequencyBank& bank, FeatureKind kind, int weight);
std::vector<std::string> shadow_feature_names(int n_qubits, FeatureKind kind, int weight);

struct FeaturePipeline {
    FeatureKind kind = FeatureKind::Pauli;
    int weight = 1;
    ScalingMode scaling = ScalingMode::Unit;
    double lambda_cut = 1.0;
};

/// Train/test features ready for the readout: eigentask bases are
/// estimated on the training bank only and scalers are frozen on it.
struct PreparedFeatures {
    MatrixXd train;
    MatrixXd test;
    std::optional<EigentaskBasis> basis;
    FeatureScaler scaler;
};

PreparedFeatures prepare_features(const FrequencyBank& train, const FrequencyBank& test, const FeaturePipeline& p);

// NARMA -------------------------------------------------------------------

struct NarmaConfig {
    int n_qubits = 8;
    int n_layers = 0;  ///< 0: N/2
    int T_init = 100;
    int T_train = 250;
    int T_test = 250;
    std::vector<int> orders;  ///< empty: 1..N/2
    double ridge_lambda = kRegressionLambda;
    double noise_sigma = 0.0;
    long shots = 0;  ///< > 0 adds a shot-sampled variant
    std::uint64_t seed = 0;

    int window() const { return n_qubits / 2; }
    int layers() const { return n_layers > 0 ? n_layers : n_qubits / 2; }
    std::vector<int> resolved_orders() const;
};

struct NarmaOrderResult {
    int n = 0;
    double r2_train = 0.0;
    double r2_test = 0.0;
    std::string variant;
};

/// One realisation: circuit drawn from `hp` (seed replaced by a seed derived
/// from cfg.seed), one shared input series, features computed once and reused
/// by every order. Variants: "exact", plus "noisy" when noise_sigma > 0 and
/// "shots" when shots > 0.
std::vector<NarmaOrderResult> narma_by_order(const NarmaConfig& cfg, const HyperParams& hp);

/// Sum of test R^2 over orders 1..N/2 for one realisation; noise_sigma > 0
/// perturbs the exact features.
double narma_cumulative_r2(const NarmaConfig& cfg, const HyperParams& hp);

// Landsat -----------------------------------------------------------------

struct LandsatConfig {
    std::string data_path;
    int n_qubits = 12;
    int n_encoding_layers = 12;
    Index subsample = kLandsatSubsample;
    Index train_pool = 600;
    std::vector<long> shot_budgets{100, 1000, 10000};
    std::vector<Index> train_sizes{100, 200, 400};
    double ridge_lambda = kClassificationLambda;
    double lambda_cut = 1.0;
    int bootstrap = 100;  ///< 0 disables confidence intervals

    /// 1 encoding + 3 dynamics per group; stride N/2 lets the encoding layers
    /// cover the 72-element input once.
    LayerSchedule schedule() const;
    long max_shots() const;
};

struct LandsatData {
    TabularDataset data;
    std::vector<Index> train_pool;
    std::vector<Index> test;
    MatrixXd scaled;   ///< min-max features in [-1,1]
    CircuitSpec spec;
    std::vector<long> budgets;
    std::vector<FrequencyBank> banks;  ///< one per budget
};

LandsatData prepare_landsat(const LandsatConfig& cfg, std::uint64_t seed);

struct CellResult {
    std::string features;
    std::string scaling;
    int weight = 0;
    long shots = 0;
    Index n_train = 0;
    Index n_features = 0;
    ClassificationMetrics train;
    ClassificationMetrics test;
    std::optional<Interval> f1_ci;
};

/// Nested training subsets: a seeded permutation of the pool, cut to size.
std::vector<Index> training_subset(const LandsatData& d, Index n_train, std::uint64_t seed);

CellResult evaluate_cell(const LandsatData& d, const FeaturePipeline& p, long budget, Index n_train,
                         const LandsatConfig& cfg, std::uint64_t seed, ResampleAxis axis = ResampleAxis::TrainSet);

/// The 16 readout cells {x, pauli, eigentask, eigentask-cut} x {unit, scaled}
/// x {1, 2} at the largest budget on the full training pool. "scaled" means
/// signal scaling for shadow features and NSR scaling for eigentasks.
std::vector<CellResult> ablation(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed);

/// Majority-class and ridge-on-raw-features baselines.
std::vector<CellResult> baselines(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed);

/// Weight-1 Pauli features, unit scaling: one cell per training size at the
/// largest budget, and one per budget on the full pool.
std::vector<CellResult> learning_curve_train(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed);
std::vector<CellResult> learning_curve_shots(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed);

}  // namespace qelm
