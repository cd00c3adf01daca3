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
#include <utility>
#include <vector>

#include "qelm/circuit.hpp"
#include "qelm/common.hpp"
#include "qelm/measurement.hpp"

namespace qelm {

struct Architecture {
    int n_qubits = 8;
    int n_layers = 4;
    InitialState initial_state = InitialState::BellPairs;

    std::string tag() const;  ///< e.g. "8q4l"
    LayerSchedule schedule() const;
    bool operator==(const Architecture&) const = default;
};

/// Parses "8x4,10x8" into architectures.
std::vector<Architecture> parse_architectures(const std::string& s);

enum class Objective { NarmaNoiseless, NarmaNoisy, BondDimension, Variability };

std::string to_string(Objective o);
Objective parse_objective(const std::string& s);
inline const std::vector<Objective> kAllObjectives{Objective::NarmaNoiseless, Objective::NarmaNoisy,
                                                   Objective::BondDimension, Objective::Variability};

struct TunerConfig {
    std::vector<Architecture> architectures{{8, 4}, {10, 8}};
    std::vector<Objective> objectives = kAllObjectives;
    int n_realizations = 10;
    double noise_sigma = kShotNoiseSigma;
    int variability_samples = 64;
    int bond_windows = 10;
    int T_init = 100;
    int T_train = 250;
    int T_test = 250;
};

/// Realisation r draws its circuit and input series from seeds derived from
/// (hp.seed, r).
std::uint64_t realization_seed(const HyperParams& hp, int r);

/// Sum over orders 1..N/2 of test R^2 for one realisation.
double narma_score(const HyperParams& hp, const Architecture& arch, double noise_sigma, int realization,
                   const TunerConfig& cfg = {});

/// Mean over the default observables of the sample variance of their
/// expectation for u ~ Unif(-1, 1)^{N/2}.
double variability(const HyperParams& hp, const Architecture& arch, int n_samples, int realization);

/// Median over evenly spaced NARMA-driven windows of the minimal bond
/// dimension at the default fidelity floor.
double bond_objective(const HyperParams& hp, const Architecture& arch, int realization, const TunerConfig& cfg = {});

/// Per-objective, per-architecture values averaged over realisations.
struct Evaluation {
    std::vector<std::string> names;  ///< "<objective>@<arch>"
    std::vector<double> means;
    std::vector<std::vector<double>> raw;  ///< [objective][realisation]
};

Evaluation evaluate_trial(const HyperParams& hp, const TunerConfig& cfg);

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform box over (a_in, b0, db, h0, dh, J0, dJ). h0 samples at or below
/// 0.1 are rejected and redrawn.
struct SearchSpace {
    Bounds a_in{0.0, 1.0};
    Bounds b0{-1.5, 1.5};
    Bounds db{0.0, 0.2};
    Bounds h0{0.1, 1.5};
    Bounds dh{0.0, 0.2};
    Bounds J0{-1.5, 1.5};
    Bounds dJ{0.0, 0.2};

    void validate() const;
    HyperParams sample(std::uint64_t seed) const;
};

inline constexpr double kMinH0 = 0.1;

enum class TrialStatus { Incomplete, Complete };

struct TrialRecord {
    int id = 0;
    HyperParams hp;
    TrialStatus status = TrialStatus::Incomplete;
    int n_realizations = 0;
    Evaluation evaluation;
    int pareto_rank = -1;
};

/// Non-dominated sorting; rank 0 is the front. `maximize[j]` gives the
/// direction of column j.
std::vector<int> pareto_ranks(const MatrixXd& objectives, const std::vector<bool>& maximize);

/// Front indices (rank 0) in ascending order.
std::vector<Index> pareto_front(const MatrixXd& objectives, const std::vector<bool>& maximize);

/// Every tuning objective is maximised.
std::vector<bool> objective_directions(const std::vector<std::string>& names);

/// Trial store in `dir`: trials/trial_XXXXX.json plus index.json. Trial k is
/// sampled from (seed, k), so a resumed run matches an uninterrupted one.
/// Trials already COMPLETE are kept; INCOMPLETE ones are re-evaluated.
/// `stop_after` (tests) evaluates at most that many trials, then returns.
std::vector<TrialRecord> run_search(const SearchSpace& space, int n_trials, const TunerConfig& cfg,
                                    std::uint64_t seed, const std::string& dir,
                                    std::optional<int> stop_after = std::nullopt);

std::vector<TrialRecord> load_trials(const std::string& dir);

/// Ranks over the COMPLETE trials; incomplete trials keep rank -1.
void assign_pareto_ranks(std::vector<TrialRecord>& trials);

}  // namespace qelm
