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
#include <string>
#include <utility>
#include <vector>

#include "qelm/circuit.hpp"
#include "qelm/common.hpp"

namespace qelm {

/// NARMA-n series. Index t of `y` is the target aligned with the window
/// whose most recent input is u[t]:
///   y[t] = 0.2 y[t-1] + 0.04 sum_{i<n} y[t-1-i] + 1.5 u[t-n+1] u[t] + 0.001,
/// with y and u zero at negative indices.
struct NarmaSequence {
    int order = 1;
    int T_init = 100;
    int T_train = 250;
    int T_test = 250;
    int L = 1;
    std::uint64_t seed = 0;           ///< seed actually used (after regeneration)
    int regenerations = 0;
    VectorXd u;                       ///< raw inputs in [0, 0.5]
    VectorXd y;

    Index total_length() const { return T_init + T_train + T_test + (L - 1); }
    VectorXd transformed() const { return (2.0 * u.array() - 1.0).matrix(); }
};

inline constexpr double kNarmaDivergence = 10.0;

VectorXd narma_targets(const VectorXd& u, int order);

/// Largest |y[t] - recurrence(t)| over the stored series.
double narma_residual(const NarmaSequence& seq);

/// Draws u ~ Unif(0, 0.5) and iterates the recurrence. A series exceeding
/// |y| > 10 is discarded and redrawn from a derived seed.
NarmaSequence gen_narma(int order, int T_init, int T_train, int T_test, int L, std::uint64_t seed);

/// One input series shared by several orders, redrawn from a derived seed
/// until no order diverges. Entry k corresponds to orders[k].
std::vector<NarmaSequence> gen_narma_orders(const std::vector<int>& orders, int T_init, int T_train, int T_test,
                                            int L, std::uint64_t seed);

/// Rolling windows over a series, most recent value first:
/// row j is (s[t], s[t-1], ..., s[t-L+1]) with t = first_end + j.
MatrixXd rolling_windows(const VectorXd& series, int L, Index first_end, Index count);

struct WindowedDataset {
    MatrixXd windows;          ///< one window of transformed inputs per row
    VectorXd targets;
    std::vector<Index> end_index;  ///< sequence index of each window's newest input
    Index n_train = 0;
    int L = 0;
    /// Largest NARMA order whose targets depend only on inputs inside the window.
    int memory_boundary = 0;

    Index n_test() const { return windows.rows() - n_train; }
};

/// T_train + T_test windows after the T_init warm-up; training windows
/// precede test windows.
WindowedDataset make_windows(const NarmaSequence& seq, int L);

struct TabularDataset {
    MatrixXd features;
    std::vector<int> labels;
    std::vector<Index> source_rows;  ///< row indices in the source file

    Index size() const { return features.rows(); }
    TabularDataset select(const std::vector<Index>& rows) const;
};

inline constexpr int kLandsatFeatures = 36;
inline constexpr Index kLandsatSubsample = 860;

/// Reads whitespace-separated rows of 36 features and a label.
TabularDataset read_landsat(const std::string& path);

/// Per-class quotas by largest remainder of size * share; rows drawn
/// without replacement and returned in source order.
std::vector<Index> stratified_sample(const std::vector<int>& labels, Index size, std::uint64_t seed);

/// Reads the file and keeps a stratified subsample (all rows when
/// `subsample_size` is at least the file size).
TabularDataset load_landsat(const std::string& path, Index subsample_size, std::uint64_t seed);

/// Stratified train/test partition; both parts in ascending order.
std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const std::vector<int>& labels, Index n_train,
                                                                   std::uint64_t seed);

/// Per-feature min-max map to [-1, 1] fitted on training rows. Values
/// outside the fitted range are clipped. Constant features map to 0.
class MinMaxScaler {
  public:
    static MinMaxScaler fit(const MatrixXd& train);
    MatrixXd transform(const MatrixXd& X) const;
    const VectorXd& min() const { return lo_; }
    const VectorXd& max() const { return hi_; }

  private:
    VectorXd lo_, hi_;
};

/// (f, f): two stacked copies of the 36 features.
VectorXd build_classification_input(const VectorXd& features36);
MatrixXd build_classification_inputs(const MatrixXd& features);

/// Several aligned series driving one circuit. Each repetition has one
/// encoding layer per series followed by `n_dynamics` dynamics layers; an
/// encoding layer carries its series' most recent N/2 values.
struct MultiSeriesInput {
    LayerSchedule schedule;
    std::vector<std::vector<VectorXd>> inputs;  ///< [window][series]
};

MultiSeriesInput multi_series_windows(const std::vector<VectorXd>& series, int n_qubits, int repetitions,
                                      int n_dynamics, Index first_end, Index count);

}  // namespace qelm
