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

#include "qelm/common.hpp"
#include "qelm/rng.hpp"
#include "qelm/statevec.hpp"

namespace qelm {

enum class Basis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char basis_char(Basis b);
Basis basis_from_char(char c);

/// Randomised single-qubit Pauli measurement record.
///
/// Each shot is packed into one word: bit q holds qubit q's outcome
/// (1 means -1) in the low N bits; above them the bases form a base-3
/// number with qubit 0 as the least significant trit.
class ShotRecord {
  public:
    static constexpr int kMaxQubits = 24;

    explicit ShotRecord(int n_qubits = 0);

    int n_qubits() const { return n_; }
    std::size_t size() const { return shots_.size(); }
    const std::vector<std::uint64_t>& packed() const { return shots_; }

    void push(std::uint64_t packed_shot) { shots_.push_back(packed_shot); }
    void push(const std::vector<Basis>& bases, const std::vector<int>& outcomes);

    Basis basis(std::size_t shot, int qubit) const;
    int outcome(std::size_t shot, int qubit) const;  ///< +1 or -1

    /// Per-qubit cell index 2*basis + (outcome == -1) for one shot.
    void cells(std::size_t shot, int* out) const;

    /// First `n` shots; records are stored in i.i.d. order, so a prefix is
    /// itself a valid sample of size n.
    ShotRecord prefix(std::size_t n) const;

    /// Resample with replacement (bootstrap over shots).
    ShotRecord resample(Rng& rng) const;

    bool operator==(const ShotRecord&) const = default;

  private:
    int n_;
    std::vector<std::uint64_t> shots_;
};

/// Draws `shots` randomised-basis measurements with exact Born statistics.
/// `forced_bases`, when given, fixes the basis of every qubit.
ShotRecord sample_shots(const StateVector& state, long shots, std::uint64_t seed,
                        const std::optional<std::vector<Basis>>& forced_bases = std::nullopt);

struct ShadowStats {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t matching_shots = 0;
};

/// Classical-shadow estimate (3^w / S) * sum over matching shots of the
/// outcome product. Throws NO_MATCHING_SHOTS when no shot aligns.
double shadow_estimate(const ShotRecord& records, const PauliObservable& obs);
ShadowStats shadow_statistics(const ShotRecord& records, const PauliObservable& obs);

/// Normalised (basis, outcome) frequencies on a one- or two-qubit subset.
/// Single cells run X+,X-,Y+,Y-,Z+,Z-; pair cells are the Kronecker square
/// with the subset's first qubit major.
struct LocalFrequencies {
    std::vector<int> qubits;
    VectorXd freq;
    long shots = 0;
};

int cells_for_weight(int weight);
std::vector<std::string> cell_labels(int weight);

std::vector<std::vector<int>> single_subsets(int n_qubits);
std::vector<std::vector<int>> pair_subsets(int n_qubits);

/// Frequencies over the first `n_shots` shots (all when omitted).
std::vector<LocalFrequencies> local_frequencies(const ShotRecord& records,
                                                const std::vector<std::vector<int>>& subsets,
                                                std::optional<std::size_t> n_shots = std::nullopt);

/// Exact cell probabilities (1/3^w) * Born probability on a subset.
VectorXd local_probabilities(const StateVector& state, const std::vector<int>& subset);

/// Cell probabilities of a one- or two-qubit density matrix.
VectorXd povm_probabilities(const MatrixXcd& rho);

/// Effect matrix A with p = A * c, c the Pauli coordinates of rho
/// (rho = sum_P c_P P / 2^w). Columns follow I,X,Y,Z (Kronecker for pairs).
MatrixXd povm_effect_map(int weight);

/// Multinomial frequencies of `shots` draws from `p`.
VectorXd sample_frequencies(const VectorXd& p, long shots, Rng& rng);

/// Shadow estimate of `obs` evaluated from subset frequencies; the
/// observable's support must lie inside the subset.
double pauli_from_frequencies(const LocalFrequencies& f, const PauliObservable& obs);

/// Adds i.i.d. N(0, sigma^2) to every column but the leading bias column.
MatrixXd gaussian_noise_features(const MatrixXd& features, double sigma, std::uint64_t seed);

/// Standard deviation used to emulate shot noise: 10^{-3/2}.
inline const double kShotNoiseSigma = std::pow(10.0, -1.5);

/// Compact binary shot file: "QELMSHOT", u32 version, u32 N, u64 shots, then
/// per shot ceil(N/5) bytes of packed trits and ceil(N/8) outcome bytes.
void write_shot_file(const std::string& path, const ShotRecord& records);
ShotRecord read_shot_file(const std::string& path);

}  // namespace qelm
