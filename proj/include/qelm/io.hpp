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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qelm/circuit.hpp"
#include "qelm/eigentask.hpp"
#include "qelm/readout.hpp"
#include "qelm/tuner.hpp"

namespace qelm::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Shortest representation that round-trips.
std::string fmt(double v);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& doc);

/// Versioned CSV: the first line is "#schema=qelm.<kind>/<version>", then
/// the header and rows.
struct CsvTable {
    std::string kind;
    int version = kSchemaVersion;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    Index column(const std::string& name) const;
    std::vector<double> numeric(const std::string& name) const;
};

std::string to_csv(const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);

/// Rejects a missing schema line, another kind (when `expected_kind` is
/// given) and any version other than the supported one.
CsvTable parse_csv(const std::string& text, std::optional<std::string> expected_kind = std::nullopt);
CsvTable read_csv(const std::string& path, std::optional<std::string> expected_kind = std::nullopt);

/// Checks a "qelm.<kind>/<n>" schema tag.
void check_schema(const json& doc, const std::string& kind);

json to_json(const HyperParams& hp);
HyperParams hyper_from_json(const json& j);

json to_json(const CircuitSpec& spec);  ///< "qelm.circuit/1"
CircuitSpec circuit_from_json(const json& j);

json to_json(const EigentaskBasis& basis);  ///< "qelm.eigentasks/1"
EigentaskBasis basis_from_json(const json& j);

/// "qelm.model/1"; carries an FNV-1a hash of the feature names so a model
/// is not applied to features with another layout.
json to_json(const RidgeModel& model);
RidgeModel model_from_json(const json& j);
std::uint64_t feature_schema_hash(const std::vector<std::string>& names);

json to_json(const MetricReport& report);  ///< "qelm.metrics/1"

json to_json(const TrialRecord& t);  ///< "qelm.trial/1"
TrialRecord trial_from_json(const json& j);

/// Frequency file "qelm.frequencies/1": columns sample, subset ("q" or
/// "q0-q1"), shots, then one column per cell (6 or 36). Returns one T x K
/// block per subset in first-appearance order.
struct FrequencyTable {
    std::vector<std::vector<int>> subsets;
    std::vector<MatrixXd> blocks;
    long shots = 0;
};
FrequencyTable read_frequencies(const std::string& path);
void write_frequencies(const std::string& path, const FrequencyTable& t);

}  // namespace qelm::io
