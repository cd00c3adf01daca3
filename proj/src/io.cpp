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

#include "qelm/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qelm/measurement.hpp"

namespace qelm::io {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::Io, "cannot write " + path);
        out << text;
        require(out.good(), ErrorCode::Io, "write failed for " + path);
    }
    std::filesystem::rename(tmp, path);
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        fail(ErrorCode::Parse, path + ": " + e.what());
    }
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

Index CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<Index>(i);
    fail(ErrorCode::Parse, "CSV qelm." + kind + " has no column '" + name + "'");
}

std::vector<double> CsvTable::numeric(const std::string& name) const {
    const auto c = static_cast<std::size_t>(column(name));
    std::vector<double> out;
    for (const auto& r : rows) {
        try {
            out.push_back(std::stod(r.at(c)));
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "non-numeric value in column '" + name + "'");
        }
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        require(v[i].find_first_of(",\n") == std::string::npos, ErrorCode::InvalidArgument,
                "CSV field contains a separator: " + v[i]);
        if (i) s += ',';
        s += v[i];
    }
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string to_csv(const CsvTable& t) {
    std::string s = "#schema=qelm." + t.kind + "/" + std::to_string(t.version) + "\n" + join(t.header) + "\n";
    for (const auto& r : t.rows) {
        require(r.size() == t.header.size(), ErrorCode::DimensionMismatch, "CSV row width differs from header");
        s += join(r) + "\n";
    }
    return s;
}

void write_csv(const std::string& path, const CsvTable& t) { write_text(path, to_csv(t)); }

CsvTable parse_csv(const std::string& text, std::optional<std::string> expected_kind) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse, "empty CSV");
    const std::string prefix = "#schema=qelm.";
    require(line.rfind(prefix, 0) == 0, ErrorCode::SchemaVersion, "CSV lacks a schema line");
    const auto slash = line.find('/', prefix.size());
    require(slash != std::string::npos, ErrorCode::SchemaVersion, "malformed schema line: " + line);
    CsvTable t;
    t.kind = line.substr(prefix.size(), slash - prefix.size());
    try {
        t.version = std::stoi(line.substr(slash + 1));
    } catch (const std::exception&) {
        fail(ErrorCode::SchemaVersion, "malformed schema version: " + line);
    }
    require(t.version == kSchemaVersion, ErrorCode::SchemaVersion,
            "unsupported schema version " + std::to_string(t.version) + " for qelm." + t.kind);
    if (expected_kind)
        require(t.kind == *expected_kind, ErrorCode::SchemaVersion,
                "expected qelm." + *expected_kind + ", found qelm." + t.kind);
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse, "CSV lacks a header");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto r = split(line);
        require(r.size() == t.header.size(), ErrorCode::Parse, "CSV row width differs from header");
        t.rows.push_back(std::move(r));
    }
    return t;
}

CsvTable read_csv(const std::string& path, std::optional<std::string> expected_kind) {
    return parse_csv(read_text(path), std::move(expected_kind));
}

void check_schema(const json& doc, const std::string& kind) {
    require(doc.is_object() && doc.contains("schema") && doc["schema"].is_string(), ErrorCode::SchemaVersion,
            "document lacks a schema tag");
    const std::string want = "qelm." + kind + "/" + std::to_string(kSchemaVersion);
    const std::string got = doc["schema"].get<std::string>();
    require(got == want, ErrorCode::SchemaVersion, "expected schema " + want + ", found " + got);
}

namespace {

json vec(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

VectorXd vec_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

json mat(const MatrixXd& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
    return rows;
}

MatrixXd mat_from(const json& j, Index cols_if_empty = 0) {
    if (j.empty()) return MatrixXd(0, cols_if_empty);
    MatrixXd m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].size() == static_cast<std::size_t>(m.cols()), ErrorCode::Parse, "ragged matrix");
        m.row(static_cast<Index>(i)) = vec_from(j[i]).transpose();
    }
    return m;
}

template <typename F>
auto guarded(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        fail(ErrorCode::Parse, what + ": " + e.what());
    }
}

}  // namespace

json to_json(const HyperParams& hp) {
    return {{"a_in", hp.a_in}, {"b0", hp.b0}, {"db", hp.db}, {"h0", hp.h0}, {"dh", hp.dh},
            {"J0", hp.J0},     {"dJ", hp.dJ}, {"seed", hp.seed}};
}

HyperParams hyper_from_json(const json& j) {
    return guarded("hyperparameters", [&] {
        HyperParams hp;
        hp.a_in = j.at("a_in").get<double>();
        hp.b0 = j.at("b0").get<double>();
        hp.db = j.at("db").get<double>();
        hp.h0 = j.at("h0").get<double>();
        hp.dh = j.at("dh").get<double>();
        hp.J0 = j.at("J0").get<double>();
        hp.dJ = j.at("dJ").get<double>();
        hp.seed = j.at("seed").get<std::uint64_t>();
        return hp;
    });
}

json to_json(const CircuitSpec& spec) {
    const auto& s = spec.schedule();
    json kinds = json::array(), parities = json::array(), layers = json::array(), enc = json::array();
    for (auto k : s.kinds) kinds.push_back(k == LayerKind::Encoding ? "E" : "D");
    for (auto p : s.parities) parities.push_back(p == BondParity::Even ? "even" : "odd");
    for (const auto& layer : spec.blocks()) {
        json blocks = json::array();
        for (const auto& b : layer) {
            json jb = {{"J", b.J}, {"h", b.h}};
            if (b.b) jb["b"] = *b.b;
            blocks.push_back(jb);
        }
        layers.push_back(blocks);
    }
    for (const auto& e : spec.encoding()) enc.push_back({{"layer", e.layer}, {"source", e.source}, {"offsets", e.offsets}});
    return {{"schema", "qelm.circuit/1"},
            {"n_qubits", s.n_qubits},
            {"kinds", kinds},
            {"parities", parities},
            {"encoding_stride", s.encoding_stride},
            {"encoding_sources", s.encoding_sources},
            {"initial_state", s.initial_state == InitialState::BellPairs ? "bell_pairs" : "all_zero"},
            {"hyper", to_json(spec.hyper())},
            {"blocks", layers},
            {"encoding", enc}};
}

CircuitSpec circuit_from_json(const json& j) {
    check_schema(j, "circuit");
    return guarded("circuit", [&] {
        LayerSchedule s;
        s.n_qubits = j.at("n_qubits").get<int>();
        for (const auto& k : j.at("kinds")) s.kinds.push_back(k.get<std::string>() == "E" ? LayerKind::Encoding : LayerKind::Dynamics);
        for (const auto& p : j.at("parities"))
            s.parities.push_back(p.get<std::string>() == "even" ? BondParity::Even : BondParity::Odd);
        s.encoding_stride = j.at("encoding_stride").get<int>();
        s.encoding_sources = j.at("encoding_sources").get<std::vector<int>>();
        s.initial_state = j.at("initial_state").get<std::string>() == "bell_pairs" ? InitialState::BellPairs
                                                                                   : InitialState::AllZero;
        std::vector<std::vector<FrozenBlock>> blocks;
        for (const auto& layer : j.at("blocks")) {
            std::vector<FrozenBlock> l;
            for (const auto& b : layer) {
                FrozenBlock fb{b.at("J").get<double>(), b.at("h").get<double>(), std::nullopt};
                if (b.contains("b")) fb.b = b.at("b").get<double>();
                l.push_back(fb);
            }
            blocks.push_back(std::move(l));
        }
        std::vector<EncodingSlot> enc;
        for (const auto& e : j.at("encoding"))
            enc.push_back({e.at("layer").get<int>(), e.at("source").get<int>(), e.at("offsets").get<std::vector<int>>()});
        return CircuitSpec(std::move(s), hyper_from_json(j.at("hyper")), std::move(blocks), std::move(enc));
    });
}

json to_json(const EigentaskBasis& basis) {
    json subs = json::array();
    for (const auto& s : basis.subsets)
        subs.push_back({{"id", s.id},
                        {"qubits", s.qubits},
                        {"beta2", vec(s.beta2)},
                        {"coefficients", mat(s.coefficients.transpose())},
                        {"constant", vec(s.constant)},
                        {"constant_beta2", s.constant_beta2}});
    return {{"schema", "qelm.eigentasks/1"},
            {"cell_order_version", kCellOrderVersion},
            {"shots", basis.shots},
            {"rank_tol", basis.rank_tol},
            {"subsets", subs}};
}

EigentaskBasis basis_from_json(const json& j) {
    check_schema(j, "eigentasks");
    return guarded("eigentask basis", [&] {
        require(j.at("cell_order_version").get<int>() == kCellOrderVersion, ErrorCode::SchemaVersion,
                "unsupported cell order version");
        EigentaskBasis b;
        b.shots = j.at("shots").get<long>();
        b.rank_tol = j.at("rank_tol").get<double>();
        for (const auto& s : j.at("subsets")) {
            SubsetEigentasks sub;
            sub.id = s.at("id").get<int>();
            sub.qubits = s.at("qubits").get<std::vector<int>>();
            sub.beta2 = vec_from(s.at("beta2"));
            const Index K = cells_for_weight(static_cast<int>(sub.qubits.size()));
            sub.coefficients = mat_from(s.at("coefficients"), K).transpose();
            sub.constant = vec_from(s.at("constant"));
            sub.constant_beta2 = s.at("constant_beta2").get<double>();
            require(sub.coefficients.cols() == sub.beta2.size(), ErrorCode::Parse, "beta2 and coefficients disagree");
            b.subsets.push_back(std::move(sub));
        }
        return b;
    });
}

std::uint64_t feature_schema_hash(const std::vector<std::string>& names) {
    std::string joined;
    for (const auto& n : names) joined += n + '\n';
    return fnv1a64(joined);
}

json to_json(const RidgeModel& model) {
    return {{"schema", "qelm.model/1"},
            {"lambda", model.lambda},
            {"classes", model.classes},
            {"feature_names", model.feature_names},
            {"feature_hash", hex64(feature_schema_hash(model.feature_names))},
            {"weights", mat(model.weights)}};
}

RidgeModel model_from_json(const json& j) {
    check_schema(j, "model");
    return guarded("model", [&] {
        RidgeModel m;
        m.lambda = j.at("lambda").get<double>();
        m.classes = j.at("classes").get<std::vector<int>>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        require(j.at("feature_hash").get<std::string>() == hex64(feature_schema_hash(m.feature_names)),
                ErrorCode::Parse, "feature hash does not match feature names");
        m.weights = mat_from(j.at("weights"));
        return m;
    });
}

json to_json(const MetricReport& report) {
    json values = json::object(), ci = json::object();
    for (const auto& [k, v] : report.values) values[k] = v;
    for (const auto& [k, v] : report.ci) ci[k] = {v.lo, v.hi};
    return {{"schema", "qelm.metrics/1"}, {"task", report.task}, {"values", values}, {"ci", ci}};
}

json to_json(const TrialRecord& t) {
    return {{"schema", "qelm.trial/1"},
            {"id", t.id},
            {"status", t.status == TrialStatus::Complete ? "COMPLETE" : "INCOMPLETE"},
            {"hyper", to_json(t.hp)},
            {"n_realizations", t.n_realizations},
            {"objectives", t.evaluation.names},
            {"means", t.evaluation.means},
            {"raw", t.evaluation.raw},
            {"pareto_rank", t.pareto_rank}};
}

TrialRecord trial_from_json(const json& j) {
    check_schema(j, "trial");
    return guarded("trial", [&] {
        TrialRecord t;
        t.id = j.at("id").get<int>();
        t.status = j.at("status").get<std::string>() == "COMPLETE" ? TrialStatus::Complete : TrialStatus::Incomplete;
        t.hp = hyper_from_json(j.at("hyper"));
        t.n_realizations = j.at("n_realizations").get<int>();
        t.evaluation.names = j.at("objectives").get<std::vector<std::string>>();
        t.evaluation.means = j.at("means").get<std::vector<double>>();
        t.evaluation.raw = j.at("raw").get<std::vector<std::vector<double>>>();
        t.pareto_rank = j.at("pareto_rank").get<int>();
        return t;
    });
}

namespace {

std::vector<int> parse_subset(const std::string& s) {
    std::vector<int> q;
    std::istringstream ss(s);
    std::string part;
    while (std::getline(ss, part, '-')) {
        try {
            q.push_back(std::stoi(part));
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "bad subset '" + s + "'");
        }
    }
    require(q.size() == 1 || q.size() == 2, ErrorCode::Parse, "subset must hold one or two qubits: " + s);
    return q;
}

std::string subset_label(const std::vector<int>& q) {
    std::string s = std::to_string(q[0]);
    if (q.size() == 2) s += "-" + std::to_string(q[1]);
    return s;
}

}  // namespace

FrequencyTable read_frequencies(const std::string& path) {
    const CsvTable t = read_csv(path, "frequencies");
    const auto cs = static_cast<std::size_t>(t.column("subset"));
    const auto cn = static_cast<std::size_t>(t.column("shots"));
    const auto cf = static_cast<std::size_t>(t.column("f0"));
    FrequencyTable out;
    std::map<std::string, std::size_t> where;
    std::vector<std::vector<std::vector<double>>> rows;
    for (const auto& r : t.rows) {
        const auto q = parse_subset(r[cs]);
        const long shots = std::stol(r[cn]);
        require(out.shots == 0 || shots == out.shots, ErrorCode::Parse, "frequency file mixes shot budgets");
        out.shots = shots;
        auto [it, fresh] = where.emplace(r[cs], out.subsets.size());
        if (fresh) {
            out.subsets.push_back(q);
            rows.emplace_back();
        }
        const int K = cells_for_weight(static_cast<int>(q.size()));
        require(cf + static_cast<std::size_t>(K) <= r.size(), ErrorCode::Parse, "frequency row too short");
        std::vector<double> f;
        for (int k = 0; k < K; ++k) f.push_back(std::stod(r[cf + static_cast<std::size_t>(k)]));
        for (std::size_t k = cf + static_cast<std::size_t>(K); k < r.size(); ++k)
            require(r[k].empty(), ErrorCode::Parse, "unexpected cells for subset " + r[cs]);
        rows[it->second].push_back(std::move(f));
    }
    for (const auto& block : rows) {
        MatrixXd M(static_cast<Index>(block.size()), static_cast<Index>(block.front().size()));
        for (std::size_t i = 0; i < block.size(); ++i)
            for (std::size_t k = 0; k < block[i].size(); ++k) M(static_cast<Index>(i), static_cast<Index>(k)) = block[i][k];
        require(block.size() == rows.front().size(), ErrorCode::Parse, "subsets have different sample counts");
        out.blocks.push_back(std::move(M));
    }
    return out;
}

void write_frequencies(const std::string& path, const FrequencyTable& t) {
    int maxK = 0;
    for (const auto& b : t.blocks) maxK = std::max(maxK, static_cast<int>(b.cols()));
    CsvTable csv;
    csv.kind = "frequencies";
    csv.header = {"sample", "subset", "shots"};
    for (int k = 0; k < maxK; ++k) csv.header.push_back("f" + std::to_string(k));
    for (std::size_t s = 0; s < t.subsets.size(); ++s)
        for (Index i = 0; i < t.blocks[s].rows(); ++i) {
            std::vector<std::string> r{std::to_string(i), subset_label(t.subsets[s]), std::to_string(t.shots)};
            for (int k = 0; k < maxK; ++k) r.push_back(k < t.blocks[s].cols() ? fmt(t.blocks[s](i, k)) : "");
            csv.rows.push_back(std::move(r));
        }
    write_csv(path, csv);
}

}  // namespace qelm::io
