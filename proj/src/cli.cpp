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

#include "qelm/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "qelm/experiments.hpp"
#include "qelm/io.hpp"
#include "qelm/measurement.hpp"
#include "qelm/rng.hpp"
#include "qelm/tuner.hpp"

namespace qelm::cli {

namespace fs = std::filesystem;
using io::json;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::CapacityExceeded:
        case ErrorCode::InsufficientData:
        case ErrorCode::Parse:
        case ErrorCode::Io:
        case ErrorCode::SchemaVersion:
            return kExitUser;
        default:
            return kExitInternal;
    }
}

namespace {

// Run directory: config.snapshot before any work, CSV outputs, then
// manifest.json listing inputs and outputs.
class RunDir {
  public:
    RunDir(std::string path, std::string command) : path_(std::move(path)), command_(std::move(command)) {
        require(!path_.empty(), ErrorCode::InvalidArgument, "--out is required");
        std::error_code ec;
        fs::create_directories(path_, ec);
        require(!ec, ErrorCode::Io, "cannot create " + path_ + ": " + ec.message());
    }

    std::string file(const std::string& name) const { return (fs::path(path_) / name).string(); }

    void snapshot(const json& config) {
        config_ = config;
        io::write_text(file("config.snapshot"), config.dump(2) + "\n");
    }

    void input(const std::string& path) {
        const std::string bytes = io::read_text(path);
        inputs_.push_back({{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", io::hex64(io::fnv1a64(bytes))}});
    }

    void csv(const std::string& name, const io::CsvTable& t) {
        io::write_csv(file(name), t);
        outputs_.push_back(name);
    }

    void write_json(const std::string& name, const json& doc) {
        io::write_json(file(name), doc);
        outputs_.push_back(name);
    }

    void manifest(std::uint64_t seed, const json& extra = json::object()) {
        json m = {{"schema", "qelm.manifest/1"}, {"tool", "qelm"},       {"version", kVersion},
                  {"command", command_},         {"seed", seed},         {"config", config_},
                  {"inputs", inputs_},           {"outputs", outputs_}};
        for (const auto& [k, v] : extra.items()) m[k] = v;
        io::write_json(file("manifest.json"), m);
    }

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::string command_;
    json config_ = json::object();
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
};

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& flag) {
    std::vector<T> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            require(pos == item.size(), ErrorCode::InvalidArgument, "");
            out.push_back(static_cast<T>(v));
            require(static_cast<double>(out.back()) == v, ErrorCode::InvalidArgument, "");
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidArgument, flag + ": cannot parse '" + item + "'");
        }
    }
    require(!out.empty(), ErrorCode::InvalidArgument, flag + " is empty");
    return out;
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

HyperParams load_hyper(const std::string& path, std::uint64_t seed, RunDir& run) {
    if (path.empty()) return HyperParams::reference(seed);
    run.input(path);
    HyperParams hp = io::hyper_from_json(io::read_json(path));
    hp.validate();
    return hp;
}

// Options -----------------------------------------------------------------

struct NarmaOpts {
    std::uint64_t seed = 1;
    std::string out, hyper;
    int qubits = 8, layers = 0, max_order = 0;
    int t_init = 100, t_train = 250, t_test = 250;
    long shots = 0;
    double noise_sigma = 0.0;
    double ridge_lambda = kRegressionLambda;
};

struct ClassifyOpts {
    std::uint64_t seed = 1;
    std::string out, data = "data/landsat/sat.all";
    int qubits = 12, layers = 0, weight = 0, bootstrap = 100;
    std::string shots = "100,1000,10000", train_sizes = "100,200,400";
    long subsample = kLandsatSubsample, train_pool = 600;
    double ridge_lambda = kClassificationLambda, lambda_cut = 1.0;
    std::string features, scaling;
};

struct EigentaskOpts {
    std::uint64_t seed = 1;
    std::string out, hyper, frequencies, data;
    int qubits = 8, layers = 0, weight = 2, order = 2;
    int t_init = 100, t_train = 250, t_test = 250;
    long shots = 10000;
    long subsample = kLandsatSubsample, train_pool = 600;
    double lambda_cut = 1.0;
    double ridge_lambda = -1.0;
};

struct TuneOpts {
    std::uint64_t seed = 1;
    std::string out, arch = "8x4,10x8", objectives;
    int trials = 20, realizations = 10, variability_samples = 64, bond_windows = 10;
    int t_init = 100, t_train = 250, t_test = 250;
    double noise_sigma = kShotNoiseSigma;
    bool resume = false;
};

struct ParetoOpts {
    std::string store, out, objectives;
};

// narma -------------------------------------------------------------------

void cmd_narma(const NarmaOpts& o) {
    RunDir run(o.out, "narma");
    NarmaConfig cfg;
    cfg.n_qubits = o.qubits;
    cfg.n_layers = o.layers;
    cfg.T_init = o.t_init;
    cfg.T_train = o.t_train;
    cfg.T_test = o.t_test;
    cfg.ridge_lambda = o.ridge_lambda;
    cfg.noise_sigma = o.noise_sigma;
    cfg.shots = o.shots;
    cfg.seed = o.seed;
    require(o.max_order >= 0, ErrorCode::InvalidArgument, "--max-order must be >= 0");
    for (int n = 1; n <= o.max_order; ++n) cfg.orders.push_back(n);

    const HyperParams hp = load_hyper(o.hyper, o.seed, run);
    run.snapshot({{"command", "narma"},
                  {"seed", o.seed},
                  {"qubits", o.qubits},
                  {"layers", cfg.layers()},
                  {"window", cfg.window()},
                  {"orders", cfg.resolved_orders()},
                  {"T_init", o.t_init},
                  {"T_train", o.t_train},
                  {"T_test", o.t_test},
                  {"shots", o.shots},
                  {"noise_sigma", o.noise_sigma},
                  {"ridge_lambda", o.ridge_lambda},
                  {"hyper", io::to_json(hp)}});

    io::CsvTable t{"r2_vs_order", io::kSchemaVersion, {"n", "r2_train", "r2_test", "variant"}, {}};
    for (const auto& r : narma_by_order(cfg, hp))
        t.rows.push_back({std::to_string(r.n), io::fmt(r.r2_train), io::fmt(r.r2_test), r.variant});
    run.csv("r2_vs_order.csv", t);
    run.manifest(o.seed, {{"memory_boundary", cfg.window()}});
}

// classify ----------------------------------------------------------------

io::CsvTable cell_table(const std::string& kind, const std::vector<CellResult>& cells) {
    io::CsvTable t{kind,
                   io::kSchemaVersion,
                   {"features", "scaling", "weight", "shots", "n_train", "n_features", "train_accuracy",
                    "train_f1_macro", "test_accuracy", "test_f1_macro", "test_f1_weighted", "test_precision_macro",
                    "test_precision_weighted", "f1_ci_lo", "f1_ci_hi"},
                   {}};
    for (const auto& c : cells)
        t.rows.push_back({c.features, c.scaling, std::to_string(c.weight), std::to_string(c.shots),
                          std::to_string(c.n_train), std::to_string(c.n_features), io::fmt(c.train.accuracy),
                          io::fmt(c.train.f1_macro), io::fmt(c.test.accuracy), io::fmt(c.test.f1_macro),
                          io::fmt(c.test.f1_weighted), io::fmt(c.test.precision_macro),
                          io::fmt(c.test.precision_weighted), c.f1_ci ? io::fmt(c.f1_ci->lo) : "",
                          c.f1_ci ? io::fmt(c.f1_ci->hi) : ""});
    return t;
}

std::string cell_task(const CellResult& c) {
    std::string s = c.features + "/" + c.scaling;
    if (c.weight) s += "/w" + std::to_string(c.weight);
    return s;
}

LandsatConfig landsat_config(const std::string& data, int qubits, int layers, long subsample, long pool,
                             double ridge_lambda, double lambda_cut, int bootstrap) {
    require(qubits >= 2 && qubits % 2 == 0, ErrorCode::InvalidArgument, "--qubits must be even and >= 2");
    LandsatConfig cfg;
    cfg.data_path = data;
    cfg.n_qubits = qubits;
    const int per_layer = qubits / 2;
    cfg.n_encoding_layers = layers > 0 ? layers : (2 * kLandsatFeatures + per_layer - 1) / per_layer;
    cfg.subsample = subsample;
    cfg.train_pool = pool;
    cfg.ridge_lambda = ridge_lambda;
    cfg.lambda_cut = lambda_cut;
    cfg.bootstrap = bootstrap;
    return cfg;
}

void cmd_classify(const ClassifyOpts& o) {
    RunDir run(o.out, "classify");
    require(fs::exists(o.data), ErrorCode::Io, "dataset not found: " + o.data);
    LandsatConfig cfg = landsat_config(o.data, o.qubits, o.layers, o.subsample, o.train_pool, o.ridge_lambda,
                                       o.lambda_cut, o.bootstrap);
    cfg.shot_budgets = parse_list<long>(o.shots, "--shots");
    {
        const auto sizes = parse_list<long>(o.train_sizes, "--train-sizes");
        cfg.train_sizes.assign(sizes.begin(), sizes.end());
    }
    for (long s : cfg.shot_budgets) require(s >= 1, ErrorCode::InvalidArgument, "--shots entries must be >= 1");
    for (Index n : cfg.train_sizes)
        require(n >= 2 && n <= cfg.train_pool, ErrorCode::InvalidArgument, "--train-sizes must lie in [2, train pool]");
    require(o.weight == 0 || o.weight == 1 || o.weight == 2, ErrorCode::InvalidArgument, "--weight must be 1 or 2");
    require(o.bootstrap == 0 || o.bootstrap >= 100, ErrorCode::InvalidArgument,
            "--bootstrap must be 0 or at least 100");
    std::optional<std::string> want_features, want_scaling;
    if (!o.features.empty()) want_features = to_string(parse_feature_kind(o.features));
    if (!o.scaling.empty()) want_scaling = to_string(parse_scaling(o.scaling));

    run.input(o.data);
    run.snapshot({{"command", "classify"},
                  {"seed", o.seed},
                  {"data", o.data},
                  {"qubits", cfg.n_qubits},
                  {"encoding_layers", cfg.n_encoding_layers},
                  {"layers", cfg.schedule().n_layers()},
                  {"subsample", cfg.subsample},
                  {"train_pool", cfg.train_pool},
                  {"shot_budgets", cfg.shot_budgets},
                  {"train_sizes", cfg.train_sizes},
                  {"ridge_lambda", cfg.ridge_lambda},
                  {"lambda_cutoff", cfg.lambda_cut},
                  {"bootstrap", cfg.bootstrap},
                  {"features", o.features},
                  {"scaling", o.scaling},
                  {"weight", o.weight}});

    const LandsatData d = prepare_landsat(cfg, o.seed);
    std::vector<CellResult> cells;
    for (auto& c : ablation(d, cfg, o.seed)) {
        if (want_features && c.features != *want_features) continue;
        if (want_scaling && c.scaling != *want_scaling) continue;
        if (o.weight && c.weight != o.weight) continue;
        cells.push_back(std::move(c));
    }
    const auto base = baselines(d, cfg, o.seed);
    cells.insert(cells.end(), base.begin(), base.end());
    const auto curve_train = learning_curve_train(d, cfg, o.seed);
    const auto curve_shots = learning_curve_shots(d, cfg, o.seed);

    run.csv("ablation.csv", cell_table("ablation", cells));
    run.csv("learning_train.csv", cell_table("learning_train", curve_train));
    run.csv("learning_shots.csv", cell_table("learning_shots", curve_shots));

    json reports = json::array();
    for (const std::vector<CellResult>* group : {&std::as_const(cells), &curve_train, &curve_shots})
        for (const auto& c : *group) {
            MetricReport r = to_report(c.test);
            r.task = cell_task(c) + "/S" + std::to_string(c.shots) + "/n" + std::to_string(c.n_train);
            if (c.f1_ci) r.ci["f1_macro"] = *c.f1_ci;
            reports.push_back(io::to_json(r));
        }
    run.write_json("metrics.json", {{"schema", "qelm.metricset/1"}, {"reports", reports}});
    run.manifest(o.seed, {{"n_samples", d.data.features.rows()},
                          {"n_test", d.test.size()},
                          {"classes", [&] {
                               auto c = d.data.labels;
                               std::sort(c.begin(), c.end());
                               c.erase(std::unique(c.begin(), c.end()), c.end());
                               return c;
                           }()}});
}

// eigentasks --------------------------------------------------------------

std::vector<double> lambda_grid() {
    std::vector<double> g;
    for (int k = -10; k <= 10; ++k) g.push_back(std::pow(10.0, k / 10.0));
    return g;
}

std::vector<std::vector<int>> subsets_for(int n_qubits, int weight) {
    std::vector<std::vector<int>> s;
    if (weight == 1)
        for (int q = 0; q < n_qubits; ++q) s.push_back({q});
    else
        for (int q = 0; q + 1 < n_qubits; q += 2) s.push_back({q, q + 1});
    return s;
}

std::string subset_label(const std::vector<int>& q) {
    std::string s;
    for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "-" : "") + std::to_string(q[i]);
    return s;
}

void cmd_eigentasks(const EigentaskOpts& o) {
    RunDir run(o.out, "eigentasks");
    const int sources = !o.frequencies.empty() + !o.data.empty();
    require(sources <= 1, ErrorCode::InvalidArgument, "--frequencies and --data are mutually exclusive");
    require(o.weight == 1 || o.weight == 2, ErrorCode::InvalidArgument, "--weight must be 1 or 2");
    require(o.shots >= 2, ErrorCode::InvalidArgument, "--shots must be >= 2");
    require(o.lambda_cut > 0, ErrorCode::InvalidArgument, "--lambda-cutoff must be > 0");
    const std::string source = !o.frequencies.empty() ? "frequencies" : !o.data.empty() ? "landsat" : "narma";

    json snap = {{"command", "eigentasks"}, {"seed", o.seed}, {"source", source}, {"lambda_cutoff", o.lambda_cut},
                 {"lambda_grid", lambda_grid()}};
    EigentaskBasis basis;
    std::string metric_name;
    std::vector<double> metric;
    const auto grid = lambda_grid();

    if (source == "frequencies") {
        run.input(o.frequencies);
        run.snapshot(snap);
        const io::FrequencyTable ft = io::read_frequencies(o.frequencies);
        basis = local_eigentasks(ft.blocks, ft.subsets, ft.shots);
    } else if (source == "narma") {
        const HyperParams hp0 = load_hyper(o.hyper, o.seed, run);
        require(o.qubits >= 2 && o.qubits % 2 == 0, ErrorCode::InvalidArgument, "--qubits must be even and >= 2");
        const int L = o.qubits / 2;
        const int layers = o.layers > 0 ? o.layers : L;
        const double ridge = o.ridge_lambda >= 0 ? o.ridge_lambda : kRegressionLambda;
        snap.update({{"qubits", o.qubits}, {"layers", layers}, {"weight", o.weight}, {"shots", o.shots},
                     {"order", o.order}, {"T_init", o.t_init}, {"T_train", o.t_train}, {"T_test", o.t_test},
                     {"ridge_lambda", ridge}, {"hyper", io::to_json(hp0)}});
        run.snapshot(snap);

        HyperParams hp = hp0;
        hp.seed = derive_seed(o.seed, streams::kCircuit);
        const CircuitSpec spec = sample_circuit(hp, LayerSchedule::brickwork(o.qubits, layers));
        const NarmaSequence seq =
            gen_narma(o.order, o.t_init, o.t_train, o.t_test, L, derive_seed(o.seed, streams::kNarma));
        const WindowedDataset ds = make_windows(seq, L);
        const FrequencyBank bank =
            sample_frequency_banks(spec, single_source(ds.windows), {o.shots}, derive_seed(o.seed, streams::kShots))
                .front();
        std::vector<Index> tr(static_cast<std::size_t>(ds.n_train)), te;
        std::iota(tr.begin(), tr.end(), Index{0});
        for (Index i = ds.n_train; i < bank.rows(); ++i) te.push_back(i);
        const FrequencyBank btr = bank.select(tr), bte = bank.select(te);
        const VectorXd ytr = ds.targets.head(ds.n_train), yte = ds.targets.tail(bank.rows() - ds.n_train);

        basis = *prepare_features(btr, bte, {FeatureKind::Eigentask, o.weight, ScalingMode::Unit}).basis;
        metric_name = "r2_test";
        for (double lam : grid) {
            const auto pf = prepare_features(btr, bte, {FeatureKind::EigentaskCut, o.weight, ScalingMode::NsrAware, lam});
            metric.push_back(r_squared(yte, fit_ridge(pf.train, ytr, ridge).predict(pf.test)));
        }

        io::FrequencyTable ft{subsets_for(o.qubits, o.weight), btr.blocks(o.weight), o.shots};
        io::write_frequencies(run.file("frequencies.csv"), ft);
    } else {
        require(fs::exists(o.data), ErrorCode::Io, "dataset not found: " + o.data);
        run.input(o.data);
        const double ridge = o.ridge_lambda >= 0 ? o.ridge_lambda : kClassificationLambda;
        LandsatConfig cfg = landsat_config(o.data, o.qubits, o.layers, o.subsample, o.train_pool, ridge, o.lambda_cut, 0);
        cfg.shot_budgets = {o.shots};
        snap.update({{"data", o.data}, {"qubits", cfg.n_qubits}, {"encoding_layers", cfg.n_encoding_layers},
                     {"weight", o.weight}, {"shots", o.shots}, {"subsample", cfg.subsample},
                     {"train_pool", cfg.train_pool}, {"ridge_lambda", ridge}});
        run.snapshot(snap);

        const LandsatData d = prepare_landsat(cfg, o.seed);
        const Index pool = static_cast<Index>(d.train_pool.size());
        const auto rows = training_subset(d, pool, o.seed);
        basis = *prepare_features(d.banks.front().select(rows), d.banks.front().select(d.test),
                                  {FeatureKind::Eigentask, o.weight, ScalingMode::Unit})
                     .basis;
        metric_name = "test_f1_macro";
        for (double lam : grid)
            metric.push_back(evaluate_cell(d, {FeatureKind::EigentaskCut, o.weight, ScalingMode::NsrAware, lam},
                                           o.shots, pool, cfg, o.seed)
                                 .test.f1_macro);
    }

    const double S = static_cast<double>(basis.shots);
    io::CsvTable sweep{"lambda_sweep", io::kSchemaVersion, {"lambda", "n_retained", "metric_name", "metric"}, {}};
    io::CsvTable counts{"retained_counts", io::kSchemaVersion, {"lambda", "subset", "n_total", "n_retained"}, {}};
    io::CsvTable curve{"rec_curve", io::kSchemaVersion, {"lambda", "n_total", "n_retained", "c_total", "c_lambda"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double lam = grid[k];
        const RECReport r = rec(basis, S, lam);
        const EigentaskBasis cut = apply_cutoff(basis, S, lam);
        sweep.rows.push_back({io::fmt(lam), std::to_string(r.n_retained), metric_name,
                              metric.empty() ? "" : io::fmt(metric[k])});
        for (std::size_t s = 0; s < basis.subsets.size(); ++s)
            counts.rows.push_back({io::fmt(lam), subset_label(basis.subsets[s].qubits),
                                   std::to_string(basis.subsets[s].beta2.size()),
                                   std::to_string(cut.subsets[s].beta2.size())});
        curve.rows.push_back({io::fmt(lam), std::to_string(r.n_total), std::to_string(r.n_retained),
                              io::fmt(r.c_total), io::fmt(r.c_lambda)});
    }
    run.csv("lambda_sweep.csv", sweep);
    run.csv("retained_counts.csv", counts);
    run.csv("rec_curve.csv", curve);
    run.write_json("eigentasks.json", io::to_json(basis));
    const RECReport at = rec(basis, S, o.lambda_cut);
    run.manifest(o.seed, {{"lambda_cutoff", o.lambda_cut},
                          {"n_total", at.n_total},
                          {"n_retained", at.n_retained},
                          {"c_total", at.c_total},
                          {"c_lambda", at.c_lambda}});
}

// tune / pareto -----------------------------------------------------------

io::CsvTable trial_table(const std::string& kind, const std::vector<TrialRecord>& trials,
                         const std::vector<std::string>& names, const std::vector<int>& ranks) {
    io::CsvTable t{kind, io::kSchemaVersion, {"id", "status", "pareto_rank", "seed", "a_in", "b0", "db", "h0", "dh", "J0", "dJ"}, {}};
    t.header.insert(t.header.end(), names.begin(), names.end());
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& tr = trials[i];
        const auto& hp = tr.hp;
        std::vector<std::string> row{std::to_string(tr.id),
                                     tr.status == TrialStatus::Complete ? "COMPLETE" : "INCOMPLETE",
                                     std::to_string(ranks[i]),
                                     std::to_string(hp.seed),
                                     io::fmt(hp.a_in),
                                     io::fmt(hp.b0),
                                     io::fmt(hp.db),
                                     io::fmt(hp.h0),
                                     io::fmt(hp.dh),
                                     io::fmt(hp.J0),
                                     io::fmt(hp.dJ)};
        for (const auto& n : names) {
            const auto& ev = tr.evaluation;
            const auto it = std::find(ev.names.begin(), ev.names.end(), n);
            row.push_back(it == ev.names.end() ? "" : io::fmt(ev.means[static_cast<std::size_t>(it - ev.names.begin())]));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void cmd_tune(const TuneOpts& o) {
    RunDir run(o.out, "tune");
    TunerConfig cfg;
    cfg.architectures = parse_architectures(o.arch);
    if (!o.objectives.empty()) {
        cfg.objectives.clear();
        for (const auto& n : split_names(o.objectives)) cfg.objectives.push_back(parse_objective(n));
    }
    cfg.n_realizations = o.realizations;
    cfg.noise_sigma = o.noise_sigma;
    cfg.variability_samples = o.variability_samples;
    cfg.bond_windows = o.bond_windows;
    cfg.T_init = o.t_init;
    cfg.T_train = o.t_train;
    cfg.T_test = o.t_test;
    require(o.trials >= 1, ErrorCode::InvalidArgument, "--trials must be >= 1");
    require(o.realizations >= 1, ErrorCode::InvalidArgument, "--realizations must be >= 1");

    json objectives = json::array();
    for (Objective ob : cfg.objectives) objectives.push_back(to_string(ob));
    json archs = json::array();
    for (const auto& a : cfg.architectures) archs.push_back(a.tag());
    const SearchSpace space;
    const json snap = {{"command", "tune"},
                       {"seed", o.seed},
                       {"trials", o.trials},
                       {"realizations", o.realizations},
                       {"architectures", archs},
                       {"objectives", objectives},
                       {"noise_sigma", o.noise_sigma},
                       {"variability_samples", o.variability_samples},
                       {"bond_windows", o.bond_windows},
                       {"T_init", o.t_init},
                       {"T_train", o.t_train},
                       {"T_test", o.t_test},
                       {"bounds",
                        {{"a_in", {space.a_in.lo, space.a_in.hi}},
                         {"b0", {space.b0.lo, space.b0.hi}},
                         {"db", {space.db.lo, space.db.hi}},
                         {"h0", {space.h0.lo, space.h0.hi}},
                         {"dh", {space.dh.lo, space.dh.hi}},
                         {"J0", {space.J0.lo, space.J0.hi}},
                         {"dJ", {space.dJ.lo, space.dJ.hi}}}}};

    const bool has_store = fs::exists(fs::path(o.out) / "trials");
    if (has_store) {
        require(o.resume, ErrorCode::InvalidArgument, o.out + " already holds a trial store; pass --resume");
        const auto snap_path = run.file("config.snapshot");
        if (fs::exists(snap_path)) {
            json old = io::read_json(snap_path);
            json cur = snap;
            old.erase("trials");
            cur.erase("trials");
            require(old == cur, ErrorCode::InvalidArgument, "--resume with a different configuration than " + snap_path);
        }
    }
    run.snapshot(snap);

    const auto trials = run_search(space, o.trials, cfg, o.seed, o.out);
    std::vector<std::string> names = trials.empty() ? std::vector<std::string>{} : trials.front().evaluation.names;
    std::vector<int> ranks;
    std::vector<TrialRecord> front;
    std::vector<int> front_ranks;
    for (const auto& t : trials) {
        ranks.push_back(t.pareto_rank);
        if (t.pareto_rank == 0) {
            front.push_back(t);
            front_ranks.push_back(0);
        }
    }
    run.csv("trials.csv", trial_table("trials", trials, names, ranks));
    run.csv("pareto.csv", trial_table("pareto", front, names, front_ranks));
    run.manifest(o.seed, {{"n_trials", trials.size()}, {"n_front", front.size()}, {"objectives", names}});
}

void cmd_pareto(const ParetoOpts& o) {
    const std::string out = o.out.empty() ? (fs::path(o.store) / "pareto").string() : o.out;
    RunDir run(out, "pareto");
    require(fs::exists(fs::path(o.store) / "trials"), ErrorCode::Io, "no trial store in " + o.store);
    run.snapshot({{"command", "pareto"}, {"store", o.store}, {"objectives", o.objectives}});

    std::vector<TrialRecord> done;
    for (auto& t : load_trials(o.store))
        if (t.status == TrialStatus::Complete) done.push_back(std::move(t));
    require(!done.empty(), ErrorCode::InsufficientData, "no COMPLETE trials in " + o.store);
    const auto& all = done.front().evaluation.names;
    const std::vector<std::string> names = o.objectives.empty() ? all : split_names(o.objectives);
    MatrixXd obj(static_cast<Index>(done.size()), static_cast<Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        for (std::size_t i = 0; i < done.size(); ++i) {
            const auto& ev = done[i].evaluation;
            const auto it = std::find(ev.names.begin(), ev.names.end(), names[j]);
            require(it != ev.names.end(), ErrorCode::InvalidArgument, "unknown objective '" + names[j] + "'");
            obj(static_cast<Index>(i), static_cast<Index>(j)) = ev.means[static_cast<std::size_t>(it - ev.names.begin())];
        }
    }
    const auto ranks = pareto_ranks(obj, objective_directions(names));
    std::vector<TrialRecord> front;
    for (std::size_t i = 0; i < done.size(); ++i)
        if (ranks[i] == 0) front.push_back(done[i]);
    run.csv("pareto_front.csv", trial_table("pareto_front", front, names, std::vector<int>(front.size(), 0)));
    run.manifest(0, {{"n_trials", done.size()}, {"n_front", front.size()}, {"objectives", names}});
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum extreme learning machine workbench", "qelm"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    NarmaOpts no;
    auto* narma = app.add_subcommand("narma", "NARMA-n benchmark: test R^2 against task order");
    narma->add_option("--out", no.out, "Run directory")->required();
    narma->add_option("--seed", no.seed, "Master seed");
    narma->add_option("--qubits", no.qubits, "Number of qubits (window = qubits/2)");
    narma->add_option("--layers", no.layers, "Circuit layers (0: qubits/2)");
    narma->add_option("--max-order", no.max_order, "Largest NARMA order (0: qubits/2)");
    narma->add_option("--shots", no.shots, "Add a shot-sampled variant with this many shots");
    narma->add_option("--noise-sigma", no.noise_sigma, "Add a variant with Gaussian feature noise");
    narma->add_option("--ridge-lambda", no.ridge_lambda, "Ridge penalty");
    narma->add_option("--t-init", no.t_init, "Washout length");
    narma->add_option("--t-train", no.t_train, "Training length");
    narma->add_option("--t-test", no.t_test, "Test length");
    narma->add_option("--hyper", no.hyper, "Hyperparameter JSON (default: reference point)");

    ClassifyOpts co;
    auto* classify = app.add_subcommand("classify", "Landsat readout ablation and learning curves");
    classify->add_option("--out", co.out, "Run directory")->required();
    classify->add_option("--data", co.data, "Landsat file (36 features + label per row)");
    classify->add_option("--seed", co.seed, "Master seed");
    classify->add_option("--qubits", co.qubits, "Number of qubits");
    classify->add_option("--layers", co.layers, "Encoding layers (0: enough to cover the input once)");
    classify->add_option("--shots", co.shots, "Comma-separated shot budgets");
    classify->add_option("--train-sizes", co.train_sizes, "Comma-separated training sizes");
    classify->add_option("--subsample", co.subsample, "Stratified subsample size");
    classify->add_option("--train-pool", co.train_pool, "Training pool size");
    classify->add_option("--bootstrap", co.bootstrap, "Bootstrap replicates (0: no intervals)");
    classify->add_option("--ridge-lambda", co.ridge_lambda, "Ridge penalty");
    classify->add_option("--lambda-cutoff", co.lambda_cut, "NSR cutoff for eigentask-cut cells");
    classify->add_option("--features", co.features, "Only ablation cells of this kind")
        ->check(CLI::IsMember({"x", "pauli", "eigentask", "eigentask-cut"}));
    classify->add_option("--scaling", co.scaling, "Only ablation cells with this scaling")
        ->check(CLI::IsMember({"unit", "signal", "nsr"}));
    classify->add_option("--weight", co.weight, "Only ablation cells of this weight (0: both)");

    EigentaskOpts eo;
    auto* eig = app.add_subcommand("eigentasks", "Eigentask spectrum, NSR cutoff sweep and REC curve");
    eig->add_option("--out", eo.out, "Run directory")->required();
    eig->add_option("--seed", eo.seed, "Master seed");
    eig->add_option("--frequencies", eo.frequencies, "Frequency CSV instead of a simulation");
    eig->add_option("--data", eo.data, "Landsat file: sweep F1 instead of NARMA R^2");
    eig->add_option("--qubits", eo.qubits, "Number of qubits");
    eig->add_option("--layers", eo.layers, "Circuit layers (NARMA) or encoding layers (Landsat); 0: auto");
    eig->add_option("--weight", eo.weight, "Subset weight (1 or 2)");
    eig->add_option("--shots", eo.shots, "Shots per input");
    eig->add_option("--order", eo.order, "NARMA order of the sweep task");
    eig->add_option("--t-init", eo.t_init, "Washout length");
    eig->add_option("--t-train", eo.t_train, "Training length");
    eig->add_option("--t-test", eo.t_test, "Test length");
    eig->add_option("--subsample", eo.subsample, "Landsat subsample size");
    eig->add_option("--train-pool", eo.train_pool, "Landsat training pool size");
    eig->add_option("--lambda-cutoff", eo.lambda_cut, "Cutoff reported in the manifest");
    eig->add_option("--ridge-lambda", eo.ridge_lambda, "Ridge penalty (default depends on the task)");
    eig->add_option("--hyper", eo.hyper, "Hyperparameter JSON (NARMA source)");

    TuneOpts to;
    auto* tune = app.add_subcommand("tune", "Random hyperparameter search with Pareto ranking");
    tune->add_option("--out", to.out, "Run directory / trial store")->required();
    tune->add_option("--seed", to.seed, "Master seed");
    tune->add_option("--trials", to.trials, "Number of trials");
    tune->add_option("--realizations", to.realizations, "Circuit realisations per trial");
    tune->add_option("--arch", to.arch, "Architectures, e.g. 8x4,10x8");
    tune->add_option("--objectives", to.objectives, "Comma-separated objectives (default: all)");
    tune->add_option("--noise-sigma", to.noise_sigma, "Feature noise of the noisy NARMA objective");
    tune->add_option("--variability-samples", to.variability_samples, "Inputs per variability estimate");
    tune->add_option("--bond-windows", to.bond_windows, "Windows per bond-dimension estimate");
    tune->add_option("--t-init", to.t_init, "Washout length");
    tune->add_option("--t-train", to.t_train, "Training length");
    tune->add_option("--t-test", to.t_test, "Test length");
    tune->add_flag("--resume", to.resume, "Continue an existing trial store");

    ParetoOpts po;
    auto* pareto = app.add_subcommand("pareto", "Pareto front of a trial store");
    pareto->add_option("store", po.store, "Trial store directory")->required();
    pareto->add_option("--out", po.out, "Run directory (default: <store>/pareto)");
    pareto->add_option("--objectives", po.objectives, "Project onto these objectives");

    std::vector<const char*> argv{"qelm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUser;
    }

    try {
        if (narma->parsed()) cmd_narma(no);
        else if (classify->parsed()) cmd_classify(co);
        else if (eig->parsed()) cmd_eigentasks(eo);
        else if (tune->parsed()) cmd_tune(to);
        else if (pareto->parsed()) cmd_pareto(po);
        return kExitOk;
    } catch (const Error& e) {
        err << "qelm: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const json::exception& e) {
        err << "qelm: Parse: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        err << "qelm: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace qelm::cli
