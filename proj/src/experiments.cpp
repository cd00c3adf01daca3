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

#include "qelm/experiments.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <span>
#include <tuple>

#include "qelm/measurement.hpp"
#include "qelm/parallel.hpp"
#include "qelm/rng.hpp"

namespace qelm {

FeatureKind parse_feature_kind(const std::string& s) {
    if (s == "x") return FeatureKind::X;
    if (s == "pauli") return FeatureKind::Pauli;
    if (s == "eigentask") return FeatureKind::Eigentask;
    if (s == "eigentask-cut") return FeatureKind::EigentaskCut;
    fail(ErrorCode::InvalidArgument, "unknown feature set '" + s + "' (expected x|pauli|eigentask|eigentask-cut)");
}

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::X: return "x";
        case FeatureKind::Pauli: return "pauli";
        case FeatureKind::Eigentask: return "eigentask";
        case FeatureKind::EigentaskCut: return "eigentask-cut";
    }
    return "x";
}

FrequencyBank FrequencyBank::select(const std::vector<Index>& rows) const {
    FrequencyBank out;
    out.n_qubits = n_qubits;
    out.shots = shots;
    auto pick = [&](const MatrixXd& M) {
        MatrixXd R(static_cast<Index>(rows.size()), M.cols());
        for (std::size_t i = 0; i < rows.size(); ++i) R.row(static_cast<Index>(i)) = M.row(rows[i]);
        return R;
    };
    for (const auto& M : singles) out.singles.push_back(pick(M));
    for (const auto& M : pairs) out.pairs.push_back(pick(M));
    return out;
}

std::vector<SampleInput> single_source(const MatrixXd& inputs) {
    std::vector<SampleInput> out(static_cast<std::size_t>(inputs.rows()));
    for (Index i = 0; i < inputs.rows(); ++i) out[static_cast<std::size_t>(i)] = {inputs.row(i).transpose()};
    return out;
}

StateVector simulate(const CircuitSpec& spec, const SampleInput& input) {
    const BoundCircuit bound = bind_inputs(spec, std::span<const VectorXd>(input.data(), input.size()));
    return apply_circuit(initial_state(bound), bound);
}

namespace {

FrequencyBank empty_bank(int N, Index T, long shots) {
    FrequencyBank b;
    b.n_qubits = N;
    b.shots = shots;
    b.singles.assign(static_cast<std::size_t>(N), MatrixXd::Zero(T, 6));
    b.pairs.assign(static_cast<std::size_t>(N / 2), MatrixXd::Zero(T, 36));
    return b;
}

}  // namespace

std::vector<FrequencyBank> sample_frequency_banks(const CircuitSpec& spec, const std::vector<SampleInput>& inputs,
                                                  const std::vector<long>& budgets, std::uint64_t seed) {
    require(!budgets.empty(), ErrorCode::InvalidArgument, "no shot budgets");
    const long S = *std::max_element(budgets.begin(), budgets.end());
    require(*std::min_element(budgets.begin(), budgets.end()) >= 2, ErrorCode::InvalidArgument,
            "shot budgets must be >= 2");
    const int N = spec.n_qubits();
    const Index T = static_cast<Index>(inputs.size());
    std::vector<FrequencyBank> banks;
    for (long b : budgets) banks.push_back(empty_bank(N, T, b));
    const auto singles = single_subsets(N);
    const auto pairs = pair_subsets(N);

    parallel_for(inputs.size(), [&](std::size_t i) {
        const StateVector psi = simulate(spec, inputs[i]);
        const ShotRecord rec = sample_shots(psi, S, derive_seed(seed, i));
        for (std::size_t k = 0; k < budgets.size(); ++k) {
            const auto n = static_cast<std::size_t>(budgets[k]);
            const auto fs = local_frequencies(rec, singles, n);
            const auto fp = local_frequencies(rec, pairs, n);
            for (std::size_t q = 0; q < fs.size(); ++q) banks[k].singles[q].row(static_cast<Index>(i)) = fs[q].freq;
            for (std::size_t q = 0; q < fp.size(); ++q) banks[k].pairs[q].row(static_cast<Index>(i)) = fp[q].freq;
        }
    });
    return banks;
}

FrequencyBank exact_frequency_bank(const CircuitSpec& spec, const std::vector<SampleInput>& inputs) {
    const int N = spec.n_qubits();
    FrequencyBank bank = empty_bank(N, static_cast<Index>(inputs.size()), 0);
    const auto singles = single_subsets(N);
    const auto pairs = pair_subsets(N);
    parallel_for(inputs.size(), [&](std::size_t i) {
        const StateVector psi = simulate(spec, inputs[i]);
        for (std::size_t q = 0; q < singles.size(); ++q)
            bank.singles[q].row(static_cast<Index>(i)) = local_probabilities(psi, singles[q]);
        for (std::size_t q = 0; q < pairs.size(); ++q)
            bank.pairs[q].row(static_cast<Index>(i)) = local_probabilities(psi, pairs[q]);
    });
    return bank;
}

namespace {

// 3 * (f[b+] - f[b-]) on a single-qubit block.
VectorXd single_shadow(const MatrixXd& F, int basis) {
    return 3.0 * (F.col(2 * basis) - F.col(2 * basis + 1));
}

VectorXd pair_shadow(const MatrixXd& F, int b0, int b1) {
    VectorXd v = VectorXd::Zero(F.rows());
    for (int o0 = 0; o0 < 2; ++o0)
        for (int o1 = 0; o1 < 2; ++o1) {
            const double sign = (o0 ^ o1) ? -1.0 : 1.0;
            v += sign * F.col((2 * b0 + o0) * 6 + 2 * b1 + o1);
        }
    return 9.0 * v;
}

std::vector<int> shadow_bases(FeatureKind kind) {
    require(kind == FeatureKind::X || kind == FeatureKind::Pauli, ErrorCode::InvalidArgument,
            "shadow features are x or pauli");
    return kind == FeatureKind::X ? std::vector<int>{0} : std::vector<int>{0, 1, 2};
}

}  // namespace

MatrixXd shadow_features(const FrequencyBank& bank, FeatureKind kind, int weight) {
    require(weight == 1 || weight == 2, ErrorCode::InvalidArgument, "weight must be 1 or 2");
    const auto bases = shadow_bases(kind);
    std::vector<VectorXd> cols;
    for (const auto& F : bank.singles)
        for (int b : bases) cols.push_back(single_shadow(F, b));
    if (weight == 2)
        for (const auto& F : bank.pairs)
            for (int b0 : bases)
                for (int b1 : bases) cols.push_back(pair_shadow(F, b0, b1));
    MatrixXd out(bank.rows(), static_cast<Index>(cols.size()) + 1);
    out.col(0).setOnes();
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k) + 1) = cols[k];
    return out;
}

std::vector<std::string> shadow_feature_names(int n_qubits, FeatureKind kind, int weight) {
    const auto bases = shadow_bases(kind);
    std::vector<std::string> names{"bias"};
    for (int q = 0; q < n_qubits; ++q)
        for (int b : bases) names.push_back(std::string(1, "XYZ"[b]) + "@" + std::to_string(q));
    if (weight == 2)
        for (int q = 0; q + 1 < n_qubits; q += 2)
            for (int b0 : bases)
                for (int b1 : bases)
                    names.push_back(std::string{"XYZ"[b0], "XYZ"[b1]} + "@" + std::to_string(q) + "-" +
                                    std::to_string(q + 1));
    return names;
}

PreparedFeatures prepare_features(const FrequencyBank& train, const FrequencyBank& test, const FeaturePipeline& p) {
    PreparedFeatures out;
    MatrixXd raw_train, raw_test;
    VectorXd beta2;
    if (p.kind == FeatureKind::X || p.kind == FeatureKind::Pauli) {
        require(p.scaling != ScalingMode::NsrAware, ErrorCode::InvalidArgument,
                "NSR scaling needs eigentask features");
        raw_train = shadow_features(train, p.kind, p.weight);
        raw_test = shadow_features(test, p.kind, p.weight);
    } else {
        const auto subsets = p.weight == 1 ? single_subsets(train.n_qubits) : pair_subsets(train.n_qubits);
        std::vector<VGEstimate> est;
        for (const auto& F : train.blocks(p.weight))
            est.push_back(train.shots > 0 ? estimate_VG(F, train.shots) : estimate_VG_exact(F));
        EigentaskBasis basis = local_eigentasks(est, subsets);
        if (p.kind == FeatureKind::EigentaskCut) {
            require(train.shots > 0, ErrorCode::InvalidArgument, "NSR cutoff needs a finite shot budget");
            basis = apply_cutoff(basis, static_cast<double>(train.shots), p.lambda_cut);
        }
        raw_train = eigentask_features(train.blocks(p.weight), basis);
        raw_test = eigentask_features(test.blocks(p.weight), basis);
        beta2 = basis.all_beta2();
        out.basis = std::move(basis);
    }
    out.scaler = FeatureScaler::fit(raw_train, p.scaling, beta2);
    out.train = out.scaler.transform(raw_train);
    out.test = out.scaler.transform(raw_test);
    return out;
}

// NARMA -------------------------------------------------------------------

std::vector<int> NarmaConfig::resolved_orders() const {
    if (!orders.empty()) return orders;
    std::vector<int> o(static_cast<std::size_t>(window()));
    std::iota(o.begin(), o.end(), 1);
    return o;
}

namespace {

struct NarmaRealisation {
    std::vector<NarmaSequence> seqs;
    WindowedDataset windows;
    CircuitSpec spec;
    MatrixXd exact;
};

NarmaRealisation narma_realisation(const NarmaConfig& cfg, const HyperParams& hp) {
    HyperParams h = hp;
    h.seed = derive_seed(cfg.seed, streams::kCircuit);
    const auto orders = cfg.resolved_orders();
    auto seqs = gen_narma_orders(orders, cfg.T_init, cfg.T_train, cfg.T_test, cfg.window(),
                                 derive_seed(cfg.seed, streams::kNarma));
    WindowedDataset ds = make_windows(seqs.front(), cfg.window());
    CircuitSpec spec = sample_circuit(h, LayerSchedule::brickwork(cfg.n_qubits, cfg.layers()));
    MatrixXd F = feature_matrix(spec, ds.windows, default_observables(cfg.n_qubits));
    return {std::move(seqs), std::move(ds), std::move(spec), std::move(F)};
}

NarmaOrderResult fit_order(const MatrixXd& F, const VectorXd& y, Index n_train, double lambda, int n,
                           const std::string& variant) {
    const Index n_test = F.rows() - n_train;
    const RidgeModel m = fit_ridge(F.topRows(n_train), y.head(n_train), lambda);
    NarmaOrderResult r;
    r.n = n;
    r.variant = variant;
    r.r2_train = r_squared(y.head(n_train), m.predict(F.topRows(n_train)));
    r.r2_test = r_squared(y.tail(n_test), m.predict(F.bottomRows(n_test)));
    return r;
}

MatrixXd shot_features(const CircuitSpec& spec, const MatrixXd& windows, long shots, std::uint64_t seed) {
    const auto obs = default_observables(spec.n_qubits());
    MatrixXd F(windows.rows(), static_cast<Index>(obs.size()) + 1);
    parallel_for(static_cast<std::size_t>(windows.rows()), [&](std::size_t i) {
        const auto idx = static_cast<Index>(i);
        const StateVector psi = run_circuit(spec, windows.row(idx).transpose());
        const ShotRecord rec = sample_shots(psi, shots, derive_seed(seed, i));
        F(idx, 0) = 1.0;
        for (std::size_t k = 0; k < obs.size(); ++k) F(idx, static_cast<Index>(k) + 1) = shadow_estimate(rec, obs[k]);
    });
    return F;
}

}  // namespace

std::vector<NarmaOrderResult> narma_by_order(const NarmaConfig& cfg, const HyperParams& hp) {
    const NarmaRealisation r = narma_realisation(cfg, hp);
    std::vector<std::pair<std::string, MatrixXd>> variants{{"exact", r.exact}};
    if (cfg.noise_sigma > 0)
        variants.emplace_back("noisy",
                              gaussian_noise_features(r.exact, cfg.noise_sigma, derive_seed(cfg.seed, streams::kNoise)));
    if (cfg.shots > 0)
        variants.emplace_back("shots",
                              shot_features(r.spec, r.windows.windows, cfg.shots, derive_seed(cfg.seed, streams::kShots)));
    std::vector<NarmaOrderResult> out;
    for (const auto& [name, F] : variants)
        for (const auto& seq : r.seqs)
            out.push_back(fit_order(F, seq.y.segment(r.windows.end_index.front(), r.windows.windows.rows()),
                                    r.windows.n_train, cfg.ridge_lambda, seq.order, name));
    return out;
}

double narma_cumulative_r2(const NarmaConfig& cfg, const HyperParams& hp) {
    NarmaConfig c = cfg;
    c.orders.clear();
    c.shots = 0;
    const NarmaRealisation r = narma_realisation(c, hp);
    const MatrixXd F = cfg.noise_sigma > 0
                           ? gaussian_noise_features(r.exact, cfg.noise_sigma, derive_seed(cfg.seed, streams::kNoise))
                           : r.exact;
    double total = 0.0;
    for (const auto& seq : r.seqs)
        total += fit_order(F, seq.y.segment(r.windows.end_index.front(), r.windows.windows.rows()),
                           r.windows.n_train, cfg.ridge_lambda, seq.order, "")
                     .r2_test;
    return total;
}

// Landsat -----------------------------------------------------------------

LayerSchedule LandsatConfig::schedule() const {
    return LayerSchedule::brickwork(n_qubits, 4 * n_encoding_layers, 1, 3, n_qubits / 2);
}

long LandsatConfig::max_shots() const { return *std::max_element(shot_budgets.begin(), shot_budgets.end()); }

LandsatData prepare_landsat(const LandsatConfig& cfg, std::uint64_t seed) {
    require(cfg.train_pool < cfg.subsample, ErrorCode::InvalidArgument, "training pool must leave a test set");
    LandsatData d{.data = load_landsat(cfg.data_path, cfg.subsample, derive_seed(seed, streams::kSplit)),
                  .train_pool = {},
                  .test = {},
                  .scaled = {},
                  .spec = sample_circuit(HyperParams::reference(derive_seed(seed, streams::kCircuit)),
                                         cfg.schedule()),
                  .budgets = cfg.shot_budgets,
                  .banks = {}};
    std::tie(d.train_pool, d.test) =
        stratified_split(d.data.labels, cfg.train_pool, derive_seed(seed, streams::kSplit + 1));
    const MinMaxScaler mm = MinMaxScaler::fit(d.data.select(d.train_pool).features);
    d.scaled = mm.transform(d.data.features);
    const auto inputs = single_source(build_classification_inputs(d.scaled));
    d.banks = sample_frequency_banks(d.spec, inputs, cfg.shot_budgets, derive_seed(seed, streams::kShots));
    return d;
}

std::vector<Index> training_subset(const LandsatData& d, Index n_train, std::uint64_t seed) {
    require(n_train >= 2 && n_train <= static_cast<Index>(d.train_pool.size()), ErrorCode::InvalidArgument,
            "training size must be within the training pool");
    std::vector<Index> perm = d.train_pool;
    Rng rng = make_rng(seed, streams::kSplit + 2);
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(static_cast<std::size_t>(n_train));
    std::sort(perm.begin(), perm.end());
    return perm;
}

namespace {

std::vector<int> labels_of(const LandsatData& d, const std::vector<Index>& rows) {
    std::vector<int> out;
    for (Index r : rows) out.push_back(d.data.labels[static_cast<std::size_t>(r)]);
    return out;
}

std::size_t budget_index(const LandsatData& d, long budget) {
    const auto it = std::find(d.budgets.begin(), d.budgets.end(), budget);
    require(it != d.budgets.end(), ErrorCode::InvalidArgument, "shot budget " + std::to_string(budget) + " not sampled");
    return static_cast<std::size_t>(it - d.budgets.begin());
}

MatrixXd take_rows(const MatrixXd& M, const std::vector<Index>& rows) {
    MatrixXd R(static_cast<Index>(rows.size()), M.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) R.row(static_cast<Index>(i)) = M.row(rows[i]);
    return R;
}

FrequencyBank resample_shots(const FrequencyBank& b, Rng& rng) {
    FrequencyBank out = b;
    for (auto* blocks : {&out.singles, &out.pairs})
        for (auto& F : *blocks)
            for (Index i = 0; i < F.rows(); ++i) F.row(i) = sample_frequencies(F.row(i).transpose(), b.shots, rng);
    return out;
}

CellResult fit_and_score(const MatrixXd& Rtr, const std::vector<int>& ytr, const MatrixXd& Rte,
                         const std::vector<int>& yte, double lambda) {
    const RidgeModel m = fit_classifier(Rtr, ytr, lambda);
    CellResult c;
    c.n_features = Rtr.cols() - 1;
    c.train = classification_metrics(ytr, m.predict_labels(Rtr));
    c.test = classification_metrics(yte, m.predict_labels(Rte));
    return c;
}

}  // namespace

CellResult evaluate_cell(const LandsatData& d, const FeaturePipeline& p, long budget, Index n_train,
                         const LandsatConfig& cfg, std::uint64_t seed, ResampleAxis axis) {
    const FrequencyBank& bank = d.banks[budget_index(d, budget)];
    const auto train_rows = training_subset(d, n_train, seed);
    const FrequencyBank btr = bank.select(train_rows);
    const FrequencyBank bte = bank.select(d.test);
    const auto ytr = labels_of(d, train_rows);
    const auto yte = labels_of(d, d.test);

    const PreparedFeatures pf = prepare_features(btr, bte, p);
    CellResult c = fit_and_score(pf.train, ytr, pf.test, yte, cfg.ridge_lambda);
    c.features = to_string(p.kind);
    c.scaling = to_string(p.scaling);
    c.weight = p.weight;
    c.shots = budget;
    c.n_train = n_train;

    if (cfg.bootstrap > 0) {
        const std::uint64_t bseed = derive_seed(seed, streams::kBootstrap);
        if (axis == ResampleAxis::TrainSet) {
            c.f1_ci = bootstrap_ci(
                [&](Rng& rng) {
                    const auto idx = resample_indices(pf.train.rows(), rng);
                    std::vector<int> yb;
                    for (Index i : idx) yb.push_back(ytr[static_cast<std::size_t>(i)]);
                    if (std::set<int>(yb.begin(), yb.end()).size() < 2) return c.test.f1_macro;
                    return fit_and_score(take_rows(pf.train, idx), yb, pf.test, yte, cfg.ridge_lambda).test.f1_macro;
                },
                cfg.bootstrap, bseed);
        } else {
            c.f1_ci = bootstrap_ci(
                [&](Rng& rng) {
                    const PreparedFeatures q = prepare_features(resample_shots(btr, rng), resample_shots(bte, rng), p);
                    return fit_and_score(q.train, ytr, q.test, yte, cfg.ridge_lambda).test.f1_macro;
                },
                cfg.bootstrap, bseed);
        }
    }
    return c;
}

std::vector<CellResult> ablation(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed) {
    std::vector<CellResult> out;
    const auto n_train = static_cast<Index>(d.train_pool.size());
    for (FeatureKind k : {FeatureKind::X, FeatureKind::Pauli, FeatureKind::Eigentask, FeatureKind::EigentaskCut})
        for (bool scaled : {false, true})
            for (int w : {1, 2}) {
                const bool et = k == FeatureKind::Eigentask || k == FeatureKind::EigentaskCut;
                FeaturePipeline p{.kind = k,
                                  .weight = w,
                                  .scaling = !scaled ? ScalingMode::Unit
                                                     : (et ? ScalingMode::NsrAware : ScalingMode::Signal),
                                  .lambda_cut = cfg.lambda_cut};
                out.push_back(evaluate_cell(d, p, cfg.max_shots(), n_train, cfg, seed));
            }
    return out;
}

std::vector<CellResult> baselines(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed) {
    const auto n_train = static_cast<Index>(d.train_pool.size());
    const auto train_rows = training_subset(d, n_train, seed);
    const auto ytr = labels_of(d, train_rows);
    const auto yte = labels_of(d, d.test);

    CellResult maj;
    maj.features = "majority";
    maj.scaling = "none";
    maj.n_train = n_train;
    const int m = majority_class(ytr);
    maj.train = classification_metrics(ytr, std::vector<int>(ytr.size(), m));
    maj.test = classification_metrics(yte, std::vector<int>(yte.size(), m));

    MatrixXd raw(d.scaled.rows(), d.scaled.cols() + 1);
    raw << VectorXd::Ones(d.scaled.rows()), d.scaled;
    CellResult ridge = fit_and_score(take_rows(raw, train_rows), ytr, take_rows(raw, d.test), yte, cfg.ridge_lambda);
    ridge.features = "ridge_raw";
    ridge.scaling = "minmax";
    ridge.n_train = n_train;
    return {maj, ridge};
}

std::vector<CellResult> learning_curve_train(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed) {
    std::vector<CellResult> out;
    const FeaturePipeline p{.kind = FeatureKind::Pauli, .weight = 1, .scaling = ScalingMode::Unit};
    for (Index n : cfg.train_sizes) out.push_back(evaluate_cell(d, p, cfg.max_shots(), n, cfg, seed));
    return out;
}

std::vector<CellResult> learning_curve_shots(const LandsatData& d, const LandsatConfig& cfg, std::uint64_t seed) {
    std::vector<CellResult> out;
    const FeaturePipeline p{.kind = FeatureKind::Pauli, .weight = 1, .scaling = ScalingMode::Unit};
    for (long s : cfg.shot_budgets)
        out.push_back(evaluate_cell(d, p, s, static_cast<Index>(d.train_pool.size()), cfg, seed, ResampleAxis::Shots));
    return out;
}

}  // namespace qelm
