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

#include "qelm/tuner.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include "qelm/experiments.hpp"
#include "qelm/io.hpp"
#include "qelm/mps.hpp"
#include "qelm/rng.hpp"
#include "qelm/statevec.hpp"

namespace qelm {

std::string Architecture::tag() const {
    std::string t = std::to_string(n_qubits) + "q" + std::to_string(n_layers) + "l";
    if (initial_state == InitialState::AllZero) t += "-product";
    return t;
}

LayerSchedule Architecture::schedule() const {
    LayerSchedule s = LayerSchedule::brickwork(n_qubits, n_layers);
    s.initial_state = initial_state;
    return s;
}

std::vector<Architecture> parse_architectures(const std::string& s) {
    std::vector<Architecture> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        require(x != std::string::npos, ErrorCode::InvalidArgument, "architecture must look like 8x4, got " + item);
        try {
            out.push_back({std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1))});
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidArgument, "bad architecture '" + item + "'");
        }
        out.back().schedule().validate();
    }
    require(!out.empty(), ErrorCode::InvalidArgument, "no architectures given");
    return out;
}

std::string to_string(Objective o) {
    switch (o) {
        case Objective::NarmaNoiseless: return "narma_noiseless";
        case Objective::NarmaNoisy: return "narma_noisy";
        case Objective::BondDimension: return "bond_dimension";
        case Objective::Variability: return "variability";
    }
    return "";
}

Objective parse_objective(const std::string& s) {
    for (Objective o : kAllObjectives)
        if (to_string(o) == s) return o;
    fail(ErrorCode::InvalidArgument, "unknown objective '" + s + "'");
}

std::uint64_t realization_seed(const HyperParams& hp, int r) {
    return derive_seed(hp.seed, static_cast<std::uint64_t>(r) + 1);
}

namespace {

NarmaConfig narma_config(const HyperParams& hp, const Architecture& arch, double sigma, int r,
                         const TunerConfig& cfg) {
    NarmaConfig nc;
    nc.n_qubits = arch.n_qubits;
    nc.n_layers = arch.n_layers;
    nc.T_init = cfg.T_init;
    nc.T_train = cfg.T_train;
    nc.T_test = cfg.T_test;
    nc.noise_sigma = sigma;
    nc.seed = realization_seed(hp, r);
    return nc;
}

HyperParams with_seed(HyperParams hp, std::uint64_t seed) {
    hp.seed = seed;
    return hp;
}

}  // namespace

double narma_score(const HyperParams& hp, const Architecture& arch, double noise_sigma, int realization,
                   const TunerConfig& cfg) {
    return narma_cumulative_r2(narma_config(hp, arch, noise_sigma, realization, cfg), hp);
}

double variability(const HyperParams& hp, const Architecture& arch, int n_samples, int realization) {
    require(n_samples >= 2, ErrorCode::InvalidArgument, "variability needs at least two samples");
    const std::uint64_t rs = realization_seed(hp, realization);
    const CircuitSpec spec = sample_circuit(with_seed(hp, derive_seed(rs, streams::kCircuit)), arch.schedule());
    Rng rng = make_rng(rs, streams::kVariability);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    MatrixXd U(n_samples, arch.n_qubits / 2);
    for (Index i = 0; i < U.rows(); ++i)
        for (Index k = 0; k < U.cols(); ++k) U(i, k) = unif(rng);
    const MatrixXd F = feature_matrix(spec, U, default_observables(arch.n_qubits));
    // Shifted by the first sample so that identical rows give exactly zero.
    double total = 0.0;
    for (Index j = 1; j < F.cols(); ++j) {
        const VectorXd d = F.col(j).array() - F(0, j);
        const double n = static_cast<double>(n_samples);
        total += (d.squaredNorm() - d.sum() * d.sum() / n) / (n - 1.0);
    }
    return std::max(0.0, total / static_cast<double>(F.cols() - 1));
}

double bond_objective(const HyperParams& hp, const Architecture& arch, int realization, const TunerConfig& cfg) {
    require(cfg.bond_windows >= 1, ErrorCode::InvalidArgument, "need at least one bond window");
    const std::uint64_t rs = realization_seed(hp, realization);
    const CircuitSpec spec = sample_circuit(with_seed(hp, derive_seed(rs, streams::kCircuit)), arch.schedule());
    const int L = arch.n_qubits / 2;
    const NarmaSequence seq = gen_narma(1, cfg.T_init, cfg.T_train, cfg.T_test, L, derive_seed(rs, streams::kNarma));
    const WindowedDataset ds = make_windows(seq, L);
    const Index n = ds.windows.rows();
    std::vector<double> chi;
    for (int w = 0; w < cfg.bond_windows; ++w) {
        const Index row = cfg.bond_windows == 1 ? 0 : w * (n - 1) / (cfg.bond_windows - 1);
        chi.push_back(min_bond_dimension(run_circuit(spec, ds.windows.row(row).transpose())));
    }
    std::sort(chi.begin(), chi.end());
    const std::size_t m = chi.size();
    return m % 2 ? chi[m / 2] : 0.5 * (chi[m / 2 - 1] + chi[m / 2]);
}

Evaluation evaluate_trial(const HyperParams& hp, const TunerConfig& cfg) {
    require(cfg.n_realizations >= 1, ErrorCode::InvalidArgument, "need at least one realization");
    Evaluation ev;
    for (const auto& arch : cfg.architectures) {
        std::map<Objective, std::vector<double>> raw;
        const bool noiseless = std::count(cfg.objectives.begin(), cfg.objectives.end(), Objective::NarmaNoiseless);
        const bool noisy = std::count(cfg.objectives.begin(), cfg.objectives.end(), Objective::NarmaNoisy);
        for (int r = 0; r < cfg.n_realizations; ++r) {
            if (noiseless || noisy) {
                // One feature computation serves both NARMA objectives.
                const auto res = narma_by_order(narma_config(hp, arch, noisy ? cfg.noise_sigma : 0.0, r, cfg), hp);
                double exact = 0.0, perturbed = 0.0;
                for (const auto& o : res) (o.variant == "exact" ? exact : perturbed) += o.r2_test;
                if (noiseless) raw[Objective::NarmaNoiseless].push_back(exact);
                if (noisy) raw[Objective::NarmaNoisy].push_back(perturbed);
            }
            for (Objective o : cfg.objectives) {
                if (o == Objective::BondDimension) raw[o].push_back(bond_objective(hp, arch, r, cfg));
                if (o == Objective::Variability) raw[o].push_back(variability(hp, arch, cfg.variability_samples, r));
            }
        }
        for (Objective o : cfg.objectives) {
            const auto& v = raw[o];
            double mean = 0.0;
            for (double x : v) mean += x;
            ev.names.push_back(to_string(o) + "@" + arch.tag());
            ev.means.push_back(mean / static_cast<double>(v.size()));
            ev.raw.push_back(v);
        }
    }
    return ev;
}

void SearchSpace::validate() const {
    for (const Bounds* b : {&a_in, &b0, &db, &h0, &dh, &J0, &dJ})
        require(std::isfinite(b->lo) && std::isfinite(b->hi) && b->lo <= b->hi, ErrorCode::InvalidArgument,
                "search bounds must be finite with lo <= hi");
    require(h0.lo >= kMinH0 && h0.hi > kMinH0, ErrorCode::InvalidArgument, "h0 lower bound must be >= 0.1");
    require(db.lo >= 0 && dh.lo >= 0 && dJ.lo >= 0, ErrorCode::InvalidArgument, "standard deviations must be >= 0");
}

HyperParams SearchSpace::sample(std::uint64_t seed) const {
    validate();
    Rng rng(seed);
    auto draw = [&](const Bounds& b) { return std::uniform_real_distribution<double>(b.lo, b.hi)(rng); };
    HyperParams hp;
    hp.a_in = draw(a_in);
    hp.b0 = draw(b0);
    hp.db = draw(db);
    do {
        hp.h0 = draw(h0);
    } while (hp.h0 <= kMinH0);
    hp.dh = draw(dh);
    hp.J0 = draw(J0);
    hp.dJ = draw(dJ);
    hp.seed = derive_seed(seed, streams::kCircuit);
    return hp;
}

std::vector<int> pareto_ranks(const MatrixXd& objectives, const std::vector<bool>& maximize) {
    require(static_cast<Index>(maximize.size()) == objectives.cols(), ErrorCode::DimensionMismatch,
            "one direction per objective required");
    require(objectives.allFinite(), ErrorCode::NonFinite, "objectives must be finite");
    const Index n = objectives.rows(), m = objectives.cols();
    auto better_eq = [&](Index a, Index b, Index j) {
        return maximize[static_cast<std::size_t>(j)] ? objectives(a, j) >= objectives(b, j)
                                                     : objectives(a, j) <= objectives(b, j);
    };
    auto dominates = [&](Index a, Index b) {
        bool strict = false;
        for (Index j = 0; j < m; ++j) {
            if (!better_eq(a, b, j)) return false;
            if (objectives(a, j) != objectives(b, j)) strict = true;
        }
        return strict;
    };
    std::vector<int> rank(static_cast<std::size_t>(n), -1);
    Index assigned = 0;
    for (int r = 0; assigned < n; ++r) {
        std::vector<Index> layer;
        for (Index a = 0; a < n; ++a) {
            if (rank[static_cast<std::size_t>(a)] >= 0) continue;
            bool dominated = false;
            for (Index b = 0; b < n && !dominated; ++b)
                if (b != a && rank[static_cast<std::size_t>(b)] < 0 && dominates(b, a)) dominated = true;
            if (!dominated) layer.push_back(a);
        }
        for (Index a : layer) rank[static_cast<std::size_t>(a)] = r;
        assigned += static_cast<Index>(layer.size());
    }
    return rank;
}

std::vector<Index> pareto_front(const MatrixXd& objectives, const std::vector<bool>& maximize) {
    const auto r = pareto_ranks(objectives, maximize);
    std::vector<Index> out;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] == 0) out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<bool> objective_directions(const std::vector<std::string>& names) {
    return std::vector<bool>(names.size(), true);
}

namespace {

std::string trial_file(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "trial_%05d.json", id);
    return buf;
}

void write_trial(const std::string& dir, const TrialRecord& t) {
    io::write_json((std::filesystem::path(dir) / "trials" / trial_file(t.id)).string(), io::to_json(t));
}

void write_index(const std::string& dir, const std::vector<TrialRecord>& trials) {
    io::json list = io::json::array();
    for (const auto& t : trials)
        list.push_back({{"id", t.id},
                        {"file", "trials/" + trial_file(t.id)},
                        {"status", t.status == TrialStatus::Complete ? "COMPLETE" : "INCOMPLETE"},
                        {"pareto_rank", t.pareto_rank}});
    io::write_json((std::filesystem::path(dir) / "index.json").string(),
                   {{"schema", "qelm.trialindex/1"}, {"trials", list}});
}

}  // namespace

std::vector<TrialRecord> load_trials(const std::string& dir) {
    std::vector<TrialRecord> out;
    const auto tdir = std::filesystem::path(dir) / "trials";
    if (!std::filesystem::exists(tdir)) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(tdir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(io::trial_from_json(io::read_json(f.string())));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

void assign_pareto_ranks(std::vector<TrialRecord>& trials) {
    std::vector<std::size_t> done;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        trials[i].pareto_rank = -1;
        if (trials[i].status == TrialStatus::Complete) done.push_back(i);
    }
    if (done.empty()) return;
    const auto& names = trials[done.front()].evaluation.names;
    MatrixXd obj(static_cast<Index>(done.size()), static_cast<Index>(names.size()));
    for (std::size_t k = 0; k < done.size(); ++k) {
        const auto& ev = trials[done[k]].evaluation;
        require(ev.names == names, ErrorCode::DimensionMismatch, "trials disagree on objectives");
        for (std::size_t j = 0; j < names.size(); ++j) obj(static_cast<Index>(k), static_cast<Index>(j)) = ev.means[j];
    }
    const auto r = pareto_ranks(obj, objective_directions(names));
    for (std::size_t k = 0; k < done.size(); ++k) trials[done[k]].pareto_rank = r[k];
}

std::vector<TrialRecord> run_search(const SearchSpace& space, int n_trials, const TunerConfig& cfg,
                                    std::uint64_t seed, const std::string& dir, std::optional<int> stop_after) {
    require(n_trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
    space.validate();
    std::map<int, TrialRecord> existing;
    for (auto& t : load_trials(dir)) existing.emplace(t.id, std::move(t));

    std::vector<TrialRecord> trials;
    int evaluated = 0;
    for (int id = 0; id < n_trials; ++id) {
        const HyperParams hp = space.sample(derive_seed(seed, streams::kTrial + static_cast<std::uint64_t>(id) * 0x100));
        const auto it = existing.find(id);
        if (it != existing.end() && it->second.status == TrialStatus::Complete) {
            require(it->second.hp == hp, ErrorCode::InvalidArgument,
                    "trial store in " + dir + " was produced by another seed or search space");
            trials.push_back(it->second);
            continue;
        }
        if (stop_after && evaluated >= *stop_after) break;
        TrialRecord t;
        t.id = id;
        t.hp = hp;
        t.n_realizations = cfg.n_realizations;
        write_trial(dir, t);
        t.evaluation = evaluate_trial(hp, cfg);
        t.status = TrialStatus::Complete;
        write_trial(dir, t);
        trials.push_back(std::move(t));
        ++evaluated;
    }
    assign_pareto_ranks(trials);
    for (const auto& t : trials) write_trial(dir, t);
    write_index(dir, trials);
    return trials;
}

}  // namespace qelm
