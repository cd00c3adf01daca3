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

#include "qelm/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "qelm/rng.hpp"

namespace qelm {

namespace {

double narma_step(const VectorXd& u, const VectorXd& y, Index t, int n) {
    auto Y = [&](Index i) { return i >= 0 ? y(i) : 0.0; };
    auto U = [&](Index i) { return i >= 0 ? u(i) : 0.0; };
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += Y(t - 1 - i);
    return 0.2 * Y(t - 1) + 0.04 * sum + 1.5 * U(t - (n - 1)) * U(t) + 0.001;
}

}  // namespace

VectorXd narma_targets(const VectorXd& u, int order) {
    require(order >= 1, ErrorCode::InvalidArgument, "NARMA order must be >= 1");
    VectorXd y = VectorXd::Zero(u.size());
    for (Index t = 0; t < u.size(); ++t) y(t) = narma_step(u, y, t, order);
    return y;
}

double narma_residual(const NarmaSequence& seq) {
    double worst = 0.0;
    for (Index t = 0; t < seq.y.size(); ++t)
        worst = std::max(worst, std::abs(seq.y(t) - narma_step(seq.u, seq.y, t, seq.order)));
    return worst;
}

NarmaSequence gen_narma(int order, int T_init, int T_train, int T_test, int L, std::uint64_t seed) {
    require(order >= 1, ErrorCode::InvalidArgument, "NARMA order must be >= 1");
    require(T_init >= 0 && T_train >= 1 && T_test >= 0 && L >= 1, ErrorCode::InvalidArgument,
            "NARMA lengths must be positive");
    NarmaSequence seq;
    seq.order = order;
    seq.T_init = T_init;
    seq.T_train = T_train;
    seq.T_test = T_test;
    seq.L = L;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        seq.seed = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
        seq.regenerations = attempt;
        Rng rng(seq.seed);
        std::uniform_real_distribution<double> unif(0.0, 0.5);
        seq.u.resize(seq.total_length());
        for (Index t = 0; t < seq.u.size(); ++t) seq.u(t) = unif(rng);
        seq.y = narma_targets(seq.u, order);
        if (seq.y.cwiseAbs().maxCoeff() <= kNarmaDivergence) return seq;
    }
    fail(ErrorCode::Degenerate, "NARMA-" + std::to_string(order) + " diverged for every regenerated seed");
}

std::vector<NarmaSequence> gen_narma_orders(const std::vector<int>& orders, int T_init, int T_train, int T_test,
                                            int L, std::uint64_t seed) {
    require(!orders.empty(), ErrorCode::InvalidArgument, "no NARMA orders requested");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
        NarmaSequence base = gen_narma(orders.front(), T_init, T_train, T_test, L, s);
        if (base.regenerations != 0) continue;
        std::vector<NarmaSequence> out;
        bool ok = true;
        for (int n : orders) {
            NarmaSequence seq = base;
            seq.order = n;
            seq.regenerations = attempt;
            seq.y = narma_targets(seq.u, n);
            if (seq.y.cwiseAbs().maxCoeff() > kNarmaDivergence) {
                ok = false;
                break;
            }
            out.push_back(std::move(seq));
        }
        if (ok) return out;
    }
    fail(ErrorCode::Degenerate, "NARMA family diverged for every regenerated seed");
}

MatrixXd rolling_windows(const VectorXd& series, int L, Index first_end, Index count) {
    require(L >= 1, ErrorCode::InvalidArgument, "window length must be >= 1");
    require(first_end - (L - 1) >= 0 && first_end + count <= series.size(), ErrorCode::InsufficientData,
            "series too short for the requested windows");
    MatrixXd W(count, L);
    for (Index j = 0; j < count; ++j)
        for (int k = 0; k < L; ++k) W(j, k) = series(first_end + j - k);
    return W;
}

WindowedDataset make_windows(const NarmaSequence& seq, int L) {
    const Index count = seq.T_train + seq.T_test;
    const Index first_end = seq.T_init + (L - 1);
    require(first_end + count <= seq.u.size(), ErrorCode::InsufficientData,
            "sequence too short for window length " + std::to_string(L));
    WindowedDataset ds;
    ds.windows = rolling_windows(seq.transformed(), L, first_end, count);
    ds.targets = seq.y.segment(first_end, count);
    ds.end_index.resize(static_cast<std::size_t>(count));
    std::iota(ds.end_index.begin(), ds.end_index.end(), first_end);
    ds.n_train = seq.T_train;
    ds.L = L;
    ds.memory_boundary = L;
    return ds;
}

TabularDataset TabularDataset::select(const std::vector<Index>& rows) const {
    TabularDataset out;
    out.features.resize(static_cast<Index>(rows.size()), features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Index>(i)) = features.row(rows[i]);
        out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
        out.source_rows.push_back(source_rows[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

TabularDataset read_landsat(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open " + path);
    std::vector<std::vector<double>> rows;
    TabularDataset ds;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::vector<double> vals;
        std::string tok;
        while (ss >> tok) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
        }
        require(vals.size() == kLandsatFeatures + 1, ErrorCode::Parse,
                path + ":" + std::to_string(lineno) + ": expected 37 columns, got " + std::to_string(vals.size()));
        const double lab = vals.back();
        require(lab == std::floor(lab), ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": non-integer label");
        vals.pop_back();
        rows.push_back(std::move(vals));
        ds.labels.push_back(static_cast<int>(lab));
        ds.source_rows.push_back(static_cast<Index>(rows.size() - 1));
    }
    require(!rows.empty(), ErrorCode::Parse, path + ": no data rows");
    ds.features.resize(static_cast<Index>(rows.size()), kLandsatFeatures);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k < kLandsatFeatures; ++k) ds.features(static_cast<Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    return ds;
}

std::vector<Index> stratified_sample(const std::vector<int>& labels, Index size, std::uint64_t seed) {
    const Index n = static_cast<Index>(labels.size());
    require(size >= 1 && size <= n, ErrorCode::InvalidArgument, "sample size must be in [1, dataset size]");
    std::map<int, std::vector<Index>> by_class;
    for (Index i = 0; i < n; ++i) by_class[labels[static_cast<std::size_t>(i)]].push_back(i);

    struct Quota {
        int label;
        Index take;
        double rem;
    };
    std::vector<Quota> q;
    Index assigned = 0;
    for (const auto& [lab, rows] : by_class) {
        const double exact = static_cast<double>(size) * static_cast<double>(rows.size()) / static_cast<double>(n);
        const auto base = static_cast<Index>(std::floor(exact));
        q.push_back({lab, base, exact - static_cast<double>(base)});
        assigned += base;
    }
    std::vector<std::size_t> order(q.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a].rem > q[b].rem; });
    for (std::size_t k = 0; assigned < size; ++k, ++assigned) ++q[order[k % order.size()]].take;

    Rng rng(seed);
    std::vector<Index> out;
    for (const auto& quota : q) {
        std::vector<Index> rows = by_class[quota.label];
        std::shuffle(rows.begin(), rows.end(), rng);
        out.insert(out.end(), rows.begin(), rows.begin() + quota.take);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TabularDataset load_landsat(const std::string& path, Index subsample_size, std::uint64_t seed) {
    TabularDataset full = read_landsat(path);
    if (subsample_size >= full.size()) return full;
    return full.select(stratified_sample(full.labels, subsample_size, seed));
}

std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const std::vector<int>& labels, Index n_train,
                                                                   std::uint64_t seed) {
    const Index n = static_cast<Index>(labels.size());
    require(n_train >= 1 && n_train < n, ErrorCode::InvalidArgument, "training size must leave a test set");
    std::vector<Index> train = stratified_sample(labels, n_train, seed);
    std::vector<Index> test;
    std::vector<bool> in_train(static_cast<std::size_t>(n), false);
    for (Index i : train) in_train[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < n; ++i)
        if (!in_train[static_cast<std::size_t>(i)]) test.push_back(i);
    return {train, test};
}

MinMaxScaler MinMaxScaler::fit(const MatrixXd& train) {
    require(train.rows() >= 1, ErrorCode::InsufficientData, "cannot fit scaler on no rows");
    MinMaxScaler s;
    s.lo_ = train.colwise().minCoeff().transpose();
    s.hi_ = train.colwise().maxCoeff().transpose();
    return s;
}

MatrixXd MinMaxScaler::transform(const MatrixXd& X) const {
    require(X.cols() == lo_.size(), ErrorCode::DimensionMismatch, "scaler fitted on a different width");
    MatrixXd out(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        const double span = hi_(j) - lo_(j);
        for (Index i = 0; i < X.rows(); ++i)
            out(i, j) = span > 0 ? std::clamp(2.0 * (X(i, j) - lo_(j)) / span - 1.0, -1.0, 1.0) : 0.0;
    }
    return out;
}

VectorXd build_classification_input(const VectorXd& features36) {
    require(features36.size() == kLandsatFeatures, ErrorCode::DimensionMismatch,
            "expected 36 features, got " + std::to_string(features36.size()));
    VectorXd u(2 * kLandsatFeatures);
    u << features36, features36;
    return u;
}

MatrixXd build_classification_inputs(const MatrixXd& features) {
    require(features.cols() == kLandsatFeatures, ErrorCode::DimensionMismatch, "expected 36 feature columns");
    MatrixXd out(features.rows(), 2 * kLandsatFeatures);
    out << features, features;
    return out;
}

MultiSeriesInput multi_series_windows(const std::vector<VectorXd>& series, int n_qubits, int repetitions,
                                      int n_dynamics, Index first_end, Index count) {
    require(!series.empty(), ErrorCode::InvalidArgument, "no input series");
    require(repetitions >= 1 && n_dynamics >= 0, ErrorCode::InvalidArgument, "invalid layer pattern");
    for (const auto& s : series)
        require(s.size() == series.front().size(), ErrorCode::DimensionMismatch, "input series are misaligned");
    const int S = static_cast<int>(series.size());
    const int L = n_qubits / 2;

    MultiSeriesInput out;
    out.schedule = LayerSchedule::brickwork(n_qubits, repetitions * (S + n_dynamics), S, n_dynamics);
    if (S > 1) {
        for (int r = 0; r < repetitions; ++r)
            for (int s = 0; s < S; ++s) out.schedule.encoding_sources.push_back(s);
    }
    out.schedule.validate();

    std::vector<MatrixXd> per_series;
    for (const auto& s : series) per_series.push_back(rolling_windows(s, L, first_end, count));
    out.inputs.resize(static_cast<std::size_t>(count));
    for (Index j = 0; j < count; ++j)
        for (int s = 0; s < S; ++s)
            out.inputs[static_cast<std::size_t>(j)].push_back(per_series[static_cast<std::size_t>(s)].row(j).transpose());
    return out;
}

}  // namespace qelm
