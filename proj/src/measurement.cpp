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

#include "qelm/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

namespace qelm {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint64_t pow3(int k) {
    std::uint64_t r = 1;
    while (k-- > 0) r *= 3;
    return r;
}

struct TreeSampler {
    int n;
    std::optional<std::vector<Basis>> forced;
    Rng rng;
    std::vector<std::uint64_t> trit_weight;
    std::vector<std::uint64_t> out;

    long binomial(long count, double p) {
        p = std::clamp(p, 0.0, 1.0);
        if (count == 0 || p == 0.0) return 0;
        if (p == 1.0) return count;
        std::binomial_distribution<long> dist(count, p);
        return dist(rng);
    }

    // psi holds qubits 0..q (normalised); prefix carries the decisions for
    // qubits above q.
    void run(const VectorXcd& psi, int q, long count, std::uint64_t trits, std::uint64_t bits) {
        const Index half = Index(1) << q;
        std::array<long, 3> per_basis{0, 0, 0};
        if (forced) {
            per_basis[static_cast<std::size_t>((*forced)[static_cast<std::size_t>(q)])] = count;
        } else {
            per_basis[0] = binomial(count, 1.0 / 3.0);
            per_basis[1] = binomial(count - per_basis[0], 0.5);
            per_basis[2] = count - per_basis[0] - per_basis[1];
        }
        const auto a0 = psi.head(half);
        const auto a1 = psi.tail(half);
        const cplx I(0, 1);
        for (int b = 0; b < 3; ++b) {
            const long nb = per_basis[static_cast<std::size_t>(b)];
            if (nb == 0) continue;
            VectorXcd plus, minus;
            switch (b) {
                case 0:
                    plus = (a0 + a1) * kInvSqrt2;
                    minus = (a0 - a1) * kInvSqrt2;
                    break;
                case 1:
                    plus = (a0 - I * a1) * kInvSqrt2;
                    minus = (a0 + I * a1) * kInvSqrt2;
                    break;
                default:
                    plus = a0;
                    minus = a1;
                    break;
            }
            const double p_plus = plus.squaredNorm();
            const double p_minus = minus.squaredNorm();
            const long n_plus = binomial(nb, p_plus / (p_plus + p_minus));
            const long n_minus = nb - n_plus;
            const std::uint64_t t = trits + static_cast<std::uint64_t>(b) * trit_weight[static_cast<std::size_t>(q)];
            const std::uint64_t bit = std::uint64_t(1) << q;
            if (q == 0) {
                const std::uint64_t base = t << n;
                out.insert(out.end(), static_cast<std::size_t>(n_plus), base | bits);
                out.insert(out.end(), static_cast<std::size_t>(n_minus), base | bits | bit);
                continue;
            }
            if (n_plus > 0) run(plus / std::sqrt(p_plus), q - 1, n_plus, t, bits);
            if (n_minus > 0) run(minus / std::sqrt(p_minus), q - 1, n_minus, t, bits | bit);
        }
    }
};

// Single-qubit measurement eigenvector for cell (basis, outcome bit).
std::array<cplx, 2> cell_vector(int cell) {
    const int b = cell / 2;
    const double s = (cell % 2) ? -1.0 : 1.0;
    switch (b) {
        case 0: return {cplx(kInvSqrt2), cplx(s * kInvSqrt2)};
        case 1: return {cplx(kInvSqrt2), cplx(0, s * kInvSqrt2)};
        default: return cell % 2 ? std::array<cplx, 2>{0.0, 1.0} : std::array<cplx, 2>{1.0, 0.0};
    }
}

}  // namespace

char basis_char(Basis b) { return "XYZ"[static_cast<int>(b)]; }

Basis basis_from_char(char c) {
    switch (c) {
        case 'X': return Basis::X;
        case 'Y': return Basis::Y;
        case 'Z': return Basis::Z;
        default: fail(ErrorCode::InvalidArgument, std::string("unsupported basis '") + c + "'");
    }
}

ShotRecord::ShotRecord(int n_qubits) : n_(n_qubits) {
    require(n_qubits >= 0 && n_qubits <= kMaxQubits, ErrorCode::CapacityExceeded,
            "shot records hold at most 24 qubits");
}

void ShotRecord::push(const std::vector<Basis>& bases, const std::vector<int>& outcomes) {
    require(static_cast<int>(bases.size()) == n_ && static_cast<int>(outcomes.size()) == n_,
            ErrorCode::DimensionMismatch, "one basis and outcome per qubit required");
    std::uint64_t trits = 0, bits = 0;
    for (int q = n_ - 1; q >= 0; --q) trits = trits * 3 + static_cast<std::uint64_t>(bases[static_cast<std::size_t>(q)]);
    for (int q = 0; q < n_; ++q)
        if (outcomes[static_cast<std::size_t>(q)] < 0) bits |= std::uint64_t(1) << q;
    shots_.push_back((trits << n_) | bits);
}

Basis ShotRecord::basis(std::size_t shot, int qubit) const {
    const std::uint64_t trits = shots_[shot] >> n_;
    return static_cast<Basis>((trits / pow3(qubit)) % 3);
}

int ShotRecord::outcome(std::size_t shot, int qubit) const {
    return ((shots_[shot] >> qubit) & 1) ? -1 : 1;
}

void ShotRecord::cells(std::size_t shot, int* out) const {
    const std::uint64_t key = shots_[shot];
    std::uint64_t trits = key >> n_;
    for (int q = 0; q < n_; ++q) {
        out[q] = static_cast<int>(trits % 3) * 2 + static_cast<int>((key >> q) & 1);
        trits /= 3;
    }
}

ShotRecord ShotRecord::prefix(std::size_t n) const {
    require(n <= shots_.size(), ErrorCode::InvalidArgument, "prefix longer than the record");
    ShotRecord r(n_);
    r.shots_.assign(shots_.begin(), shots_.begin() + static_cast<std::ptrdiff_t>(n));
    return r;
}

ShotRecord ShotRecord::resample(Rng& rng) const {
    ShotRecord r(n_);
    if (shots_.empty()) return r;
    std::uniform_int_distribution<std::size_t> pick(0, shots_.size() - 1);
    r.shots_.resize(shots_.size());
    for (auto& s : r.shots_) s = shots_[pick(rng)];
    return r;
}

ShotRecord sample_shots(const StateVector& state, long shots, std::uint64_t seed,
                        const std::optional<std::vector<Basis>>& forced_bases) {
    require(shots >= 1, ErrorCode::InvalidArgument, "need at least one shot");
    const int n = state.n_qubits();
    require(n <= ShotRecord::kMaxQubits, ErrorCode::CapacityExceeded, "too many qubits for shot records");
    if (forced_bases)
        require(static_cast<int>(forced_bases->size()) == n, ErrorCode::DimensionMismatch,
                "forced bases need one entry per qubit");

    TreeSampler sampler{n, forced_bases, Rng(seed), {}, {}};
    for (int q = 0; q < n; ++q) sampler.trit_weight.push_back(pow3(q));
    sampler.out.reserve(static_cast<std::size_t>(shots));
    const double nrm = state.norm();
    require(nrm > 0, ErrorCode::Degenerate, "cannot sample a zero state");
    sampler.run(state.amplitudes() / nrm, n - 1, shots, 0, 0);
    std::shuffle(sampler.out.begin(), sampler.out.end(), sampler.rng);

    ShotRecord rec(n);
    for (auto s : sampler.out) rec.push(s);
    return rec;
}

ShadowStats shadow_statistics(const ShotRecord& records, const PauliObservable& obs) {
    validate_observable(obs, records.n_qubits());
    require(records.size() > 0, ErrorCode::NoMatchingShots, "empty shot record");
    const double scale = obs.weight == 1 ? 3.0 : 9.0;
    std::vector<int> cells(static_cast<std::size_t>(records.n_qubits()));
    double sum = 0.0;
    std::size_t matching = 0;
    for (std::size_t s = 0; s < records.size(); ++s) {
        records.cells(s, cells.data());
        int sign = 1;
        bool match = true;
        for (int w = 0; w < obs.weight && match; ++w) {
            const int c = cells[static_cast<std::size_t>(obs.qubits[static_cast<std::size_t>(w)])];
            match = c / 2 == static_cast<int>(basis_from_char(obs.labels[static_cast<std::size_t>(w)]));
            if (c % 2) sign = -sign;
        }
        if (!match) continue;
        ++matching;
        sum += sign;
    }
    if (matching == 0) fail(ErrorCode::NoMatchingShots, "no shot measured " + obs.name() + " in its bases");
    const double S = static_cast<double>(records.size());
    ShadowStats st;
    st.value = scale * sum / S;
    st.matching_shots = matching;
    // Single-shot values are +-scale on matching shots and 0 elsewhere.
    const double second = scale * scale * static_cast<double>(matching) / S;
    const double var = S > 1 ? (second - st.value * st.value) * S / (S - 1) : 0.0;
    st.standard_error = std::sqrt(std::max(var, 0.0) / S);
    return st;
}

double shadow_estimate(const ShotRecord& records, const PauliObservable& obs) {
    return shadow_statistics(records, obs).value;
}

int cells_for_weight(int weight) {
    require(weight == 1 || weight == 2, ErrorCode::InvalidArgument, "subset weight must be 1 or 2");
    return weight == 1 ? 6 : 36;
}

std::vector<std::string> cell_labels(int weight) {
    static const std::array<const char*, 6> single{"X+", "X-", "Y+", "Y-", "Z+", "Z-"};
    std::vector<std::string> out;
    if (weight == 1) {
        out.assign(single.begin(), single.end());
    } else {
        require(weight == 2, ErrorCode::InvalidArgument, "subset weight must be 1 or 2");
        for (auto a : single)
            for (auto b : single) out.push_back(std::string(a) + b);
    }
    return out;
}

std::vector<std::vector<int>> single_subsets(int n_qubits) {
    std::vector<std::vector<int>> out;
    for (int q = 0; q < n_qubits; ++q) out.push_back({q});
    return out;
}

std::vector<std::vector<int>> pair_subsets(int n_qubits) {
    std::vector<std::vector<int>> out;
    for (int q = 0; q + 1 < n_qubits; q += 2) out.push_back({q, q + 1});
    return out;
}

std::vector<LocalFrequencies> local_frequencies(const ShotRecord& records,
                                                const std::vector<std::vector<int>>& subsets,
                                                std::optional<std::size_t> n_shots) {
    const std::size_t S = n_shots.value_or(records.size());
    require(S <= records.size(), ErrorCode::InvalidArgument, "requested more shots than recorded");
    require(S > 0, ErrorCode::InsufficientData, "no shots to aggregate");
    std::vector<char> used(static_cast<std::size_t>(records.n_qubits()), 0);
    std::vector<LocalFrequencies> out;
    for (const auto& sub : subsets) {
        require(sub.size() == 1 || sub.size() == 2, ErrorCode::InvalidArgument, "subsets hold one or two qubits");
        for (int q : sub) {
            require(q >= 0 && q < records.n_qubits(), ErrorCode::InvalidArgument, "subset qubit out of range");
            require(!used[static_cast<std::size_t>(q)], ErrorCode::InvalidArgument, "subsets must be disjoint");
            used[static_cast<std::size_t>(q)] = 1;
        }
        LocalFrequencies f;
        f.qubits = sub;
        f.freq = VectorXd::Zero(cells_for_weight(static_cast<int>(sub.size())));
        f.shots = static_cast<long>(S);
        out.push_back(std::move(f));
    }
    std::vector<int> cells(static_cast<std::size_t>(records.n_qubits()));
    for (std::size_t s = 0; s < S; ++s) {
        records.cells(s, cells.data());
        for (auto& f : out) {
            const int c0 = cells[static_cast<std::size_t>(f.qubits[0])];
            const int idx = f.qubits.size() == 1 ? c0 : c0 * 6 + cells[static_cast<std::size_t>(f.qubits[1])];
            f.freq(idx) += 1.0;
        }
    }
    for (auto& f : out) f.freq /= static_cast<double>(S);
    return out;
}

VectorXd povm_probabilities(const MatrixXcd& rho) {
    require(rho.rows() == rho.cols() && (rho.rows() == 2 || rho.rows() == 4), ErrorCode::DimensionMismatch,
            "density matrix must be 2x2 or 4x4");
    const bool pair = rho.rows() == 4;
    VectorXd p(pair ? 36 : 6);
    for (int c = 0; c < p.size(); ++c) {
        VectorXcd phi(rho.rows());
        if (!pair) {
            const auto v = cell_vector(c);
            phi << v[0], v[1];
        } else {
            // first subset qubit is the low bit of rho's basis index
            const auto va = cell_vector(c / 6);
            const auto vb = cell_vector(c % 6);
            for (int i = 0; i < 4; ++i) phi(i) = va[static_cast<std::size_t>(i & 1)] * vb[static_cast<std::size_t>(i >> 1)];
        }
        p(c) = std::max(0.0, (phi.adjoint() * rho * phi)(0, 0).real()) / (pair ? 9.0 : 3.0);
    }
    return p;
}

VectorXd local_probabilities(const StateVector& state, const std::vector<int>& subset) {
    require(subset.size() == 1 || subset.size() == 2, ErrorCode::InvalidArgument, "subsets hold one or two qubits");
    for (int q : subset)
        require(q >= 0 && q < state.n_qubits(), ErrorCode::InvalidArgument, "subset qubit out of range");
    const int w = static_cast<int>(subset.size());
    const int d = 1 << w;
    Index mask = 0;
    for (int q : subset) mask |= Index(1) << q;
    auto spread = [&](int k) {
        Index m = 0;
        for (int j = 0; j < w; ++j)
            if ((k >> j) & 1) m |= Index(1) << subset[static_cast<std::size_t>(j)];
        return m;
    };
    MatrixXcd rho = MatrixXcd::Zero(d, d);
    const auto& a = state.amplitudes();
    for (Index i = 0; i < a.size(); ++i) {
        if (i & mask) continue;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) rho(r, c) += a(i | spread(r)) * std::conj(a(i | spread(c)));
    }
    return povm_probabilities(rho);
}

MatrixXd povm_effect_map(int weight) {
    // p(b, o) = (c_I + o c_b) / 6 for a single qubit.
    MatrixXd a1 = MatrixXd::Zero(6, 4);
    for (int c = 0; c < 6; ++c) {
        a1(c, 0) = 1.0 / 6.0;
        a1(c, 1 + c / 2) = (c % 2 ? -1.0 : 1.0) / 6.0;
    }
    if (weight == 1) return a1;
    require(weight == 2, ErrorCode::InvalidArgument, "subset weight must be 1 or 2");
    MatrixXd a2(36, 16);
    for (int r = 0; r < 36; ++r)
        for (int c = 0; c < 16; ++c) a2(r, c) = a1(r / 6, c / 4) * a1(r % 6, c % 4);
    return a2;
}

VectorXd sample_frequencies(const VectorXd& p, long shots, Rng& rng) {
    require(shots >= 1, ErrorCode::InvalidArgument, "need at least one shot");
    VectorXd f = VectorXd::Zero(p.size());
    long left = shots;
    double mass = p.sum();
    for (Index k = 0; k < p.size() && left > 0; ++k) {
        if (k == p.size() - 1 || mass <= 0) {
            f(k) = static_cast<double>(left);
            break;
        }
        const double q = std::clamp(p(k) / mass, 0.0, 1.0);
        long n = 0;
        if (q >= 1.0)
            n = left;
        else if (q > 0.0)
            n = std::binomial_distribution<long>(left, q)(rng);
        f(k) = static_cast<double>(n);
        left -= n;
        mass -= p(k);
    }
    return f / static_cast<double>(shots);
}

double pauli_from_frequencies(const LocalFrequencies& f, const PauliObservable& obs) {
    std::array<int, 2> pos{-1, -1};
    for (int w = 0; w < obs.weight; ++w) {
        const auto it = std::find(f.qubits.begin(), f.qubits.end(), obs.qubits[static_cast<std::size_t>(w)]);
        require(it != f.qubits.end(), ErrorCode::InvalidArgument, obs.name() + " not supported on subset");
        pos[static_cast<std::size_t>(w)] = static_cast<int>(it - f.qubits.begin());
    }
    const int w_sub = static_cast<int>(f.qubits.size());
    double acc = 0.0;
    for (Index c = 0; c < f.freq.size(); ++c) {
        std::array<int, 2> cell{static_cast<int>(w_sub == 1 ? c : c / 6), static_cast<int>(c % 6)};
        double v = 1.0;
        for (int w = 0; w < obs.weight && v != 0.0; ++w) {
            const int cc = cell[static_cast<std::size_t>(pos[static_cast<std::size_t>(w)])];
            if (cc / 2 != static_cast<int>(basis_from_char(obs.labels[static_cast<std::size_t>(w)])))
                v = 0.0;
            else
                v *= cc % 2 ? -3.0 : 3.0;
        }
        acc += v * f.freq(c);
    }
    return acc;
}

MatrixXd gaussian_noise_features(const MatrixXd& features, double sigma, std::uint64_t seed) {
    require(sigma >= 0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "sigma must be finite and >= 0");
    MatrixXd out = features;
    if (sigma == 0.0) return out;
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (Index i = 0; i < out.rows(); ++i)
        for (Index j = 1; j < out.cols(); ++j) out(i, j) += normal(rng);
    return out;
}

namespace {

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& is, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = is.get();
        require(c != EOF, ErrorCode::Parse, "truncated shot file");
        v |= static_cast<std::uint64_t>(c & 0xff) << (8 * i);
    }
    return v;
}

constexpr char kShotMagic[8] = {'Q', 'E', 'L', 'M', 'S', 'H', 'O', 'T'};

}  // namespace

void write_shot_file(const std::string& path, const ShotRecord& records) {
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::Io, "cannot open " + path + " for writing");
    const int n = records.n_qubits();
    os.write(kShotMagic, 8);
    put_le(os, 1, 4);
    put_le(os, static_cast<std::uint64_t>(n), 4);
    put_le(os, records.size(), 8);
    const int trit_bytes = (n + 4) / 5;
    const int bit_bytes = (n + 7) / 8;
    std::vector<int> cells(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < records.size(); ++s) {
        records.cells(s, cells.data());
        for (int b = 0; b < trit_bytes; ++b) {
            int byte = 0;
            for (int j = std::min(n, 5 * b + 5) - 1; j >= 5 * b; --j) byte = byte * 3 + cells[static_cast<std::size_t>(j)] / 2;
            os.put(static_cast<char>(byte));
        }
        for (int b = 0; b < bit_bytes; ++b) {
            int byte = 0;
            for (int j = 8 * b; j < std::min(n, 8 * b + 8); ++j) byte |= (cells[static_cast<std::size_t>(j)] % 2) << (j - 8 * b);
            os.put(static_cast<char>(byte));
        }
    }
    require(static_cast<bool>(os), ErrorCode::Io, "write failed for " + path);
}

ShotRecord read_shot_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    require(is.gcount() == 8 && std::equal(magic, magic + 8, kShotMagic), ErrorCode::Parse,
            path + " is not a shot file");
    const auto version = get_le(is, 4);
    require(version == 1, ErrorCode::SchemaVersion, "unsupported shot file version " + std::to_string(version));
    const int n = static_cast<int>(get_le(is, 4));
    const auto count = get_le(is, 8);
    ShotRecord rec(n);
    const int trit_bytes = (n + 4) / 5;
    const int bit_bytes = (n + 7) / 8;
    std::vector<Basis> bases(static_cast<std::size_t>(n));
    std::vector<int> outcomes(static_cast<std::size_t>(n));
    for (std::uint64_t s = 0; s < count; ++s) {
        for (int b = 0; b < trit_bytes; ++b) {
            int byte = static_cast<int>(get_le(is, 1));
            require(byte < 243, ErrorCode::Parse, "corrupt basis byte in " + path);
            for (int j = 5 * b; j < std::min(n, 5 * b + 5); ++j) {
                bases[static_cast<std::size_t>(j)] = static_cast<Basis>(byte % 3);
                byte /= 3;
            }
        }
        for (int b = 0; b < bit_bytes; ++b) {
            const int byte = static_cast<int>(get_le(is, 1));
            for (int j = 8 * b; j < std::min(n, 8 * b + 8); ++j)
                outcomes[static_cast<std::size_t>(j)] = ((byte >> (j - 8 * b)) & 1) ? -1 : 1;
        }
        rec.push(bases, outcomes);
    }
    return rec;
}

}  // namespace qelm
