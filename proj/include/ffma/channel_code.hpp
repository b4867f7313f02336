#pragma once

// Systematic (N, mT) linear block codes over GF(p): encoding, the
// superposition identity, and two desk-scale decoders. ml_decode walks the
// whole codebook and is the oracle; qspa_decode is flooding-schedule q-ary
// belief propagation on a sparse parity-check matrix.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/gf.hpp"

namespace FFMA {

struct SparseEntry {
    int col;
    std::uint8_t coeff;
};

// Rows of (column, coefficient) pairs; coefficients live in GF(p) \ {0}.
struct SparseParityCheck {
    int cols = 0;
    std::vector<std::vector<SparseEntry>> rows;

    std::size_t row_count() const { return rows.size(); }
};

struct Codeword {
    FfVector symbols;
    std::size_t info_len;

    FfVector info() const { return symbols.subvector(0, info_len); }
    FfVector parity() const { return symbols.subvector(info_len, symbols.size() - info_len); }
};

class SystematicCode {
public:
    // g = [I | f_red]; h, when present, must satisfy g * h^T = 0.
    SystematicCode(int data_blocks, int block_len, FfMatrix f_red, std::optional<SparseParityCheck> h = std::nullopt)
        : t_(data_blocks), m_(block_len), f_red_(std::move(f_red)), h_(std::move(h)) {
        if (t_ <= 0 || m_ <= 0) throw std::invalid_argument("SystematicCode: T and m must be positive");
        if (f_red_.rows() != static_cast<std::size_t>(t_) * m_)
            throw std::invalid_argument("SystematicCode: f_red must have mT rows");
        if (h_) {
            if (h_->cols != n()) throw std::invalid_argument("SystematicCode: parity check has wrong column count");
            for (const auto& row : h_->rows)
                for (const auto& e : row)
                    if (e.col < 0 || e.col >= n() || e.coeff == 0 || e.coeff >= p())
                        throw std::invalid_argument("SystematicCode: bad parity-check entry");
        }
    }

    int p() const { return f_red_.p(); }
    int n() const { return static_cast<int>(info_len() + f_red_.cols()); }
    int data_blocks() const { return t_; }
    int block_len() const { return m_; }
    std::size_t info_len() const { return f_red_.rows(); }
    std::size_t parity_len() const { return f_red_.cols(); }
    const FfMatrix& f_red() const { return f_red_; }
    bool has_parity_check() const { return h_.has_value(); }
    const SparseParityCheck& parity_check() const {
        if (!h_) throw std::invalid_argument("code has no parity-check matrix");
        return *h_;
    }

    FfMatrix generator() const {
        FfMatrix g(p(), info_len(), n());
        for (std::size_t r = 0; r < info_len(); ++r) {
            g.set(r, r, 1);
            for (std::size_t c = 0; c < parity_len(); ++c) g.set(r, info_len() + c, f_red_.at(r, c));
        }
        return g;
    }

    // h = [-f_red^T | I], the parity check induced by the systematic form.
    SparseParityCheck induced_parity_check() const {
        SparseParityCheck h;
        h.cols = n();
        h.rows.resize(parity_len());
        for (std::size_t r = 0; r < parity_len(); ++r) {
            for (std::size_t c = 0; c < info_len(); ++c) {
                std::uint8_t v = f_red_.at(c, r);
                if (v != 0) h.rows[r].push_back({static_cast<int>(c), ff_reduce(p() - v, p())});
            }
            h.rows[r].push_back({static_cast<int>(info_len() + r), 1});
        }
        return h;
    }

    SystematicCode with_induced_parity_check() const { return SystematicCode(t_, m_, f_red_, induced_parity_check()); }

private:
    int t_;
    int m_;
    FfMatrix f_red_;
    std::optional<SparseParityCheck> h_;
};

inline Codeword encode(const SystematicCode& code, const FfVector& info) {
    if (info.p() != code.p() || info.size() != code.info_len())
        throw std::invalid_argument("encode: info must be a length-" + std::to_string(code.info_len()) + " GF(" +
                                    std::to_string(code.p()) + ") vector");
    FfVector parity = row_times(info, code.f_red());
    FfVector symbols(code.p(), code.n());
    for (std::size_t i = 0; i < info.size(); ++i) symbols.set(i, info[i]);
    for (std::size_t i = 0; i < parity.size(); ++i) symbols.set(info.size() + i, parity[i]);
    return Codeword{std::move(symbols), code.info_len()};
}

// Zero-pad a single data block into position t (1-based) and encode.
inline Codeword place_and_encode(const SystematicCode& code, const FfVector& u, int t) {
    if (t < 1 || t > code.data_blocks()) throw std::invalid_argument("place_and_encode: block index out of range");
    if (u.p() != code.p() || u.size() != static_cast<std::size_t>(code.block_len()))
        throw std::invalid_argument("place_and_encode: block must be a length-" + std::to_string(code.block_len()) +
                                    " vector");
    FfVector info(code.p(), code.info_len());
    std::size_t base = static_cast<std::size_t>(t - 1) * code.block_len();
    for (std::size_t i = 0; i < u.size(); ++i) info.set(base + i, u[i]);
    return encode(code, info);
}

inline Codeword superpose(const SystematicCode& code, const std::vector<Codeword>& words) {
    if (words.empty()) throw std::invalid_argument("superpose: empty codeword list");
    FfVector sum(code.p(), code.n());
    FfVector info_sum(code.p(), code.info_len());
    for (const auto& w : words) {
        if (w.symbols.p() != code.p() || w.symbols.size() != static_cast<std::size_t>(code.n()) ||
            w.info_len != code.info_len())
            throw std::invalid_argument("superpose: codeword does not belong to this code");
        for (std::size_t i = 0; i < sum.size(); ++i) sum.set(i, sum[i] + w.symbols[i]);
        FfVector info = w.info();
        for (std::size_t i = 0; i < info_sum.size(); ++i) info_sum.set(i, info_sum[i] + info[i]);
    }
    Codeword out{std::move(sum), code.info_len()};
    assert(out.symbols == encode(code, info_sum).symbols && "superposition must equal the encoded info sum");
    return out;
}

// Per-symbol probabilities, n rows of p entries each.
struct SymbolPosteriors {
    int p = 0;
    std::vector<double> probs; // row-major, size n*p

    std::size_t symbols() const { return probs.size() / p; }
    double at(std::size_t n, int symbol) const { return probs[n * p + symbol]; }
    void set(std::size_t n, int symbol, double v) { probs[n * p + symbol] = v; }

    static SymbolPosteriors uniform(int p, std::size_t n) {
        return SymbolPosteriors{p, std::vector<double>(n * p, 1.0 / p)};
    }

    // Probability 1 on each hard symbol (up to a tiny floor for logs).
    static SymbolPosteriors from_hard(const FfVector& v) {
        SymbolPosteriors post{v.p(), std::vector<double>(v.size() * v.p(), 0.0)};
        for (std::size_t i = 0; i < v.size(); ++i) post.set(i, v[i], 1.0);
        return post;
    }
};

namespace detail {

inline void next_info(FfVector& info, int p) {
    for (std::size_t i = info.size(); i-- > 0;) {
        if (info[i] + 1 < p) {
            info.set(i, info[i] + 1);
            return;
        }
        info.set(i, 0);
    }
}

} // namespace detail

// Exhaustive maximum-likelihood decoding over the whole codebook; ties go to
// the lexicographically smallest codeword. This stands in for the bifurcated
// minimum-distance detector at desk scale.
inline FfVector ml_decode(const SystematicCode& code, const SymbolPosteriors& post) {
    if (post.p != code.p() || post.symbols() != static_cast<std::size_t>(code.n()))
        throw std::invalid_argument("ml_decode: posteriors must cover all N symbols");
    if (code.info_len() > 16) throw std::invalid_argument("ml_decode: codebook too large to enumerate (mT > 16)");
    double total = std::pow(static_cast<double>(code.p()), static_cast<double>(code.info_len()));
    if (total > 2.1e6) throw std::invalid_argument("ml_decode: codebook too large to enumerate");
    const long long count = static_cast<long long>(total);

    std::vector<double> log_post(post.probs.size());
    for (std::size_t i = 0; i < post.probs.size(); ++i) log_post[i] = std::log(post.probs[i] + 1e-300);

    FfVector info(code.p(), code.info_len());
    FfVector best = info;
    double best_score = -1e300;
    for (long long idx = 0; idx < count; ++idx) {
        Codeword cw = encode(code, info);
        double score = 0.0;
        for (std::size_t n = 0; n < cw.symbols.size(); ++n) score += log_post[n * code.p() + cw.symbols[n]];
        if (score > best_score) { // first (lexicographically lowest) wins ties
            best_score = score;
            best = info;
        }
        detail::next_info(info, code.p());
    }
    return best;
}

struct QspaResult {
    FfVector info;
    bool converged = false;     // syndrome hit zero within the iteration cap
    int iterations = 0;
    SymbolPosteriors beliefs{}; // final per-symbol beliefs
};

// Flooding-schedule q-ary sum-product with probability-domain messages.
// Edge coefficients act as symbol permutations sigma_h(x) = h*x mod p.
inline QspaResult qspa_decode(const SystematicCode& code, const SymbolPosteriors& post, int max_iter = 50) {
    if (!code.has_parity_check()) throw std::invalid_argument("qspa_decode: code has no parity-check matrix");
    if (post.p != code.p() || post.symbols() != static_cast<std::size_t>(code.n()))
        throw std::invalid_argument("qspa_decode: posteriors must cover all N symbols");
    const int p = code.p();
    const int n = code.n();
    const SparseParityCheck& h = code.parity_check();
    const std::size_t checks = h.row_count();

    struct Edge {
        int var;
        std::uint8_t coeff;
        std::array<double, 8> v2c;
        std::array<double, 8> c2v;
    };
    std::vector<std::vector<Edge>> graph(checks);
    std::vector<std::vector<std::pair<int, int>>> var_edges(n); // (check, edge index)
    for (std::size_t c = 0; c < checks; ++c)
        for (const auto& e : h.rows[c]) {
            graph[c].push_back(Edge{e.col, e.coeff, {}, {}});
            var_edges[e.col].push_back({static_cast<int>(c), static_cast<int>(graph[c].size()) - 1});
        }

    auto normalize = [p](std::array<double, 8>& msg) {
        double s = 0.0;
        for (int x = 0; x < p; ++x) s += msg[x];
        if (s <= 0.0) {
            for (int x = 0; x < p; ++x) msg[x] = 1.0 / p;
        } else {
            for (int x = 0; x < p; ++x) msg[x] /= s;
        }
    };

    // c2v starts uniform so the first v2c pass is just the channel posterior.
    for (auto& row : graph)
        for (auto& e : row)
            for (int x = 0; x < p; ++x) e.c2v[x] = 1.0 / p;

    SymbolPosteriors beliefs = post;
    FfVector hard(p, n);
    auto update_beliefs_and_hard = [&]() {
        for (int v = 0; v < n; ++v) {
            std::array<double, 8> b{};
            for (int x = 0; x < p; ++x) b[x] = post.at(v, x);
            for (auto [c, ei] : var_edges[v])
                for (int x = 0; x < p; ++x) b[x] *= graph[c][ei].c2v[x];
            normalize(b);
            int best = 0;
            for (int x = 1; x < p; ++x)
                if (b[x] > b[best]) best = x;
            hard.set(v, best);
            for (int x = 0; x < p; ++x) beliefs.set(v, x, b[x]);
        }
    };
    auto syndrome_ok = [&]() {
        for (std::size_t c = 0; c < checks; ++c) {
            long long s = 0;
            for (const auto& e : graph[c]) s += e.coeff * hard[e.var];
            if (s % p != 0) return false;
        }
        return true;
    };

    update_beliefs_and_hard();
    int iter = 0;
    bool converged = syndrome_ok();
    while (!converged && iter < max_iter) {
        ++iter;
        // variable to check
        for (int v = 0; v < n; ++v) {
            for (auto [c, ei] : var_edges[v]) {
                std::array<double, 8> msg{};
                for (int x = 0; x < p; ++x) msg[x] = post.at(v, x);
                for (auto [c2, ei2] : var_edges[v]) {
                    if (c2 == c && ei2 == ei) continue;
                    for (int x = 0; x < p; ++x) msg[x] *= graph[c2][ei2].c2v[x];
                }
                normalize(msg);
                graph[c][ei].v2c = msg;
            }
        }
        // check to variable: prefix/suffix convolutions over Z_p of the
        // permuted messages t_e(z) = v2c(h^{-1} z)
        for (std::size_t c = 0; c < checks; ++c) {
            auto& row = graph[c];
            const std::size_t d = row.size();
            std::vector<std::array<double, 8>> t(d), pre(d + 1), suf(d + 1);
            for (std::size_t i = 0; i < d; ++i) {
                for (int z = 0; z < p; ++z) t[i][z] = 0.0;
                for (int x = 0; x < p; ++x) t[i][(row[i].coeff * x) % p] += row[i].v2c[x];
            }
            auto conv = [p](const std::array<double, 8>& a, const std::array<double, 8>& b) {
                std::array<double, 8> out{};
                for (int x = 0; x < p; ++x)
                    for (int y = 0; y < p; ++y) out[(x + y) % p] += a[x] * b[y];
                return out;
            };
            pre[0].fill(0.0);
            pre[0][0] = 1.0;
            for (std::size_t i = 0; i < d; ++i) pre[i + 1] = conv(pre[i], t[i]);
            suf[d].fill(0.0);
            suf[d][0] = 1.0;
            for (std::size_t i = d; i-- > 0;) suf[i] = conv(suf[i + 1], t[i]);
            for (std::size_t i = 0; i < d; ++i) {
                std::array<double, 8> others = conv(pre[i], suf[i + 1]);
                std::array<double, 8> msg{};
                for (int x = 0; x < p; ++x) {
                    int z = (row[i].coeff * x) % p;
                    msg[x] = others[(p - z) % p];
                }
                normalize(msg);
                row[i].c2v = msg;
            }
        }
        update_beliefs_and_hard();
        converged = syndrome_ok();
    }

    FfVector info(p, code.info_len());
    for (std::size_t i = 0; i < code.info_len(); ++i) info.set(i, hard[i]);
    return QspaResult{std::move(info), converged, iter, std::move(beliefs)};
}

// The (16, 12) systematic code whose generator appears with four parity
// columns tied to rows {1,6,11}, {2,7,12}, {3,8,9} and {4,5,10}; the 0/1
// entries serve both GF(2) and GF(3).
inline SystematicCode example_code_16_12(int p) {
    if (p != 2 && p != 3) throw std::invalid_argument("example_code_16_12: p must be 2 or 3");
    static const char* parity_rows[12] = {"1000", "0100", "0010", "0001", "0001", "1000",
                                          "0100", "0010", "0010", "0001", "1000", "0100"};
    FfMatrix f(p, 12, 4);
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t c = 0; c < 4; ++c) f.set(r, c, parity_rows[r][c] - '0');
    SystematicCode code(3, 4, f);
    return code.with_induced_parity_check();
}

// Systematic form of an arbitrary sparse parity check whose right R x R
// block is invertible: solves h2 * f^T = -h1 by elimination on [h2 | -h1].
inline SystematicCode systematic_from_parity_check(int p, int data_blocks, int block_len, const SparseParityCheck& h) {
    const int info_len = data_blocks * block_len;
    const int parity_len = static_cast<int>(h.row_count());
    if (h.cols != info_len + parity_len)
        throw std::invalid_argument("systematic_from_parity_check: N must equal mT + R");
    FfMatrix hm(p, parity_len, h.cols);
    for (int r = 0; r < parity_len; ++r)
        for (const auto& e : h.rows[r]) hm.set(r, e.col, e.coeff);

    FfMatrix aug(p, parity_len, parity_len + info_len);
    for (int r = 0; r < parity_len; ++r) {
        for (int c = 0; c < parity_len; ++c) aug.set(r, c, hm.at(r, info_len + c));
        for (int c = 0; c < info_len; ++c) aug.set(r, parity_len + c, (p - hm.at(r, c)) % p);
    }
    for (int col = 0; col < parity_len; ++col) {
        std::size_t pivot = col;
        while (pivot < aug.rows() && aug.at(pivot, col) == 0) ++pivot;
        if (pivot == aug.rows())
            throw std::invalid_argument("systematic_from_parity_check: parity block is singular");
        if (pivot != static_cast<std::size_t>(col))
            for (std::size_t j = 0; j < aug.cols(); ++j) {
                int tswap = aug.at(col, j);
                aug.set(col, j, aug.at(pivot, j));
                aug.set(pivot, j, tswap);
            }
        std::uint8_t inv = ff_inverse(aug.at(col, col), p);
        for (std::size_t j = 0; j < aug.cols(); ++j) aug.set(col, j, inv * aug.at(col, j));
        for (std::size_t i = 0; i < aug.rows(); ++i) {
            if (i == static_cast<std::size_t>(col) || aug.at(i, col) == 0) continue;
            int f = aug.at(i, col);
            for (std::size_t j = 0; j < aug.cols(); ++j) aug.set(i, j, aug.at(i, j) + (p - f) * aug.at(col, j));
        }
    }
    FfMatrix f_red(p, info_len, parity_len);
    for (int r = 0; r < parity_len; ++r)
        for (int c = 0; c < info_len; ++c) f_red.set(c, r, aug.at(r, parity_len + c));

    SystematicCode code(data_blocks, block_len, f_red, h);
    FfMatrix g = code.generator();
    for (std::size_t r = 0; r < g.rows(); ++r) {
        FfVector cw = g.row(r);
        for (const auto& row : h.rows) {
            long long s = 0;
            for (const auto& e : row) s += e.coeff * cw[e.col];
            if (s % p != 0) throw std::logic_error("systematic_from_parity_check: transform failed");
        }
    }
    return code;
}

// Seeded sparse toy code for tests and desk-scale sweeps: a random
// regular-ish parity check with column weight 3 and 4-cycle reduction,
// brought to systematic form by eliminating an invertible parity block.
inline SystematicCode toy_ldpc(int p, int data_blocks, int block_len, int parity_len, std::uint64_t seed) {
    require_supported_prime(p);
    const int info_len = data_blocks * block_len;
    const int n = info_len + parity_len;
    if (parity_len < 3) throw std::invalid_argument("toy_ldpc: need at least 3 parity symbols");

    std::mt19937_64 rng(seed);
    auto rand_coeff = [&]() { return static_cast<std::uint8_t>(1 + rng() % (p - 1)); };

    for (int attempt = 0; attempt < 64; ++attempt) {
        // column weight 3, rows kept near-balanced
        std::vector<std::vector<int>> row_cols(parity_len);
        std::vector<int> row_load(parity_len, 0);
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) {
            std::vector<int> picked;
            for (int w = 0; w < 3; ++w) {
                int best = -1;
                for (int trial = 0; trial < 64; ++trial) {
                    int c = static_cast<int>(rng() % parity_len);
                    if (std::find(picked.begin(), picked.end(), c) != picked.end()) continue;
                    if (best == -1 || row_load[c] < row_load[best]) best = c;
                }
                if (best == -1) { ok = false; break; }
                picked.push_back(best);
                row_load[best]++;
            }
            for (int c : picked) row_cols[c].push_back(v);
        }
        if (!ok) continue;

        // 4-cycle reduction: two rows sharing two columns get one shared
        // column of the denser row moved elsewhere
        for (int pass = 0; pass < 8; ++pass) {
            bool changed = false;
            for (int a = 0; a < parity_len; ++a)
                for (int b = a + 1; b < parity_len; ++b) {
                    std::vector<int> shared;
                    for (int v : row_cols[a])
                        if (std::find(row_cols[b].begin(), row_cols[b].end(), v) != row_cols[b].end())
                            shared.push_back(v);
                    if (shared.size() < 2) continue;
                    int victim = shared.back();
                    int from = row_load[a] >= row_load[b] ? a : b;
                    int to = static_cast<int>(rng() % parity_len);
                    if (to == a || to == b) continue;
                    if (std::find(row_cols[to].begin(), row_cols[to].end(), victim) != row_cols[to].end()) continue;
                    auto& cols = row_cols[from];
                    cols.erase(std::find(cols.begin(), cols.end(), victim));
                    row_cols[to].push_back(victim);
                    row_load[from]--;
                    row_load[to]++;
                    changed = true;
                }
            if (!changed) break;
        }

        SparseParityCheck h;
        h.cols = n;
        h.rows.resize(parity_len);
        for (int r = 0; r < parity_len; ++r) {
            std::sort(row_cols[r].begin(), row_cols[r].end());
            for (int v : row_cols[r]) h.rows[r].push_back({v, rand_coeff()});
        }

        // Right parity block must be invertible so that the code has a
        // systematic generator with the info section in front.
        FfMatrix h2(p, parity_len, parity_len);
        for (int r = 0; r < parity_len; ++r)
            for (const auto& e : h.rows[r])
                if (e.col >= info_len) h2.set(r, e.col - info_len, e.coeff);
        if (rank(h2) != static_cast<std::size_t>(parity_len)) continue;

        return systematic_from_parity_check(p, data_blocks, block_len, h);
    }
    throw std::runtime_error("toy_ldpc: failed to build an invertible parity block; try another seed");
}

// alist-style sparse parity check. The MacKay layout is
//   N M [q] / col degrees / row degrees / per-column entries / per-row entries
// with bare column indices for binary codes and "index coeff" pairs when the
// q header is present.
inline SparseParityCheck parity_check_from_alist(std::istream& in, int p) {
    std::string first_line;
    while (std::getline(in, first_line)) {
        if (first_line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    std::istringstream header(first_line);
    long long n = 0, m = 0, q = 0;
    if (!(header >> n >> m)) throw std::invalid_argument("alist: bad 'N M' header");
    bool has_coeffs = static_cast<bool>(header >> q);
    if (has_coeffs && q != p) throw std::invalid_argument("alist: field size does not match code");
    if (n <= 0 || m <= 0) throw std::invalid_argument("alist: dimensions must be positive");

    long long max_col_deg = 0, max_row_deg = 0;
    if (!(in >> max_col_deg >> max_row_deg)) throw std::invalid_argument("alist: missing max degrees");
    std::vector<long long> col_deg(n), row_deg(m);
    for (auto& d : col_deg)
        if (!(in >> d)) throw std::invalid_argument("alist: missing column degrees");
    for (auto& d : row_deg)
        if (!(in >> d)) throw std::invalid_argument("alist: missing row degrees");

    auto read_entry = [&](long long& idx, std::uint8_t& coeff) {
        if (!(in >> idx)) throw std::invalid_argument("alist: missing entries");
        if (has_coeffs) {
            int c = 0;
            if (!(in >> c)) throw std::invalid_argument("alist: missing coefficient");
            coeff = static_cast<std::uint8_t>(c % p);
        } else {
            coeff = 1;
        }
    };

    // column lists: padded with zeros up to max_col_deg in standard files
    for (long long c = 0; c < n; ++c)
        for (long long k = 0; k < max_col_deg; ++k) {
            long long idx;
            std::uint8_t coeff;
            read_entry(idx, coeff);
            (void)idx;
            (void)coeff;
        }

    SparseParityCheck h;
    h.cols = static_cast<int>(n);
    h.rows.resize(m);
    for (long long r = 0; r < m; ++r)
        for (long long k = 0; k < max_row_deg; ++k) {
            long long idx;
            std::uint8_t coeff;
            read_entry(idx, coeff);
            if (idx == 0) continue; // padding
            if (idx < 1 || idx > n) throw std::invalid_argument("alist: column index out of range");
            if (coeff == 0) coeff = 1;
            h.rows[r].push_back({static_cast<int>(idx - 1), coeff});
        }
    return h;
}

} // namespace FFMA
