#pragma once

// Receiver-side statistics and detection for GF(3^m) FFMA: the CFSP alphabet
// Omega_r with its finite-field image Omega_v and prior pmf, per-sample
// symbol posteriors, Walsh correlation in both fields, and exhaustive MAP
// detection for overloaded codes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ffma/encoder.hpp"
#include "ffma/epcode.hpp"
#include "ffma/gf.hpp"
#include "ffma/modem.hpp"

namespace FFMA {

enum class CfspAlphabet { Ternary3Ask, BinaryBpsk };

struct CfspStats {
    int users = 0;
    CfspAlphabet alphabet = CfspAlphabet::Ternary3Ask;
    std::vector<int> omega_r;          // descending CFSP values
    std::vector<std::uint8_t> omega_v; // matching GF(3) symbols
    std::vector<double> pmf;           // prior per omega_r entry

    int index_of(int r) const {
        for (std::size_t l = 0; l < omega_r.size(); ++l)
            if (omega_r[l] == r) return static_cast<int>(l);
        throw std::invalid_argument("CFSP value " + std::to_string(r) + " is outside the alphabet");
    }
};

namespace detail {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace detail

// Ternary: Omega_r = (J, J-1, ..., -J), v = r mod 3, multinomial priors.
// BPSK: Omega_r = (J, J-2, ..., -J), v = (2J - iota) mod 3, binomial priors.
inline CfspStats cfsp_stats(int users, CfspAlphabet alphabet) {
    if (users < 1) throw std::invalid_argument("cfsp_stats: need at least one user");
    CfspStats s;
    s.users = users;
    s.alphabet = alphabet;
    if (alphabet == CfspAlphabet::Ternary3Ask) {
        const double denom = std::pow(3.0, users);
        for (int r = users; r >= -users; --r) {
            s.omega_r.push_back(r);
            s.omega_v.push_back(static_cast<std::uint8_t>(((r % 3) + 3) % 3));
            double prob = 0.0;
            for (int plus = 0; plus <= users; ++plus) {
                int minus = plus - r;
                if (minus < 0 || plus + minus > users) continue;
                prob += detail::binomial(users, plus) * detail::binomial(users - plus, minus) / denom;
            }
            s.pmf.push_back(prob);
        }
    } else {
        const double denom = std::pow(2.0, users);
        for (int r = users; r >= -users; r -= 2) {
            int plus = (r + users) / 2; // users sending symbol (1)_3
            s.omega_r.push_back(r);
            s.omega_v.push_back(static_cast<std::uint8_t>((2 * users - plus) % 3));
            s.pmf.push_back(detail::binomial(users, plus) / denom);
        }
    }
    return s;
}

inline std::uint8_t f_c2f_hard(int r, const CfspStats& stats) { return stats.omega_v[stats.index_of(r)]; }

struct SymbolPosterior {
    std::array<double, 3> probs{}; // indexed by GF(3) symbol
};

// P(v = s | y) with amplitude sqrt(mu * P_avg) per CFSP level; P_avg = 1.
inline SymbolPosterior posterior(double y, double mu, double n0, const CfspStats& stats) {
    if (n0 <= 0.0) throw std::invalid_argument("posterior: n0 must be positive");
    const double amp = std::sqrt(mu);
    double max_exp = -1e300;
    std::vector<double> ex(stats.omega_r.size());
    for (std::size_t l = 0; l < stats.omega_r.size(); ++l) {
        double d = y - amp * stats.omega_r[l];
        ex[l] = -d * d / n0;
        max_exp = std::max(max_exp, ex[l]);
    }
    SymbolPosterior out;
    double total = 0.0;
    for (std::size_t l = 0; l < stats.omega_r.size(); ++l) {
        double w = stats.pmf[l] * std::exp(ex[l] - max_exp);
        out.probs[stats.omega_v[l]] += w;
        total += w;
    }
    for (auto& v : out.probs) v /= total;
    return out;
}

// BPSK image of a zero-free ternary matrix, one real row per code row.
inline std::vector<RealSignal> walsh_rows(const FfMatrix& t) {
    std::vector<RealSignal> rows;
    rows.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) rows.push_back(f_f2c_bpsk(t.row(r)));
    return rows;
}

enum class CorrDecision { Bit0, Bit1, Erasure };

// Threshold detector on the complex-field correlation; the dead zone
// [-delta, +delta] is closed, so a correlation of exactly +-delta erases.
inline CorrDecision correlate_complex(const RealSignal& y_block, const RealSignal& row, double delta_th) {
    if (y_block.size() != row.size()) throw std::invalid_argument("correlate_complex: length mismatch");
    if (delta_th < 0.0) throw std::invalid_argument("correlate_complex: threshold must be nonnegative");
    double d = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) d += y_block[i] * row[i];
    if (d > delta_th) return CorrDecision::Bit1;
    if (d < -delta_th) return CorrDecision::Bit0;
    return CorrDecision::Erasure;
}

// Finite-field correlation against a T_o row. self_corr is the row's own
// correlation (1 or 2) and fixes which field value means bit 1.
inline int correlate_ff(const FfVector& w, const FfVector& row, int self_corr) {
    if (w.p() != 3 || row.p() != 3) throw std::invalid_argument("correlate_ff: vectors must be over GF(3)");
    if (self_corr != 1 && self_corr != 2) throw std::invalid_argument("correlate_ff: self correlation must be 1 or 2");
    std::uint8_t d = dot(w, row);
    if (d == 0) throw std::runtime_error("correlate_ff: zero correlation, symbol undecodable");
    if (self_corr == 1) return d == 1 ? 1 : 0;
    return d == 2 ? 1 : 0;
}

// The noiseless CFSP of a user block: every user's word through the 3ASK
// map, summed in the complex field. This is what the channel superimposes
// and differs from 3ASK applied to the FFSP.
inline RealSignal cfsp_of_user_block(const UserBlock& b, const EpCode& code) {
    RealSignal sum(code.m(), 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
        RealSignal x = f_f2c_3ask(f_b2q(b[j], code.pair(j)));
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i];
    }
    return sum;
}

// Exhaustive MAP over the 2^M candidate user blocks of an overloaded code.
// The candidate table holds the noiseless CFSP of every block; under AWGN
// with uniform priors this is minimum Euclidean distance. Ties break toward
// the lexicographically smallest block.
inline UserBlock map_detect_overload(const RealSignal& r_block, const EpCode& code,
                                     const std::vector<double>* priors = nullptr, double n0 = 1.0,
                                     double amplitude = 1.0) {
    const std::size_t M = code.pair_count();
    if (M > 20) throw std::invalid_argument("map_detect_overload: too many element pairs to enumerate (M > 20)");
    if (r_block.size() != code.m()) throw std::invalid_argument("map_detect_overload: block length mismatch");
    if (n0 <= 0.0) throw std::invalid_argument("map_detect_overload: n0 must be positive");
    const std::size_t count = std::size_t{1} << M;
    if (priors && priors->size() != count) throw std::invalid_argument("map_detect_overload: need one prior per block");

    UserBlock best;
    double best_score = -1e300;
    UserBlock b(M, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
        for (std::size_t j = 0; j < M; ++j) b[j] = (idx >> (M - 1 - j)) & 1;
        RealSignal x = cfsp_of_user_block(b, code);
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = r_block[i] - amplitude * x[i];
            d2 += d * d;
        }
        double score = -d2 / n0 + (priors ? std::log((*priors)[idx] + 1e-300) : 0.0);
        if (score > best_score) {
            best_score = score;
            best = b;
        }
    }
    return best;
}

} // namespace FFMA
