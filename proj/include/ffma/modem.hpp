#pragma once

// Finite-field to complex-field transforms, polarization-adjusted power
// allocation, and the Gaussian multiple-access channel. Signals are real
// baseband samples in units of sqrt(energy).

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/gf.hpp"

namespace FFMA {

using RealSignal = std::vector<double>;

// 3ASK: 1 -> +1, 0 -> 0, 2 -> -1.
inline RealSignal f_f2c_3ask(const FfVector& v) {
    if (v.p() != 3) throw std::invalid_argument("f_f2c_3ask: vector must be over GF(3)");
    RealSignal x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] == 1 ? 1.0 : (v[i] == 2 ? -1.0 : 0.0);
    return x;
}

// Degenerate 3ASK on a zero-free vector: 1 -> +1, 2 -> -1.
inline RealSignal f_f2c_bpsk(const FfVector& v) {
    if (v.p() != 3) throw std::invalid_argument("f_f2c_bpsk: vector must be over GF(3)");
    RealSignal x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) throw std::invalid_argument("f_f2c_bpsk: zero symbol at position " + std::to_string(i));
        x[i] = v[i] == 1 ? 1.0 : -1.0;
    }
    return x;
}

struct Pav {
    std::vector<double> mu; // one weight per symbol
    double p_avg = 1.0;
};

enum class PavMode { Td, CcMipParallel, CcMipSerial, CcMbipParallel, CcMbipSerial };

struct PavParams {
    int M = 0;    // element pairs / info symbols of the multiuser code
    int K = 0;    // bits per user
    int Q = 0;    // multiuser-code parity length, m - M
    int m = 0;    // block length
    int K_gc = 0; // channel-code information length, mT
    int R = 0;    // channel-code parity length
    int N = 0;    // channel-code length
};

struct RegularPav {
    double mu1 = 0.0;  // info symbols
    double mu2 = 0.0;  // multiuser-code parity symbols
    double mu_c = 0.0; // channel-code parity symbols (coded modes only)
    bool has_channel_code = false;
    double rescale = 1.0; // factor applied so C1/C2 hold exactly
};

// Regular PAV formulas. The serial-mode variants do not satisfy the power
// constraint identically for all K, so the raw allocation is rescaled by a
// common factor and the factor is reported.
inline RegularPav pav_regular(PavMode mode, const PavParams& prm) {
    if (prm.K <= 0 || prm.m <= 0) throw std::invalid_argument("pav_regular: K and m must be positive");
    if (prm.K > prm.M && prm.M > 0) throw std::invalid_argument("pav_regular: K must not exceed M");
    RegularPav out;
    switch (mode) {
        case PavMode::Td:
            out = {static_cast<double>(prm.M) / prm.K, 1.0, 0.0, false, 1.0};
            break;
        case PavMode::CcMipParallel:
            out = {static_cast<double>(prm.K_gc - prm.Q) / prm.K, 1.0, 1.0, true, 1.0};
            break;
        case PavMode::CcMipSerial:
            out = {static_cast<double>(prm.K_gc - static_cast<long long>(prm.K) * prm.Q) / prm.K, 1.0, 1.0, true, 1.0};
            break;
        case PavMode::CcMbipParallel:
            out = {static_cast<double>(prm.M) * prm.K_gc / (static_cast<double>(prm.K) * prm.m),
                   static_cast<double>(prm.K_gc) / prm.m, 1.0, true, 1.0};
            break;
        case PavMode::CcMbipSerial:
            out = {static_cast<double>(prm.M) * prm.K_gc / (static_cast<double>(prm.K) * prm.m),
                   static_cast<double>(prm.K_gc) / (static_cast<double>(prm.K) * prm.m), 1.0, true, 1.0};
            break;
    }
    if (out.mu1 <= 0.0 || out.mu2 < 0.0)
        throw std::invalid_argument("pav_regular: nonpositive allocation; check K, Q and K_gc");
    double total = prm.K * out.mu1 + prm.Q * out.mu2 + (out.has_channel_code ? prm.R * out.mu_c : 0.0);
    double budget = out.has_channel_code ? prm.N : prm.m;
    if (total <= 0.0) throw std::invalid_argument("pav_regular: zero total allocation");
    out.rescale = budget / total;
    out.mu1 *= out.rescale;
    out.mu2 *= out.rescale;
    out.mu_c *= out.rescale;
    return out;
}

// Symbol-level view of one user's occupied positions: K information
// symbols, Q multiuser-code parity symbols, and (coded modes) R channel
// parity symbols. The weights sum to the power budget exactly.
inline Pav expand_regular_pav(const RegularPav& reg, int k_bits, int q_parity, int r_channel_parity) {
    if (k_bits < 0 || q_parity < 0 || r_channel_parity < 0)
        throw std::invalid_argument("expand_regular_pav: negative section length");
    Pav pav;
    pav.mu.reserve(static_cast<std::size_t>(k_bits) + q_parity + r_channel_parity);
    for (int i = 0; i < k_bits; ++i) pav.mu.push_back(reg.mu1);
    for (int i = 0; i < q_parity; ++i) pav.mu.push_back(reg.mu2);
    if (reg.has_channel_code)
        for (int i = 0; i < r_channel_parity; ++i) pav.mu.push_back(reg.mu_c);
    else if (r_channel_parity != 0)
        throw std::invalid_argument("expand_regular_pav: uncoded PAV cannot cover channel parity");
    return pav;
}

inline RealSignal apply_pav(const RealSignal& x, const Pav& pav) {
    if (x.size() != pav.mu.size()) throw std::invalid_argument("apply_pav: signal/PAV length mismatch");
    RealSignal out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::sqrt(pav.mu[i] * pav.p_avg) * x[i];
    return out;
}

// splitmix64; used to derive independent per-frame noise streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class GaussianNoise {
public:
    explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}

    double sample(double variance) {
        // Box-Muller, one sample per call; the spare is kept.
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * std::sqrt(variance);
        }
        double u1 = 0.0;
        do {
            u1 = uniform_(rng_);
        } while (u1 <= 0.0);
        double u2 = uniform_(rng_);
        constexpr double two_pi = 6.283185307179586476925286766559;
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2) * std::sqrt(variance);
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// y = sum_j x_j + AWGN(N0/2), reproducible per seed.
inline RealSignal gmac(const std::vector<RealSignal>& signals, double n0, std::uint64_t seed) {
    if (signals.empty()) throw std::invalid_argument("gmac: no input signals");
    const std::size_t n = signals[0].size();
    for (const auto& s : signals)
        if (s.size() != n) throw std::invalid_argument("gmac: signal lengths differ");
    RealSignal y(n, 0.0);
    for (const auto& s : signals)
        for (std::size_t i = 0; i < n; ++i) y[i] += s[i];
    if (n0 > 0.0) {
        GaussianNoise noise(seed);
        for (std::size_t i = 0; i < n; ++i) y[i] += noise.sample(n0 / 2.0);
    }
    return y;
}

inline std::string signal_to_csv(const RealSignal& x) {
    std::ostringstream os;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) os << ',';
        os << x[i];
    }
    return os.str();
}

} // namespace FFMA
