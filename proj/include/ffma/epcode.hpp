#pragma once

// Element-pair (EP) codes: each of the M pairs assigns a user's 0-bit and
// 1-bit to two distinct m-tuples over GF(p). The family is derived from the
// structure of the two stacked generator matrices, never declared by the
// caller:
//   S-CWEP      zero matrix paired with an arbitrary full-rank-or-not G over GF(2)
//   ORTHO-UDEP  degenerate S-CWEP whose one-word matrix is the identity
//   AI-CWEP     GF(3), zero/one words are additive inverses, G square orthogonal
//   NO-CWEP     GF(3), additive-inverse rows with M > m (overloaded)

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/gf.hpp"

namespace FFMA {

enum class EpFamily { SCwep, AiCwep, NoCwep, OrthoUdep };

inline std::string to_string(EpFamily f) {
    switch (f) {
        case EpFamily::SCwep: return "S-CWEP";
        case EpFamily::AiCwep: return "AI-CWEP";
        case EpFamily::NoCwep: return "NO-CWEP";
        case EpFamily::OrthoUdep: return "ORTHO-UDEP";
    }
    throw std::logic_error("bad family");
}

inline EpFamily ep_family_from_string(const std::string& s) {
    if (s == "S-CWEP") return EpFamily::SCwep;
    if (s == "AI-CWEP") return EpFamily::AiCwep;
    if (s == "NO-CWEP") return EpFamily::NoCwep;
    if (s == "ORTHO-UDEP") return EpFamily::OrthoUdep;
    throw std::invalid_argument("unknown EP family '" + s + "'");
}

struct ElementPair {
    FfVector zero_word; // transmitted for bit 0
    FfVector one_word;  // transmitted for bit 1
};

// kappa-fold Kronecker power of [[1,1],[2,1]] over GF(3); a 2^kappa square
// matrix whose Gram is I or 2I depending on kappa's parity.
inline FfMatrix ternary_orthogonal(int kappa) {
    if (kappa < 1) throw std::invalid_argument("ternary_orthogonal: kappa must be >= 1");
    FfMatrix base = FfMatrix::from_digit_rows(3, {"11", "21"});
    FfMatrix t = base;
    for (int k = 1; k < kappa; ++k) t = kronecker(base, t);
    return t;
}

// The 3x2 overload matrix: the 2x2 orthogonal block extended by (0,1).
inline FfMatrix ternary_nonorthogonal_3x2() { return FfMatrix::from_digit_rows(3, {"11", "21", "01"}); }

inline bool is_ternary_orthogonal(const FfMatrix& t) {
    if (t.p() != 3 || t.rows() != t.cols()) return false;
    FfMatrix gram = t * t.transpose();
    std::uint8_t d = gram.at(0, 0);
    if (d != 1 && d != 2) return false;
    for (std::size_t i = 0; i < gram.rows(); ++i)
        for (std::size_t j = 0; j < gram.cols(); ++j)
            if (gram.at(i, j) != (i == j ? d : 0)) return false;
    return true;
}

class EpCode {
public:
    // Pairs (0, row_j) from a GF(2) generator; identity yields ORTHO-UDEP.
    static EpCode scwep_from_generator(const FfMatrix& g) {
        if (g.p() != 2) throw std::invalid_argument("scwep_from_generator: matrix must be over GF(2)");
        EpFamily fam = (g.rows() == g.cols() && g == FfMatrix::identity(2, g.rows())) ? EpFamily::OrthoUdep
                                                                                      : EpFamily::SCwep;
        return EpCode(fam, FfMatrix(2, g.rows(), g.cols()), g);
    }

    // Pairs (2*row_j, row_j) from a GF(3) matrix; orthogonal square input
    // gives AI-CWEP, anything else the overloaded NO-CWEP family.
    static EpCode ai_cwep_from_matrix(const FfMatrix& t) {
        if (t.p() != 3) throw std::invalid_argument("ai_cwep_from_matrix: matrix must be over GF(3)");
        EpFamily fam = is_ternary_orthogonal(t) ? EpFamily::AiCwep : EpFamily::NoCwep;
        return EpCode(fam, scale(2, t), t);
    }

    int p() const { return g_one_.p(); }
    std::size_t m() const { return g_one_.cols(); }
    std::size_t pair_count() const { return g_one_.rows(); }
    EpFamily family() const { return family_; }
    const FfMatrix& g_zero() const { return g_zero_; }
    const FfMatrix& g_one() const { return g_one_; }

    ElementPair pair(std::size_t j) const {
        if (j >= pair_count()) throw std::invalid_argument("pair index out of range");
        return ElementPair{g_zero_.row(j), g_one_.row(j)};
    }

private:
    EpCode(EpFamily family, FfMatrix g_zero, FfMatrix g_one)
        : family_(family), g_zero_(std::move(g_zero)), g_one_(std::move(g_one)) {
        for (std::size_t j = 0; j < g_one_.rows(); ++j)
            if (g_zero_.row(j) == g_one_.row(j))
                throw std::invalid_argument("element pair " + std::to_string(j + 1) + " has identical words");
    }

    EpFamily family_;
    FfMatrix g_zero_;
    FfMatrix g_one_;
};

enum class UspmVerdict { Unique, Ambiguous };

// Full row rank of the one-word generator certifies a one-to-one map between
// user blocks and sum patterns; for additive-inverse codes the same rank
// condition covers every matrix in the generator-matrix set.
inline UspmVerdict check_uspm(const EpCode& code) {
    return rank(code.g_one()) == code.pair_count() ? UspmVerdict::Unique : UspmVerdict::Ambiguous;
}

struct LoadingFactor {
    int num; // M
    int den; // m
    double value() const { return static_cast<double>(num) / den; }
};

inline LoadingFactor loading_factor(const EpCode& code) {
    int m = static_cast<int>(code.pair_count());
    int d = static_cast<int>(code.m());
    int g = std::gcd(m, d);
    return LoadingFactor{m / g, d / g};
}

enum class MaMode { FfCcma, Orthogonal, FfNoma };

inline std::string to_string(MaMode m) {
    switch (m) {
        case MaMode::FfCcma: return "FF-CCMA";
        case MaMode::Orthogonal: return "FF-TDMA/FF-CDMA";
        case MaMode::FfNoma: return "FF-NOMA";
    }
    throw std::logic_error("bad mode");
}

inline MaMode classify_mode(const EpCode& code) {
    LoadingFactor eta = loading_factor(code);
    if (eta.num < eta.den) return MaMode::FfCcma;
    if (eta.num == eta.den) return MaMode::Orthogonal;
    return MaMode::FfNoma;
}

// Codebook text format: "family p m M" header, then the zero- and one-word
// generator matrices in the gf text format.
inline std::string export_codebook(const EpCode& code) {
    std::ostringstream os;
    os << to_string(code.family()) << ' ' << code.p() << ' ' << code.m() << ' ' << code.pair_count() << '\n';
    os << to_text(code.g_zero());
    os << to_text(code.g_one());
    return os.str();
}

inline EpCode import_codebook(std::istream& in) {
    std::string family_str;
    int p = 0;
    std::size_t m = 0, pairs = 0;
    if (!(in >> family_str >> p >> m >> pairs)) throw std::invalid_argument("codebook: bad header");
    EpFamily family = ep_family_from_string(family_str);
    FfMatrix g_zero = matrix_from_stream(in);
    FfMatrix g_one = matrix_from_stream(in);
    if (g_zero.p() != p || g_one.p() != p || g_zero.rows() != pairs || g_one.rows() != pairs || g_zero.cols() != m ||
        g_one.cols() != m)
        throw std::invalid_argument("codebook: matrices do not match header");
    EpCode code = (family == EpFamily::SCwep || family == EpFamily::OrthoUdep) ? EpCode::scwep_from_generator(g_one)
                                                                               : EpCode::ai_cwep_from_matrix(g_one);
    if (code.family() != family)
        throw std::invalid_argument("codebook: declared family " + family_str + " does not match structure (" +
                                    to_string(code.family()) + ")");
    if (code.g_zero() != g_zero) throw std::invalid_argument("codebook: zero-word matrix is not structural");
    return code;
}

inline EpCode import_codebook(const std::string& text) {
    std::istringstream is(text);
    return import_codebook(is);
}

} // namespace FFMA
