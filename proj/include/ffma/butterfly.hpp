#pragma once

// Network FFMA on the 3-dimensional butterfly: three source nodes map one
// bit each through an overloaded additive-inverse code, the relay forms the
// finite-field sum pattern, and every destination recovers the full 3-bit
// message from the sum plus its own source symbol.

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/encoder.hpp"
#include "ffma/epcode.hpp"
#include "ffma/gf.hpp"

namespace FFMA {

enum class NetworkCodeKind { NoCwepGf9, AiepGf7 };

struct OverloadNetworkCode {
    NetworkCodeKind kind;
    std::array<ElementPair, 3> pairs;
    int p() const { return pairs[0].one_word.p(); }
    std::size_t word_len() const { return pairs[0].one_word.size(); }
};

// GF(3^2) code: the rows of the 3x2 non-orthogonal matrix and their additive
// inverses. GF(7) code: pairs (1,6), (2,5) and (4,3); the third pair follows
// the worked network example, which sends 4 for bit 0.
inline OverloadNetworkCode butterfly_code(NetworkCodeKind kind) {
    if (kind == NetworkCodeKind::NoCwepGf9) {
        EpCode code = EpCode::ai_cwep_from_matrix(ternary_nonorthogonal_3x2());
        return OverloadNetworkCode{kind, {code.pair(0), code.pair(1), code.pair(2)}};
    }
    auto scalar_pair = [](int zero, int one) {
        return ElementPair{FfVector(7, {zero}), FfVector(7, {one})};
    };
    return OverloadNetworkCode{kind, {scalar_pair(1, 6), scalar_pair(2, 5), scalar_pair(4, 3)}};
}

struct ButterflyEncoding {
    std::array<FfVector, 3> u; // per-source symbols
    FfVector w;                // relay FFSP
};

inline ButterflyEncoding butterfly_encode(const std::array<int, 3>& bits, const OverloadNetworkCode& code) {
    for (int b : bits)
        if (b != 0 && b != 1) throw std::invalid_argument("butterfly_encode: bits must be 0/1");
    ButterflyEncoding enc{{f_b2q(bits[0], code.pairs[0]), f_b2q(bits[1], code.pairs[1]), f_b2q(bits[2], code.pairs[2])},
                          FfVector(code.p(), code.word_len())};
    for (const auto& u : enc.u)
        for (std::size_t i = 0; i < u.size(); ++i) enc.w.set(i, enc.w[i] + u[i]);
    return enc;
}

// All 3-bit messages whose encoding is consistent with both the relay sum
// and destination j's own symbol. Decodable codes yield exactly one.
inline std::vector<std::array<int, 3>> consistent_messages(int destination, const FfVector& u_j, const FfVector& w,
                                                           const OverloadNetworkCode& code) {
    if (destination < 0 || destination > 2) throw std::invalid_argument("destination index must be 0..2");
    std::vector<std::array<int, 3>> hits;
    for (int idx = 0; idx < 8; ++idx) {
        std::array<int, 3> msg{(idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
        ButterflyEncoding enc = butterfly_encode(msg, code);
        if (enc.u[destination] == u_j && enc.w == w) hits.push_back(msg);
    }
    return hits;
}

inline std::array<int, 3> destination_decode(int destination, const FfVector& u_j, const FfVector& w,
                                             const OverloadNetworkCode& code) {
    auto hits = consistent_messages(destination, u_j, w, code);
    if (hits.empty()) throw std::runtime_error("destination_decode: no consistent message (corrupted inputs)");
    if (hits.size() > 1) throw std::runtime_error("destination_decode: ambiguous message; code is not decodable");
    return hits[0];
}

struct ButterflyTrace {
    std::array<int, 3> message;
    ButterflyEncoding encoding;
    std::array<std::array<int, 3>, 3> decodes;
};

inline std::vector<ButterflyTrace> butterfly_trace_all(const OverloadNetworkCode& code) {
    std::vector<ButterflyTrace> out;
    for (int idx = 0; idx < 8; ++idx) {
        std::array<int, 3> msg{(idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
        ButterflyEncoding enc = butterfly_encode(msg, code);
        ButterflyTrace trace{msg, enc, {}};
        for (int d = 0; d < 3; ++d) trace.decodes[d] = destination_decode(d, enc.u[d], enc.w, code);
        out.push_back(std::move(trace));
    }
    return out;
}

inline std::string butterfly_trace_table(const OverloadNetworkCode& code) {
    std::ostringstream os;
    os << "message  u1  u2  u3  w   D1 D2 D3\n";
    for (const auto& t : butterfly_trace_all(code)) {
        os << t.message[0] << t.message[1] << t.message[2] << "      ";
        for (const auto& u : t.encoding.u) os << "  " << u.digits();
        os << "  " << t.encoding.w.digits() << " ";
        for (const auto& d : t.decodes) os << "  " << d[0] << d[1] << d[2];
        os << '\n';
    }
    return os.str();
}

} // namespace FFMA
