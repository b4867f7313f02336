#pragma once

// EP encoding in both input modes plus the frame bookkeeping that places
// J users x K bits onto the T data blocks of a systematic channel code.
// Serial mode: one bit per user per block, all M pairs live in the same
// block. Parallel mode: a user owns K consecutive pairs inside one block.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/epcode.hpp"
#include "ffma/gf.hpp"

namespace FFMA {

using UserBlock = std::vector<std::uint8_t>; // M bits, one per element pair

// J x K bit matrix, one row per user.
struct BitMatrix {
    std::size_t users = 0;
    std::size_t bits_per_user = 0;
    std::vector<std::uint8_t> bits; // row-major

    std::uint8_t at(std::size_t j, std::size_t k) const { return bits[j * bits_per_user + k]; }
    void set(std::size_t j, std::size_t k, int b) { bits[j * bits_per_user + k] = static_cast<std::uint8_t>(b & 1); }

    static BitMatrix zeros(std::size_t users, std::size_t bits_per_user) {
        return BitMatrix{users, bits_per_user, std::vector<std::uint8_t>(users * bits_per_user, 0)};
    }

    // "J K" header then J rows of 0/1 digits.
    static BitMatrix from_text(const std::string& text) {
        std::istringstream is(text);
        std::size_t j = 0, k = 0;
        if (!(is >> j >> k) || j == 0 || k == 0) throw std::invalid_argument("bit matrix: bad 'J K' header");
        BitMatrix m = zeros(j, k);
        for (std::size_t r = 0; r < j; ++r)
            for (std::size_t c = 0; c < k; ++c) {
                int b = 0;
                if (!(is >> b) || (b != 0 && b != 1)) throw std::invalid_argument("bit matrix: entries must be 0/1");
                m.set(r, c, b);
            }
        return m;
    }
};

inline FfVector f_b2q(int bit, const ElementPair& pair) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("f_b2q: bit must be 0 or 1");
    return bit ? pair.one_word : pair.zero_word;
}

// w = b * G1 + complement(b) * G0 over GF(p).
inline FfVector ffsp_of_user_block(const UserBlock& b, const EpCode& code) {
    if (b.size() != code.pair_count())
        throw std::invalid_argument("ffsp_of_user_block: expected " + std::to_string(code.pair_count()) + " bits, got " +
                                    std::to_string(b.size()));
    FfVector w(code.p(), code.m());
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] > 1) throw std::invalid_argument("ffsp_of_user_block: bits must be 0/1");
        const FfMatrix& g = b[j] ? code.g_one() : code.g_zero();
        for (std::size_t i = 0; i < code.m(); ++i) w.set(i, w[i] + g.at(j, i));
    }
    return w;
}

struct SerialEncoding {
    std::vector<FfVector> element_sequences; // per user, length m*K
    std::vector<FfVector> ffsp_blocks;       // K blocks of length m
};

// User j holds pair j and contributes one word per block; the FFSP of block k
// is the mod-p sum over users.
inline SerialEncoding encode_serial(const BitMatrix& bits, const EpCode& code) {
    const std::size_t users = bits.users, K = bits.bits_per_user, m = code.m();
    if (users > code.pair_count())
        throw std::invalid_argument("encode_serial: " + std::to_string(users) + " users exceed " +
                                    std::to_string(code.pair_count()) + " element pairs");
    SerialEncoding out;
    out.element_sequences.assign(users, FfVector(code.p(), m * K));
    out.ffsp_blocks.assign(K, FfVector(code.p(), m));
    for (std::size_t j = 0; j < users; ++j) {
        ElementPair pair = code.pair(j);
        for (std::size_t k = 0; k < K; ++k) {
            FfVector word = f_b2q(bits.at(j, k), pair);
            for (std::size_t i = 0; i < m; ++i) {
                out.element_sequences[j].set(k * m + i, word[i]);
                out.ffsp_blocks[k].set(i, out.ffsp_blocks[k][i] + word[i]);
            }
        }
    }
    return out;
}

struct ParallelEncoding {
    std::vector<FfVector> user_words; // per user, the m-tuple sum of its K words
    FfVector ffsp;                    // single block of length m
};

// User j owns pairs (j-1)K .. (j-1)K + K-1 and sums its K transformed words
// into one m-tuple; the block FFSP is the sum over users.
inline ParallelEncoding encode_parallel(const BitMatrix& bits, const EpCode& code) {
    const std::size_t users = bits.users, K = bits.bits_per_user, m = code.m();
    if (users * K > code.pair_count())
        throw std::invalid_argument("encode_parallel: " + std::to_string(users) + " users x " + std::to_string(K) +
                                    " bits exceed " + std::to_string(code.pair_count()) + " element pairs");
    ParallelEncoding out{std::vector<FfVector>(), FfVector(code.p(), m)};
    out.user_words.assign(users, FfVector(code.p(), m));
    for (std::size_t j = 0; j < users; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
            FfVector word = f_b2q(bits.at(j, k), code.pair(j * K + k));
            for (std::size_t i = 0; i < m; ++i) out.user_words[j].set(i, out.user_words[j][i] + word[i]);
        }
        for (std::size_t i = 0; i < m; ++i) out.ffsp.set(i, out.ffsp[i] + out.user_words[j][i]);
    }
    return out;
}

enum class EpMode { Serial, Parallel };

inline std::string to_string(EpMode m) { return m == EpMode::Serial ? "serial" : "parallel"; }

// Where each of a user's K bits lives: bit k sits in data block
// block_of_bit[k] and uses element pair ep_of_bit[k].
struct UserSlot {
    std::vector<int> block_of_bit;
    std::vector<int> ep_of_bit;
};

struct FrameLayout {
    int data_blocks = 0; // T
    int m = 0;
    int pair_count = 0; // M
    int bits_per_user = 0; // K
    int users = 0; // J
    EpMode mode = EpMode::Serial;
    std::vector<UserSlot> slots;
};

// Greedy placement into lowest-index blocks. Serial groups of M users share K
// consecutive blocks; parallel packs floor(M/K) users per block.
inline FrameLayout plan_frame(int M, int m, int T, int K, int J, EpMode mode) {
    if (M <= 0 || m <= 0 || T <= 0 || K <= 0 || J <= 0) throw std::invalid_argument("plan_frame: parameters must be positive");
    FrameLayout layout{T, m, M, K, J, mode, {}};
    if (mode == EpMode::Serial) {
        if (K > T) throw std::invalid_argument("plan_frame: serial mode needs K <= T");
        int groups = T / K;
        long long capacity = static_cast<long long>(M) * groups;
        if (J > capacity)
            throw std::invalid_argument("plan_frame: capacity exceeded, J = " + std::to_string(J) + " > M*T/K = " +
                                        std::to_string(static_cast<long long>(M) * T / K));
        for (int j = 0; j < J; ++j) {
            int group = j / M, idx = j % M;
            UserSlot slot;
            for (int k = 0; k < K; ++k) {
                slot.block_of_bit.push_back(group * K + k);
                slot.ep_of_bit.push_back(idx);
            }
            layout.slots.push_back(std::move(slot));
        }
    } else {
        if (K > M) throw std::invalid_argument("plan_frame: parallel mode needs K <= M");
        int per_block = M / K;
        long long capacity = static_cast<long long>(per_block) * T;
        if (J > capacity)
            throw std::invalid_argument("plan_frame: capacity exceeded, J = " + std::to_string(J) + " > (M/K)*T = " +
                                        std::to_string(capacity));
        for (int j = 0; j < J; ++j) {
            int block = j / per_block, pos = j % per_block;
            UserSlot slot;
            for (int k = 0; k < K; ++k) {
                slot.block_of_bit.push_back(block);
                slot.ep_of_bit.push_back(pos * K + k);
            }
            layout.slots.push_back(std::move(slot));
        }
    }
    return layout;
}

// The user's words accumulated over the full mT-symbol information section.
inline FfVector place_user_info(const FrameLayout& layout, const EpCode& code, const BitMatrix& bits, std::size_t j) {
    FfVector info(code.p(), static_cast<std::size_t>(layout.m) * layout.data_blocks);
    const UserSlot& slot = layout.slots[j];
    for (int k = 0; k < layout.bits_per_user; ++k) {
        FfVector word = f_b2q(bits.at(j, k), code.pair(slot.ep_of_bit[k]));
        std::size_t base = static_cast<std::size_t>(slot.block_of_bit[k]) * layout.m;
        for (std::size_t i = 0; i < word.size(); ++i) info.set(base + i, info[base + i] + word[i]);
    }
    return info;
}

} // namespace FFMA
