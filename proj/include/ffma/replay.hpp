#pragma once

// Golden-vector replay: each check rebuilds one of the reference
// walkthroughs from the library primitives and compares bit-exactly.

#include <sstream>
#include <string>
#include <vector>

#include "ffma/butterfly.hpp"
#include "ffma/channel_code.hpp"
#include "ffma/encoder.hpp"
#include "ffma/epcode.hpp"
#include "ffma/gf.hpp"
#include "ffma/modem.hpp"
#include "ffma/receiver.hpp"

namespace FFMA {

struct ExampleCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace replay_detail {

inline FfMatrix rm13_generator() {
    return FfMatrix::from_digit_rows(2, {"11111111", "00001111", "00110011", "01010101"});
}

inline EpCode to44_code() { return EpCode::ai_cwep_from_matrix(ternary_orthogonal(2)); }

inline void check(std::vector<std::string>& fails, bool ok, const std::string& what) {
    if (!ok) fails.push_back(what);
}

inline ExampleCheck finish(const std::string& name, std::vector<std::string>& fails) {
    ExampleCheck c;
    c.name = name;
    c.pass = fails.empty();
    if (fails.empty()) {
        c.detail = "ok";
    } else {
        std::ostringstream os;
        for (std::size_t i = 0; i < fails.size(); ++i) os << (i ? "; " : "") << fails[i];
        c.detail = os.str();
    }
    return c;
}

inline ExampleCheck scwep_4x8_pairs() {
    std::vector<std::string> fails;
    FfMatrix g = rm13_generator();
    EpCode code = EpCode::scwep_from_generator(g);
    check(fails, code.family() == EpFamily::SCwep, "family");
    check(fails, code.g_zero().is_zero(), "zero-word generator");
    check(fails, rank(g) == 4, "rank 4");
    check(fails, check_uspm(code) == UspmVerdict::Unique, "uniquely decodable");
    FfVector sel(2, {1, 1, 0, 0});
    check(fails, row_times(sel, g).digits() == "11110000", "row1+row2 = 11110000");
    check(fails, code.pair(0).one_word.digits() == "11111111", "C1");
    check(fails, code.pair(3).one_word.digits() == "01010101", "C4");
    return finish("S-CWEP pairs over GF(2^8) from the 4x8 generator", fails);
}

inline ExampleCheck ai_cwep_to44_pairs() {
    std::vector<std::string> fails;
    EpCode code = to44_code();
    const char* zero[] = {"2222", "1212", "1122", "2112"};
    const char* one[] = {"1111", "2121", "2211", "1221"};
    for (int j = 0; j < 4; ++j) {
        check(fails, code.pair(j).zero_word.digits() == zero[j], "C" + std::to_string(j + 1) + " zero word");
        check(fails, code.pair(j).one_word.digits() == one[j], "C" + std::to_string(j + 1) + " one word");
    }
    check(fails, code.family() == EpFamily::AiCwep, "family");
    check(fails, rank(code.g_one()) == 4, "rank 4");
    check(fails, check_uspm(code) == UspmVerdict::Unique, "uniquely decodable");
    check(fails, loading_factor(code).value() == 1.0, "loading factor 1");
    return finish("AI-CWEP pairs from T_o(4,4)", fails);
}

inline ExampleCheck scwep_16_12_pairs() {
    std::vector<std::string> fails;
    SystematicCode mc = example_code_16_12(2);
    EpCode code = EpCode::scwep_from_generator(mc.generator());
    const char* one_words[12] = {
        "1000000000001000", "0100000000000100", "0010000000000010", "0001000000000001",
        "0000100000000001", "0000010000001000", "0000001000000100", "0000000100000010",
        "0000000010000010", "0000000001000001", "0000000000101000", "0000000000010100"};
    for (int j = 0; j < 12; ++j)
        check(fails, code.pair(j).one_word.digits() == one_words[j], "C" + std::to_string(j + 1));
    check(fails, check_uspm(code) == UspmVerdict::Unique, "uniquely decodable");
    LoadingFactor eta = loading_factor(code);
    check(fails, eta.num == 3 && eta.den == 4, "loading factor 0.75");
    check(fails, classify_mode(code) == MaMode::FfCcma, "FF-CCMA classification");
    return finish("UD-S-CWEP pairs from the (16,12) code", fails);
}

inline ExampleCheck serial_chain_16_12() {
    std::vector<std::string> fails;
    EpCode code = to44_code();
    BitMatrix bits = BitMatrix::zeros(3, 3);
    const int b[3][3] = {{1, 1, 0}, {1, 0, 1}, {0, 0, 1}};
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) bits.set(j, k, b[j][k]);
    SerialEncoding enc = encode_serial(bits, code);
    check(fails, enc.element_sequences[0].digits() == "111111112222", "u1");
    check(fails, enc.element_sequences[1].digits() == "212112122121", "u2");
    check(fails, enc.element_sequences[2].digits() == "112211222211", "u3");
    check(fails, enc.ffsp_blocks[0].digits() == "1021" && enc.ffsp_blocks[1].digits() == "0112" &&
                     enc.ffsp_blocks[2].digits() == "0221",
          "w = (1021, 0112, 0221)");

    SystematicCode gc = example_code_16_12(3);
    std::vector<Codeword> words;
    for (int j = 0; j < 3; ++j) words.push_back(encode(gc, enc.element_sequences[j]));
    check(fails, words[0].symbols.digits() == "1111111122221111", "v1");
    check(fails, words[1].symbols.digits() == "2121121221210000", "v2");
    check(fails, words[2].symbols.digits() == "1122112222110102", "v3");
    Codeword v_sum = superpose(gc, words);
    check(fails, v_sum.symbols.digits() == "1021011202211210", "v_sum");

    FfVector w_seq(3, 12);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 4; ++i) w_seq.set(k * 4 + i, enc.ffsp_blocks[k][i]);
    check(fails, encode(gc, w_seq).symbols == v_sum.symbols, "encode(sum) equals sum of encodings");
    return finish("serial encoding through the (16,12) code over GF(3)", fails);
}

inline ExampleCheck overload_combination_table() {
    std::vector<std::string> fails;
    EpCode code = EpCode::ai_cwep_from_matrix(ternary_nonorthogonal_3x2());
    check(fails, code.family() == EpFamily::NoCwep, "family NO-CWEP");
    const char* zero[] = {"22", "12", "02"};
    const char* one[] = {"11", "21", "01"};
    for (int j = 0; j < 3; ++j) {
        check(fails, code.pair(j).zero_word.digits() == zero[j], "C" + std::to_string(j + 1) + " zero word");
        check(fails, code.pair(j).one_word.digits() == one[j], "C" + std::to_string(j + 1) + " one word");
    }
    LoadingFactor eta = loading_factor(code);
    check(fails, eta.num == 3 && eta.den == 2, "loading factor 1.5");
    check(fails, classify_mode(code) == MaMode::FfNoma, "FF-NOMA classification");
    check(fails, check_uspm(code) == UspmVerdict::Ambiguous, "not uniquely decodable");

    // all eight user blocks: FFSP and noiseless CFSP
    struct Row {
        const char* b;
        const char* w;
        double r0, r1;
    };
    const Row table[] = {{"000", "00", 0, -3}, {"100", "22", 2, -1}, {"010", "12", -2, -1}, {"001", "02", 0, -1},
                         {"111", "00", 0, 3},  {"011", "11", -2, 1}, {"101", "21", 2, 1},   {"110", "01", 0, 1}};
    for (const Row& row : table) {
        UserBlock b(3);
        for (int j = 0; j < 3; ++j) b[j] = static_cast<std::uint8_t>(row.b[j] - '0');
        FfVector w = ffsp_of_user_block(b, code);
        check(fails, w.digits() == row.w, std::string("FFSP of ") + row.b);
        double r[2] = {0.0, 0.0};
        for (int j = 0; j < 3; ++j) {
            RealSignal x = f_f2c_3ask(f_b2q(b[j], code.pair(j)));
            r[0] += x[0];
            r[1] += x[1];
        }
        check(fails, r[0] == row.r0 && r[1] == row.r1, std::string("CFSP of ") + row.b);
    }
    return finish("NO-CWEP combination table for T_no(3,2)", fails);
}

inline ExampleCheck ask3_demap_chain() {
    std::vector<std::string> fails;
    EpCode code = to44_code();
    BitMatrix bits = BitMatrix::zeros(3, 3);
    const int b[3][3] = {{1, 1, 0}, {1, 0, 1}, {0, 0, 1}};
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) bits.set(j, k, b[j][k]);
    SerialEncoding enc = encode_serial(bits, code);
    SystematicCode gc = example_code_16_12(3);

    const char* expected_x[3] = {"+1+1+1+1+1+1+1+1-1-1-1-1+1+1+1+1", "-1+1-1+1+1-1+1-1-1+1-1+1 0 0 0 0",
                                 "+1+1-1-1+1+1-1-1-1-1+1+1 0+1 0-1"};
    std::vector<RealSignal> signals;
    for (int j = 0; j < 3; ++j) {
        Codeword v = encode(gc, enc.element_sequences[j]);
        RealSignal x = f_f2c_3ask(v.symbols);
        std::ostringstream os;
        for (double s : x) os << (s > 0 ? "+1" : (s < 0 ? "-1" : " 0"));
        check(fails, os.str() == expected_x[j], "x" + std::to_string(j + 1));
        signals.push_back(std::move(x));
    }
    RealSignal r = gmac(signals, 0.0, 0);
    const double expected_r[16] = {1, 3, -1, 1, 3, 1, 1, -1, -3, -1, -1, 1, 1, 2, 1, 0};
    for (int n = 0; n < 16; ++n) check(fails, r[n] == expected_r[n], "r[" + std::to_string(n) + "]");

    CfspStats stats = cfsp_stats(3, CfspAlphabet::Ternary3Ask);
    const int omega_r[7] = {3, 2, 1, 0, -1, -2, -3};
    const int omega_v[7] = {0, 2, 1, 0, 2, 1, 0};
    for (int l = 0; l < 7; ++l) {
        check(fails, stats.omega_r[l] == omega_r[l], "Omega_r");
        check(fails, stats.omega_v[l] == omega_v[l], "Omega_v");
    }
    const char* expected_v = "1021011202211210";
    std::string v_hat;
    for (int n = 0; n < 16; ++n) v_hat += static_cast<char>('0' + f_c2f_hard(static_cast<int>(expected_r[n]), stats));
    check(fails, v_hat == expected_v, "v_hat");
    check(fails, v_hat.substr(0, 12) == "102101120221", "w_hat");
    return finish("3ASK transmission and C2F demapping, three users", fails);
}

inline ExampleCheck correlation_decoding() {
    std::vector<std::string> fails;
    EpCode code = to44_code();
    const double r_inf[3][4] = {{1, 3, -1, 1}, {3, 1, 1, -1}, {-3, -1, -1, 1}};
    const int expected_bits[3][3] = {{1, 1, 0}, {1, 0, 1}, {0, 0, 1}};
    const double expected_dots[3][3] = {{4, 4, -4}, {4, -4, 4}, {-4, -4, 4}};

    for (int j = 0; j < 3; ++j) {
        RealSignal row = f_f2c_bpsk(code.g_one().row(j));
        for (int k = 0; k < 3; ++k) {
            RealSignal y(r_inf[k], r_inf[k] + 4);
            double d = 0.0;
            for (int i = 0; i < 4; ++i) d += y[i] * row[i];
            check(fails, d == expected_dots[j][k], "dot user " + std::to_string(j + 1));
            CorrDecision dec = correlate_complex(y, row, 0.0);
            int bit = dec == CorrDecision::Bit1 ? 1 : 0;
            check(fails, bit == expected_bits[j][k], "complex bit user " + std::to_string(j + 1));
        }
    }

    const char* w_blocks[3] = {"1021", "0112", "0221"};
    const int expected_ff[3][3] = {{1, 1, 2}, {1, 2, 1}, {2, 2, 1}};
    for (int j = 0; j < 3; ++j) {
        FfVector row = code.g_one().row(j);
        int self_corr = dot(row, row);
        check(fails, self_corr == 1, "T_o(4,4) self correlation 1");
        for (int k = 0; k < 3; ++k) {
            FfVector w = FfVector::from_digits(3, w_blocks[k]);
            check(fails, dot(w, row) == expected_ff[j][k], "field dot");
            int bit = correlate_ff(w, row, self_corr);
            check(fails, bit == expected_bits[j][k], "field bit user " + std::to_string(j + 1));
        }
    }
    return finish("complex- and finite-field correlation decoding", fails);
}

inline ExampleCheck butterfly_gf9() {
    std::vector<std::string> fails;
    OverloadNetworkCode code = butterfly_code(NetworkCodeKind::NoCwepGf9);
    ButterflyEncoding enc = butterfly_encode({0, 0, 0}, code);
    check(fails, enc.u[0].digits() == "22" && enc.u[1].digits() == "12" && enc.u[2].digits() == "02", "u for (000)");
    check(fails, enc.w.digits() == "00", "w = (00)");
    auto msg = destination_decode(0, enc.u[0], enc.w, code);
    check(fails, msg == std::array<int, 3>{0, 0, 0}, "D1 decodes (000)");
    ButterflyEncoding ones = butterfly_encode({1, 1, 1}, code);
    check(fails, ones.u[0].digits() == "11" && ones.u[1].digits() == "21" && ones.u[2].digits() == "01", "u for (111)");
    check(fails, ones.w.digits() == "00", "w = (00) for (111)");
    for (const auto& trace : butterfly_trace_all(code))
        for (int d = 0; d < 3; ++d)
            check(fails, trace.decodes[d] == trace.message, "all destinations recover all messages");
    return finish("Butterfly walkthrough (NO-CWEP over GF(3^2))", fails);
}

inline ExampleCheck butterfly_gf7() {
    std::vector<std::string> fails;
    OverloadNetworkCode code = butterfly_code(NetworkCodeKind::AiepGf7);
    ButterflyEncoding enc = butterfly_encode({0, 0, 0}, code);
    check(fails, enc.u[0][0] == 1 && enc.u[1][0] == 2 && enc.u[2][0] == 4, "u = (1, 2, 4)");
    check(fails, enc.w[0] == 0, "w = (0)_7");
    auto msg = destination_decode(0, enc.u[0], enc.w, code);
    check(fails, msg == std::array<int, 3>{0, 0, 0}, "D1 decodes (000)");
    for (const auto& trace : butterfly_trace_all(code))
        for (int d = 0; d < 3; ++d)
            check(fails, trace.decodes[d] == trace.message, "all destinations recover all messages");
    return finish("Butterfly walkthrough (AI-EP over GF(7))", fails);
}

} // namespace replay_detail

inline std::vector<ExampleCheck> replay_examples() {
    return {replay_detail::scwep_4x8_pairs(),
            replay_detail::ai_cwep_to44_pairs(),
            replay_detail::scwep_16_12_pairs(),
            replay_detail::serial_chain_16_12(),
            replay_detail::overload_combination_table(),
            replay_detail::ask3_demap_chain(),
            replay_detail::correlation_decoding(),
            replay_detail::butterfly_gf9(),
            replay_detail::butterfly_gf7()};
}

} // namespace FFMA
