#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ffma/channel_code.hpp"
#include "ffma/encoder.hpp"
#include "ffma/epcode.hpp"

using namespace FFMA;

namespace {

EpCode example2_code() { return EpCode::ai_cwep_from_matrix(ternary_orthogonal(2)); }
EpCode example6_code() { return EpCode::ai_cwep_from_matrix(ternary_nonorthogonal_3x2()); }

BitMatrix bits_from(std::initializer_list<std::initializer_list<int>> rows) {
    std::size_t j = rows.size(), k = rows.begin()->size();
    BitMatrix m = BitMatrix::zeros(j, k);
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (int b : row) m.set(r, c++, b);
        ++r;
    }
    return m;
}

} // namespace

TEST_CASE("switching function picks the pair words", "[encoder]") {
    EpCode code = example2_code();
    CHECK(f_b2q(0, code.pair(0)).digits() == "2222");
    CHECK(f_b2q(1, code.pair(0)).digits() == "1111");
    CHECK(f_b2q(1, example6_code().pair(2)).digits() == "01");
    CHECK_THROWS_AS(f_b2q(2, code.pair(0)), std::invalid_argument);
}

TEST_CASE("ffsp of a user block", "[encoder]") {
    EpCode scwep = EpCode::scwep_from_generator(example_code_16_12(2).generator());
    CHECK(ffsp_of_user_block(UserBlock(12, 0), scwep).is_zero());

    EpCode no = example6_code();
    CHECK(ffsp_of_user_block({1, 1, 0}, no).digits() == "01");
    CHECK(ffsp_of_user_block({0, 0, 0}, no).digits() == "00");
    CHECK_THROWS_AS(ffsp_of_user_block({1, 0}, no), std::invalid_argument);
}

TEST_CASE("serial encoding reproduces the worked walkthrough", "[encoder]") {
    SerialEncoding enc = encode_serial(bits_from({{1, 1, 0}, {1, 0, 1}, {0, 0, 1}}), example2_code());
    CHECK(enc.element_sequences[0].digits() == "111111112222");
    CHECK(enc.element_sequences[1].digits() == "212112122121");
    CHECK(enc.element_sequences[2].digits() == "112211222211");
    REQUIRE(enc.ffsp_blocks.size() == 3);
    CHECK(enc.ffsp_blocks[0].digits() == "1021");
    CHECK(enc.ffsp_blocks[1].digits() == "0112");
    CHECK(enc.ffsp_blocks[2].digits() == "0221");
}

TEST_CASE("serial encoding edge cases", "[encoder]") {
    SECTION("single user: the sum pattern is the user's own sequence") {
        EpCode code = EpCode::scwep_from_generator(FfMatrix::identity(2, 2));
        SerialEncoding enc = encode_serial(bits_from({{1, 1, 1}}), code);
        for (int k = 0; k < 3; ++k) CHECK(enc.ffsp_blocks[k] == enc.element_sequences[0].subvector(2 * k, 2));
    }
    SECTION("all-zero bits with every pair engaged sum the zero-word rows") {
        SerialEncoding enc = encode_serial(bits_from({{0}, {0}, {0}, {0}}), example2_code());
        CHECK(enc.ffsp_blocks[0].digits() == "0002"); // column sums of 2*T_o(4,4)
    }
    SECTION("too many users") {
        CHECK_THROWS_AS(encode_serial(BitMatrix::zeros(5, 1), example2_code()), std::invalid_argument);
    }
    SECTION("block sums always match the returned element sequences") {
        std::mt19937_64 rng(5);
        EpCode code = example2_code();
        for (int trial = 0; trial < 20; ++trial) {
            BitMatrix bits = BitMatrix::zeros(3, 4);
            for (auto& b : bits.bits) b = static_cast<std::uint8_t>(rng() & 1);
            SerialEncoding enc = encode_serial(bits, code);
            for (int k = 0; k < 4; ++k) {
                FfVector sum(3, 4);
                for (int j = 0; j < 3; ++j) sum = sum + enc.element_sequences[j].subvector(4 * k, 4);
                CHECK(sum == enc.ffsp_blocks[k]);
            }
        }
    }
}

TEST_CASE("parallel encoding", "[encoder]") {
    EpCode code = example2_code();
    SECTION("one user with K = M bits reduces to the user-block FFSP") {
        BitMatrix bits = bits_from({{1, 0, 1, 1}});
        ParallelEncoding enc = encode_parallel(bits, code);
        CHECK(enc.ffsp == ffsp_of_user_block({1, 0, 1, 1}, code));
        CHECK(enc.user_words[0] == enc.ffsp);
    }
    SECTION("two users, two bits each over the worked AI code") {
        ParallelEncoding enc = encode_parallel(bits_from({{1, 0}, {0, 1}}), code);
        // row1 + 2 row2 + 2 row3 + row4 of T_o(4,4)
        CHECK(enc.ffsp.digits() == "1000");
    }
    SECTION("exceeding the pair budget is rejected") {
        CHECK_THROWS_AS(encode_parallel(BitMatrix::zeros(3, 2), code), std::invalid_argument);
    }
}

TEST_CASE("serial and parallel agree on the multiset of sum patterns", "[encoder]") {
    // With J_mc * K = M, the parallel FFSP of a bit matrix equals the serial
    // FFSP of the flattened user block: users and bits are interchangeable.
    EpCode code = example2_code();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 32; ++trial) {
        BitMatrix bits = BitMatrix::zeros(2, 2);
        for (auto& b : bits.bits) b = static_cast<std::uint8_t>(rng() & 1);
        ParallelEncoding par = encode_parallel(bits, code);
        UserBlock flat{bits.at(0, 0), bits.at(0, 1), bits.at(1, 0), bits.at(1, 1)};
        CHECK(par.ffsp == ffsp_of_user_block(flat, code));
    }
}

TEST_CASE("ffsp map is injective for unique codes (exhaustive)", "[encoder]") {
    EpCode code = EpCode::scwep_from_generator(example_code_16_12(2).generator());
    REQUIRE(check_uspm(code) == UspmVerdict::Unique);
    std::set<std::string> seen;
    for (std::size_t idx = 0; idx < (1u << 12); ++idx) {
        UserBlock b(12);
        for (int j = 0; j < 12; ++j) b[j] = (idx >> j) & 1;
        CHECK(seen.insert(ffsp_of_user_block(b, code).digits()).second);
    }
}

TEST_CASE("complement blocks cancel for additive-inverse families", "[encoder]") {
    for (EpCode code : {example2_code(), example6_code()}) {
        const std::size_t M = code.pair_count();
        for (std::size_t idx = 0; idx < (std::size_t{1} << M); ++idx) {
            UserBlock b(M), comp(M);
            for (std::size_t j = 0; j < M; ++j) {
                b[j] = (idx >> j) & 1;
                comp[j] = 1 - b[j];
            }
            FfVector sum = ffsp_of_user_block(b, code) + ffsp_of_user_block(comp, code);
            CHECK(sum.is_zero());
        }
    }
}

TEST_CASE("frame planning", "[encoder]") {
    SECTION("the worked 8-user frame") {
        FrameLayout layout = plan_frame(4, 6, 4, 2, 8, EpMode::Serial);
        CHECK(layout.slots.size() == 8);
        // first group of four users shares blocks 0..1, second group 2..3
        CHECK(layout.slots[0].block_of_bit == std::vector<int>{0, 1});
        CHECK(layout.slots[3].block_of_bit == std::vector<int>{0, 1});
        CHECK(layout.slots[4].block_of_bit == std::vector<int>{2, 3});
        CHECK(layout.slots[7].ep_of_bit == std::vector<int>{3, 3});
        long long bits = 8 * 2;
        CHECK(bits == 16);
    }
    SECTION("capacity errors name the bound") {
        CHECK_THROWS_WITH(plan_frame(4, 6, 4, 2, 9, EpMode::Serial), Catch::Matchers::ContainsSubstring("M*T/K"));
        CHECK_THROWS_AS(plan_frame(4, 6, 4, 2, 9, EpMode::Parallel), std::invalid_argument);
    }
    SECTION("the worked 8-user frame in parallel mode: two users per block") {
        FrameLayout layout = plan_frame(4, 6, 4, 2, 8, EpMode::Parallel);
        CHECK(layout.slots.size() == 8);
        CHECK(layout.slots[0].block_of_bit == std::vector<int>{0, 0});
        CHECK(layout.slots[1].block_of_bit == std::vector<int>{0, 0});
        CHECK(layout.slots[1].ep_of_bit == std::vector<int>{2, 3});
        CHECK(layout.slots[7].block_of_bit == std::vector<int>{3, 3});
    }
    SECTION("parallel packing six users per block at loading factor 1.5") {
        FrameLayout layout = plan_frame(6, 4, 3, 1, 18, EpMode::Parallel);
        CHECK(layout.slots.size() == 18);
        CHECK(layout.slots[5].block_of_bit == std::vector<int>{0});
        CHECK(layout.slots[6].block_of_bit == std::vector<int>{1});
        CHECK(layout.slots[17].block_of_bit == std::vector<int>{2});
    }
    SECTION("parallel mode assigns K consecutive pairs per user") {
        FrameLayout layout = plan_frame(4, 4, 2, 2, 4, EpMode::Parallel);
        CHECK(layout.slots[0].ep_of_bit == std::vector<int>{0, 1});
        CHECK(layout.slots[1].ep_of_bit == std::vector<int>{2, 3});
        CHECK(layout.slots[2].block_of_bit == std::vector<int>{1, 1});
    }
    CHECK_THROWS_AS(plan_frame(4, 4, 2, 3, 1, EpMode::Serial), std::invalid_argument);
}

TEST_CASE("bit matrix text loader", "[encoder]") {
    BitMatrix m = BitMatrix::from_text("2 3\n1 0 1\n0 0 1\n");
    CHECK(m.at(0, 2) == 1);
    CHECK(m.at(1, 0) == 0);
    CHECK_THROWS_AS(BitMatrix::from_text("2 3\n1 0 1\n0 0 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(BitMatrix::from_text(""), std::invalid_argument);
}
