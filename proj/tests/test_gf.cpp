#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ffma/gf.hpp"

using namespace FFMA;

namespace {

FfMatrix example1_generator() {
    return FfMatrix::from_digit_rows(2, {"11111111", "00001111", "00110011", "01010101"});
}

FfMatrix t_no_3x2() { return FfMatrix::from_digit_rows(3, {"11", "21", "01"}); }

FfMatrix random_matrix(int p, std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    FfMatrix m(p, rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.set(r, c, static_cast<int>(rng() % p));
    return m;
}

} // namespace

TEST_CASE("matrix product: identity, reference row sum, ternary row sum", "[gf]") {
    FfMatrix g = example1_generator();
    CHECK(mat_mul(FfMatrix::identity(2, 4), g) == g);

    FfVector sel(2, {1, 1, 0, 0});
    CHECK(row_times(sel, g).digits() == "11110000");

    FfVector ones(3, {1, 1, 1});
    CHECK(row_times(ones, t_no_3x2()).digits() == "00");

    CHECK_THROWS_AS(mat_mul(g, FfMatrix::identity(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(mat_mul(g, FfMatrix::identity(3, 8)), std::invalid_argument);
}

TEST_CASE("rank over GF(2) and GF(3)", "[gf]") {
    CHECK(rank(example1_generator()) == 4);
    CHECK(rank(FfMatrix(3, 5, 7)) == 0);
    CHECK(rank(t_no_3x2()) == 2);
    CHECK(rank(FfMatrix::identity(7, 6)) == 6);
}

TEST_CASE("rank is invariant under row permutation", "[gf]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        int p = trial % 2 ? 2 : 3;
        FfMatrix m = random_matrix(p, 5, 6, rng);
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), rng);
        FfMatrix shuffled(p, 5, 6);
        for (std::size_t r = 0; r < 5; ++r)
            for (std::size_t c = 0; c < 6; ++c) shuffled.set(r, c, m.at(perm[r], c));
        CHECK(rank(m) == rank(shuffled));
        CHECK(rank(m) <= 5);
    }
}

TEST_CASE("kronecker products match the reference ternary matrices", "[gf]") {
    FfMatrix t2 = FfMatrix::from_digit_rows(3, {"11", "21"});
    FfMatrix t4 = kronecker(t2, t2);
    CHECK(t4 == FfMatrix::from_digit_rows(3, {"1111", "2121", "2211", "1221"}));

    FfMatrix t8 = kronecker(t2, t4);
    CHECK(t8 == FfMatrix::from_digit_rows(3, {"11111111", "21212121", "22112211", "12211221", "22221111",
                                              "12122121", "11222211", "21121221"}));

    FfMatrix one(3, 1, 1);
    one.set(0, 0, 1);
    CHECK(kronecker(one, t4) == t4);
}

TEST_CASE("kronecker rank is multiplicative", "[gf]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int p = trial % 2 ? 2 : 3;
        FfMatrix a = random_matrix(p, 2 + trial % 2, 3, rng);
        FfMatrix b = random_matrix(p, 3, 2, rng);
        CHECK(rank(kronecker(a, b)) == rank(a) * rank(b));
    }
}

TEST_CASE("dot products from the decoding walkthrough", "[gf]") {
    FfVector w = FfVector::from_digits(3, "1021");
    CHECK(dot(w, FfVector::from_digits(3, "1111")) == 1);
    CHECK(dot(w, FfVector::from_digits(3, "2121")) == 1);
    CHECK(dot(w, FfVector(3, 4)) == 0);
    CHECK_THROWS_AS(dot(w, FfVector(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(dot(w, FfVector(2, {1, 0, 1, 0})), std::invalid_argument);
}

TEST_CASE("componentwise algebra and negation", "[gf]") {
    FfMatrix t2 = FfMatrix::from_digit_rows(3, {"11", "21"});
    CHECK(scale(2, t2) == FfMatrix::from_digit_rows(3, {"22", "12"}));

    std::mt19937_64 rng(3);
    FfMatrix a = random_matrix(3, 4, 5, rng);
    CHECK(-(-a) == a);
    CHECK((a + (-a)).is_zero());
    CHECK(scale(2, a) == -a); // over GF(3), doubling is negation

    FfMatrix t4 = kronecker(t2, t2);
    CHECK((t4 + scale(2, t4)).is_zero());
}

TEST_CASE("associativity and distributivity on random conformable triples", "[gf]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int p = trial % 3 == 0 ? 2 : (trial % 3 == 1 ? 3 : 7);
        FfMatrix a = random_matrix(p, 3, 4, rng);
        FfMatrix b = random_matrix(p, 4, 2, rng);
        FfMatrix c = random_matrix(p, 2, 5, rng);
        CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
        FfMatrix b2 = random_matrix(p, 4, 2, rng);
        CHECK(mat_mul(a, b + b2) == mat_mul(a, b) + mat_mul(a, b2));
    }
}

TEST_CASE("negate(x) + x vanishes elementwise for every supported field", "[gf]") {
    for (int p : {2, 3, 7})
        for (int x = 0; x < p; ++x) {
            FfVector v(p, {x});
            CHECK(((-v) + v)[0] == 0);
        }
}

TEST_CASE("matrix text format round-trips and rejects bad input", "[gf]") {
    FfMatrix g = t_no_3x2();
    FfMatrix parsed = matrix_from_text(to_text(g));
    CHECK(parsed == g);

    CHECK_THROWS_AS(matrix_from_text("3 2 2\n1 1\n2"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_text("3 2 2\n1 1\n2 5"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_text("4 1 1\n1"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_text("oops"), std::invalid_argument);
}

TEST_CASE("vector digits parsing", "[gf]") {
    CHECK(FfVector::from_digits(3, "1021").digits() == "1021");
    CHECK_THROWS_AS(FfVector::from_digits(2, "102"), std::invalid_argument);
    CHECK_THROWS_AS(FfVector(5, 3), std::invalid_argument);
}
