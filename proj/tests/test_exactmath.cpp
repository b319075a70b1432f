#include <doctest.h>

#include <random>

#include "regprob/errors.hpp"
#include "regprob/linalg.hpp"
#include "regprob/rational.hpp"

using namespace regprob;

namespace {

RatMatrix make(std::size_t r, std::size_t c, std::vector<Rational> vals) {
    RatMatrix m(r, c);
    m.a = std::move(vals);
    return m;
}

}  // namespace

TEST_CASE("rational basics") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-1, -2) == Rational(1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK(Rational(1, 3).to_string() == "1/3");
    CHECK(Rational(7).to_string() == "7");
    CHECK(*Rational::parse("3/4") == Rational(3, 4));
    CHECK(*Rational::parse("-5") == Rational(-5));
    CHECK(!Rational::parse("1/0"));
    CHECK(!Rational::parse("x"));
    CHECK(!Rational::parse("1/ 2"));
    CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
    CHECK(pow2(-3) == Rational(1, 8));
    CHECK(pow2(4) == Rational(16));
}

TEST_CASE("bit lengths and ceil_log2") {
    CHECK(bit_length(mpz_class(0)) == 0);
    CHECK(bit_length(mpz_class(1)) == 1);
    CHECK(bit_length(mpz_class(2)) == 2);
    CHECK(bit_length(mpz_class(255)) == 8);
    CHECK(ceil_log2(Rational(1)) == 0);
    CHECK(ceil_log2(Rational(3)) == 2);
    CHECK(ceil_log2(Rational(4)) == 2);
    CHECK(ceil_log2(Rational(5)) == 3);
    CHECK(ceil_log2(Rational(1, 2)) == -1);
    CHECK(ceil_log2(Rational(1, 3)) == -1);
    CHECK(ceil_log2(Rational(3072)) == 12);
}

TEST_CASE("solve_linear identity and diagonal") {
    CHECK(solve_linear(RatMatrix::identity(2), {Rational(3), Rational(5, 2)}) ==
          RatVector{Rational(3), Rational(5, 2)});
    auto diag = make(2, 2, {Rational(2), Rational(), Rational(), Rational(4)});
    CHECK(solve_linear(diag, {Rational(1), Rational(2)}) ==
          RatVector{Rational(1, 2), Rational(1, 2)});
}

TEST_CASE("solve_linear rank-deficient") {
    auto m = make(2, 2, {Rational(1), Rational(1), Rational(1), Rational(1)});
    CHECK_THROWS_AS(solve_linear(m, {Rational(1), Rational()}), SingularMatrixError);
}

TEST_CASE("solve_linear residual is exactly zero on random systems") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + rng() % 5;
        RatMatrix a(n, n);
        RatVector b(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                a.at(i, j) = Rational(static_cast<long>(rng() % 9) - 4,
                                      1 + static_cast<long>(rng() % 5));
            b[i] = Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 5));
        }
        RatVector x;
        try {
            x = solve_linear(a, b);
        } catch (const SingularMatrixError&) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            Rational s;
            for (std::size_t j = 0; j < n; ++j) s += a.at(i, j) * x[j];
            CHECK(s == b[i]);
        }
    }
}

TEST_CASE("inverse_if_nonneg certifies rho < 1") {
    SUBCASE("scalar geometric series") {
        auto inv = inverse_if_nonneg(make(1, 1, {Rational(1, 2)}));
        REQUIRE(inv.has_value());
        CHECK(inv->at(0, 0) == Rational(2));
    }
    SUBCASE("rho = 1 is singular") {
        CHECK(!inverse_if_nonneg(make(1, 1, {Rational(1)})).has_value());
    }
    SUBCASE("rho = 2 gives a negative inverse") {
        auto m = make(2, 2, {Rational(), Rational(2), Rational(2), Rational()});
        CHECK(!inverse_if_nonneg(m).has_value());
    }
    SUBCASE("result is an exact inverse of I - M and nonnegative") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t n = 1 + rng() % 4;
            RatMatrix m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m.at(i, j) = Rational(static_cast<long>(rng() % 3),
                                          4 + static_cast<long>(rng() % 5));
            auto inv = inverse_if_nonneg(m);
            if (!inv) continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Rational s;
                    for (std::size_t k = 0; k < n; ++k) {
                        Rational imk = (i == k ? Rational(1) : Rational()) - m.at(i, k);
                        s += imk * inv->at(k, j);
                    }
                    CHECK(s == (i == j ? Rational(1) : Rational()));
                    CHECK(!inv->at(i, j).is_negative());
                }
        }
    }
}

TEST_CASE("nonneg_solution_exists") {
    CHECK(nonneg_solution_exists(make(1, 2, {Rational(1), Rational(1)}), {Rational(1)}));
    CHECK(!nonneg_solution_exists(make(1, 2, {Rational(1), Rational(1)}), {Rational(-1)}));
    // {x/2 = x, sum = 1}: rows [[-1/2],[1]], b = (0,1)
    CHECK(!nonneg_solution_exists(make(2, 1, {Rational(-1, 2), Rational(1)}),
                                  {Rational(), Rational(1)}));
}

TEST_CASE("nonneg_solution_exists agrees with vertex enumeration on tiny systems") {
    // Exhaustive oracle for <= 3 variables: a nonnegative solution exists iff
    // some basic solution over a column subset is feasible (or b == 0).
    std::mt19937_64 rng(23);
    auto brute = [](const RatMatrix& a, const RatVector& b) {
        std::size_t n = a.cols;
        // try every subset of columns as support, solve least-squares-free:
        // here m x k subsystem by Gaussian elimination over all row subsets
        bool zero = true;
        for (const auto& bi : b)
            if (!bi.is_zero()) zero = false;
        if (zero) return true;
        std::vector<std::size_t> cols(n);
        for (std::size_t i = 0; i < n; ++i) cols[i] = i;
        for (std::size_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::size_t> support;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) support.push_back(i);
            if (support.size() > a.rows) continue;
            // solve A_S x = b exactly via square subsystems of independent rows
            // (try all row subsets of size |support|)
            std::vector<std::size_t> rows(a.rows);
            for (std::size_t i = 0; i < a.rows; ++i) rows[i] = i;
            std::vector<bool> row_sel(a.rows, false);
            std::fill(row_sel.begin(), row_sel.begin() + support.size(), true);
            std::sort(row_sel.begin(), row_sel.end());
            do {
                std::vector<std::size_t> rsel;
                for (std::size_t i = 0; i < a.rows; ++i)
                    if (row_sel[i]) rsel.push_back(i);
                if (rsel.size() != support.size()) continue;
                RatMatrix sub(support.size(), support.size());
                RatVector rhs(support.size());
                for (std::size_t i = 0; i < rsel.size(); ++i) {
                    for (std::size_t j = 0; j < support.size(); ++j)
                        sub.at(i, j) = a.at(rsel[i], support[j]);
                    rhs[i] = b[rsel[i]];
                }
                RatVector x;
                try {
                    x = solve_linear(sub, rhs);
                } catch (const SingularMatrixError&) {
                    continue;
                }
                bool nonneg = true;
                for (const auto& xi : x)
                    if (xi.is_negative()) nonneg = false;
                if (!nonneg) continue;
                // check the full system
                RatVector full(n);
                for (std::size_t j = 0; j < support.size(); ++j) full[support[j]] = x[j];
                bool all = true;
                for (std::size_t i = 0; i < a.rows; ++i) {
                    Rational s;
                    for (std::size_t j = 0; j < n; ++j) s += a.at(i, j) * full[j];
                    if (s != b[i]) all = false;
                }
                if (all) return true;
            } while (std::next_permutation(row_sel.begin(), row_sel.end()));
        }
        return false;
    };
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t m = 1 + rng() % 3, n = 1 + rng() % 3;
        RatMatrix a(m, n);
        RatVector b(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                a.at(i, j) = Rational(static_cast<long>(rng() % 7) - 3,
                                      1 + static_cast<long>(rng() % 3));
            b[i] = Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
        }
        CHECK(nonneg_solution_exists(a, b) == brute(a, b));
    }
}

TEST_CASE("round_down_dyadic") {
    SUBCASE("floor to quarters") {
        auto v = round_down_dyadic({Rational(1, 3)}, 2);
        CHECK(v.values[0] == Rational(1, 4));
    }
    SUBCASE("clamps negatives, keeps exact multiples") {
        auto v = round_down_dyadic({Rational(-1, 10), Rational(1, 2)}, 3);
        CHECK(v.values[0] == Rational());
        CHECK(v.values[1] == Rational(1, 2));
    }
    SUBCASE("floor(5/7 * 1024) = 731 by integer division") {
        CHECK(mpz_class(5 * 1024 / 7) == 731);
        auto v = round_down_dyadic({Rational(5, 7)}, 10);
        CHECK(v.values[0] == Rational(731, 1024));
    }
    SUBCASE("idempotent at the same k and monotone in v") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 60; ++trial) {
            Rational x(static_cast<long>(rng() % 2000) - 500, 1 + static_cast<long>(rng() % 97));
            Rational y = x + Rational(static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 13));
            unsigned long k = 1 + rng() % 12;
            auto rx = round_down_dyadic({x}, k).values[0];
            auto ry = round_down_dyadic({y}, k).values[0];
            CHECK(round_down_dyadic({rx}, k).values[0] == rx);
            CHECK(rx <= ry);  // y >= x
            if (!x.is_negative()) {
                CHECK(rx <= x);
                CHECK(x - rx < pow2(-static_cast<long>(k)));
            }
        }
    }
}

TEST_CASE("round_up_to_dyadic covers from above") {
    CHECK(round_up_to_dyadic(Rational(1, 3), 2) == Rational(1, 2));  // ceil(4/3)/4
    CHECK(round_up_to_dyadic(Rational(1, 2), 3) == Rational(1, 2));
    CHECK(round_up_to_dyadic(Rational(5, 7), 10) == Rational(732, 1024));
}

TEST_CASE("dyadic decimal strings") {
    CHECK(dyadic_decimal_string(Rational(731, 1024)) == "0.7138671875");
    CHECK(dyadic_decimal_string(Rational(1, 2)) == "0.5");
    CHECK(dyadic_decimal_string(Rational(3)) == "3");
    CHECK(dyadic_decimal_string(Rational()) == "0");
}
