#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bosrec/numerics.hpp"
#include "oracles.hpp"

using namespace bosrec;

TEST_CASE("log_factorial known values") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(1) == 0.0);
    CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-15));
}

TEST_CASE("log_factorial matches exact big-integer factorials up to 170") {
    for (int n = 2; n <= 170; ++n) {
        const double expected = oracles::exact_log_factorial(n);
        CHECK(std::abs(log_factorial(n) - expected) <= 1e-13 * expected);
    }
}

TEST_CASE("log_factorial table consecutive differences equal ln(n)") {
    const LogFactorialTable table(512);
    for (int n = 1; n <= 512; ++n) {
        const double diff = table(n) - table(n - 1);
        // tolerance is relative to the table entry: the difference of two
        // stored doubles cannot be more accurate than their representation
        CHECK(std::abs(diff - std::log(double(n))) <= 1e-14 * std::max(table(n), 1.0));
    }
}

TEST_CASE("log_factorial out of range reports the required table size") {
    const LogFactorialTable table(16);
    CHECK_THROWS_AS(table(17), std::out_of_range);
    CHECK_THROWS_AS(table(-1), std::invalid_argument);
    CHECK_THROWS_WITH_AS(table(20), doctest::Contains("20"), std::out_of_range);
}

TEST_CASE("rational arithmetic basics") {
    Rational a(1, 2);
    a += Rational(1, 3);
    CHECK(a == Rational(5, 6));
    Rational b(2, -4);
    CHECK(b == Rational(-1, 2));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("vandermonde_check examples") {
    {
        const auto [lhs, rhs] = vandermonde_check(2, 1, 1);
        CHECK(lhs == rhs);
        CHECK(lhs == Rational(2, 1));
    }
    {
        const auto [lhs, rhs] = vandermonde_check(0, 0, 0);
        CHECK(lhs == rhs);
        CHECK(lhs == Rational(1, 1));
    }
    {
        const auto [lhs, rhs] = vandermonde_check(12, 5, 7);
        CHECK(lhs == rhs);
    }
    CHECK_THROWS_AS(vandermonde_check(-1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(vandermonde_check(4, 5, 1), std::invalid_argument);
}

TEST_CASE("vandermonde identity holds exactly for all a <= 20") {
    for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= a; ++b) {
            for (int d = 0; d <= a; ++d) {
                const auto [lhs, rhs] = vandermonde_check(a, b, d);
                REQUIRE(lhs == rhs);
            }
        }
    }
}

TEST_CASE("hyp2f1_negint examples") {
    CHECK(hyp2f1_negint(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hyp2f1_negint(1, 1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hyp2f1_negint(2, 3, 1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK_THROWS_AS(hyp2f1_negint(-1, 0, 0), std::invalid_argument);
}

TEST_CASE("hyp2f1_negint matches the terminating series") {
    for (int m = 0; m <= 10; ++m) {
        for (int n = 0; n <= 10; ++n) {
            for (int q = 0; q <= 10; ++q) {
                const double closed = hyp2f1_negint(m, n, q);
                const double series = oracles::hyp2f1_series(m, n, q);
                REQUIRE(std::abs(closed - series) <= 1e-12 * std::abs(series));
            }
        }
    }
}

TEST_CASE("signed_logsum examples") {
    CHECK(signed_logsum({}) == 0.0);

    const SignedLogTerm cancel[] = {{1, 0.0}, {-1, 0.0}};
    CHECK(std::abs(signed_logsum(cancel)) <= 1e-16);

    const SignedLogTerm mix[] = {{1, std::log(6.0)}, {-1, std::log(2.0)}, {1, 0.0}};
    CHECK(signed_logsum(mix) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("signed_logsum is permutation independent") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(-30.0, 30.0);
    std::bernoulli_distribution coin;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SignedLogTerm> terms(40);
        double largest = 0.0;
        for (auto& t : terms) {
            t = {coin(rng) ? 1 : -1, mag(rng)};
            largest = std::max(largest, std::exp(t.log_magnitude));
        }
        const double base = signed_logsum(terms);
        if (std::abs(base) <= 1e-8 * largest) continue;  // cancellation-dominated
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            std::shuffle(terms.begin(), terms.end(), rng);
            const double permuted = signed_logsum(terms);
            CHECK(std::abs(permuted - base) <= 1e-12 * std::abs(base));
        }
    }
}

TEST_CASE("ipow integer powers with 0^0 = 1") {
    CHECK(ipow(0.0, 0) == Complex(1.0));
    CHECK(ipow(0.0, 3) == Complex(0.0));
    CHECK(ipow(Complex(0.0, 1.0), 2) == Complex(-1.0, 0.0));
}
