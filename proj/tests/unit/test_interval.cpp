#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "periodica/interval.hpp"

using namespace periodica;

namespace {

Interval random_interval(std::mt19937_64& rng, int emin, int emax) {
    return Interval::hull(oracle::random_double(rng, emin, emax), oracle::random_double(rng, emin, emax));
}

double sample(std::mt19937_64& rng, const Interval& x) {
    std::uniform_real_distribution<double> t(0.0, 1.0);
    const double v = x.lo() + t(rng) * (x.hi() - x.lo());
    return std::clamp(v, x.lo(), x.hi());
}

}  // namespace

TEST_CASE("arithmetic on exact endpoints") {
    CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
    CHECK(Interval(1, 2) * Interval(-1, 1) == Interval(-2, 2));
    CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
    CHECK(Interval(-3, -2) * Interval(-5, 4) == Interval(-12, 15));
}

TEST_CASE("one third is enclosed within two ulp") {
    const Interval q = Interval(1.0) / Interval(3.0);
    CHECK(oracle::encloses(q, oracle::div(1.0, 3.0)));
    CHECK(q.hi() <= std::nextafter(std::nextafter(q.lo(), 1.0), 1.0));
    CHECK(q.contains(0.333333333333333314829616256247));
}

TEST_CASE("division by an interval containing zero is a domain error") {
    CHECK_THROWS_AS(Interval(1.0) / Interval(-1, 1), DomainError);
    CHECK_THROWS_AS(Interval(1.0) / Interval(0.0), DomainError);
}

TEST_CASE("overflow is reported") {
    CHECK_THROWS_AS(Interval(1e308) + Interval(1e308), UnboundedResult);
    CHECK_THROWS_AS(exp(Interval(800.0)), UnboundedResult);
    CHECK_THROWS_AS(Interval(2.0, 1.0), IntervalError);
    CHECK_THROWS_AS(Interval(std::nan("")), IntervalError);
}

TEST_CASE("exp") {
    CHECK(exp(Interval(0.0)) == Interval(1.0));
    const Interval e = exp(Interval(-1, 1));
    CHECK(mpfr_cmp_d(oracle::exp(-1.0).down.get(), e.lo()) >= 0);
    CHECK(mpfr_cmp_d(oracle::exp(1.0).up.get(), e.hi()) <= 0);

    // An enclosure of ln 2 maps onto an enclosure of 2.
    oracle::Real ln2;
    mpfr_const_log2(ln2.get(), MPFR_RNDD);
    const double l = mpfr_get_d(ln2.get(), MPFR_RNDD);
    mpfr_const_log2(ln2.get(), MPFR_RNDU);
    const double u = mpfr_get_d(ln2.get(), MPFR_RNDU);
    CHECK(exp(Interval(l, u)).contains(2.0));
}

TEST_CASE("exp against the oracle on random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(-700.0, 700.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = i % 2 == 0 ? x(rng) : oracle::random_double(rng, -60, 3);
        REQUIRE(oracle::encloses(exp(Interval(v)), oracle::exp(v)));
    }
}

TEST_CASE("containment fuzz against the oracle") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        const Interval X = random_interval(rng, -30, 30);
        const Interval Y = random_interval(rng, -30, 30);
        const int op = i % 4;
        Interval Z;
        if (op == 3 && Y.contains_zero()) {
            continue;
        }
        switch (op) {
        case 0: Z = X + Y; break;
        case 1: Z = X - Y; break;
        case 2: Z = X * Y; break;
        default: Z = X / Y; break;
        }
        for (int s = 0; s < 10; ++s) {
            const double x = sample(rng, X);
            const double y = sample(rng, Y);
            const oracle::Bracket b = op == 0   ? oracle::add(x, y)
                                      : op == 1 ? oracle::sub(x, y)
                                      : op == 2 ? oracle::mul(x, y)
                                                : oracle::div(x, y);
            REQUIRE(oracle::encloses(Z, b));
        }
    }
}

TEST_CASE("point operations are tight") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5000; ++i) {
        const double a = oracle::random_double(rng, -40, 40);
        const double b = oracle::random_double(rng, -40, 40);
        const Interval p = Interval(a) * Interval(b);
        CHECK(p.hi() <= std::nextafter(p.lo(), INFINITY));
        const Interval s = sqrt(Interval(std::fabs(a)));
        REQUIRE(oracle::encloses(s, oracle::sqrt(std::fabs(a))));
        CHECK(s.hi() <= std::nextafter(s.lo(), INFINITY));
    }
}

TEST_CASE("inclusion monotonicity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> widen(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const Interval X = random_interval(rng, -10, 10);
        const Interval Y = random_interval(rng, -10, 10);
        const Interval X2(X.lo() - widen(rng), X.hi() + widen(rng));
        const Interval Y2(Y.lo() - widen(rng), Y.hi() + widen(rng));
        CHECK((X + Y).subset_of(X2 + Y2));
        CHECK((X - Y).subset_of(X2 - Y2));
        CHECK((X * Y).subset_of(X2 * Y2));
        if (!Y2.contains_zero()) {
            CHECK((X / Y).subset_of(X2 / Y2));
        }
        CHECK(exp(Interval(X.lo() / 64, X.hi() / 64)).subset_of(exp(Interval(X2.lo() / 64, X2.hi() / 64))));
    }
}

TEST_CASE("decimal literals enclose their exact value") {
    for (const char* text : {"3.2", "0.1", "0.51", "0.79", "-9.4641", "1e-300", "123456789.123456789", "2.5"}) {
        const Interval x = Interval::from_decimal(text);
        CHECK(oracle::encloses(x, oracle::decimal(text)));
        CHECK(x.hi() <= std::nextafter(x.lo(), INFINITY));
    }
    CHECK(Interval::from_decimal("2.5").is_point());
    CHECK(Interval::from_decimal("0x1.8p+1") == Interval(3.0));
    CHECK_THROWS_AS(Interval::from_decimal("3.2x"), std::invalid_argument);
}

TEST_CASE("hex text round-trips") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double x = oracle::random_double(rng, -1000, 1000);
        CHECK(parse_double(to_hex(x)) == x);
    }
    CHECK(to_hex(3.2) == "0x1.999999999999ap+1");
}

TEST_CASE("norms") {
    const IntervalVector v{Interval(1.0), Interval(-2.0), Interval(3.0)};
    CHECK(vec_norm1(v) == Interval(6.0));
    IntervalMatrix M(2, 2);
    M(0, 0) = Interval(1.0);
    M(0, 1) = Interval(-2.0);
    M(1, 0) = Interval(3.0);
    M(1, 1) = Interval(4.0);
    CHECK(op_norm1(M) == Interval(6.0));

    IntervalMatrix A(2, 2);
    A(0, 0) = Interval(2.10618055051);
    A(0, 1) = Interval(-1.1347955552327);
    A(1, 0) = Interval(-1.1347955552327);
    A(1, 1) = Interval(0.07262691553489);
    const double expected = 2.10618055051 + 1.1347955552327;
    CHECK(op_norm1(A).contains(expected));
    CHECK(op_norm1(A).hi() - op_norm1(A).lo() < 1e-15);

    // Every point matrix drawn from the entries has its norm enclosed.
    std::mt19937_64 rng(13);
    for (int t = 0; t < 1000; ++t) {
        IntervalMatrix W(3, 3);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                W(i, j) = random_interval(rng, -5, 5);
            }
        }
        const Interval n = op_norm1(W);
        double best = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                col += std::fabs(sample(rng, W(i, j)));
            }
            best = std::max(best, col);
        }
        CHECK(best <= n.hi() * (1 + 1e-15));
    }
}

TEST_CASE("pow and sqr") {
    CHECK(pow(Interval(-2, 1), 2) == Interval(0, 4));
    CHECK(pow(Interval(-2, 1), 3) == Interval(-8, 1));
    CHECK(sqr(Interval(-3, 2)) == Interval(0, 9));
    CHECK(pow(Interval(5, 7), 0) == Interval(1.0));
}
