#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "periodica/certify.hpp"

using namespace periodica;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) {
        x[i++] = a;
    }
    return x;
}

Candidate given(const MapDef& m, Eigen::VectorXd x) {
    Candidate c(m, static_cast<int>(x.size()), std::move(x));
    c.A = approx_inverse(build_DF(m, c.x_bar));
    return c;
}

const MapDef kLogistic = MapDef::logistic(Param::parse("3.2"));

}  // namespace

TEST_CASE("two-digit walkthrough") {
    const Candidate c = given(kLogistic, vec({0.51, 0.79}));
    const Bounds b = compute_bounds(c);
    CHECK(b.Y.hi() >= 0.012775);
    CHECK(b.Y.hi() <= 0.0127751);
    CHECK(b.Z1.hi() <= 6.66134e-16);
    CHECK(b.Z2.lo() >= 20.7422);
    CHECK(b.Z2.hi() <= 20.7423);

    const RadiusSelection r = select_radius(b);
    REQUIRE(r.ok);
    CHECK(r.r_star == 0.015625);
    CHECK(r.r_minus.hi() == doctest::Approx(0.01516).epsilon(1e-3));
    CHECK(radius_admissible(b, std::ldexp(1.0, -6), AprioriRadius::unbounded()));
    CHECK(r.r_tight <= r.r_star);
    CHECK(r.r_unique >= r.r_star);
    CHECK((b.Z1 + r.r_unique * b.Z2).hi() < 1.0);

    const Certificate cert = certify_orbit(c);
    CHECK(cert.verified);
    CHECK(cert.distinct);
    CHECK(cert.stability == Stability::stable);
    CHECK(cert.eigenvalue.contains(0.16));
    CHECK(cert.eigenvalue.lo() >= -0.0644712);
    CHECK(cert.eigenvalue.hi() <= 0.314457);
}

TEST_CASE("refined candidate") {
    const Certificate cert = certify_orbit(given(kLogistic, vec({0.513044509531044, 0.7994554904683129})));
    CHECK(cert.verified);
    CHECK(cert.r_star() <= 1e-11);
    // The ball holds the closed-form period-two point.
    CHECK(std::fabs(cert.candidate.x_bar[0] - (4.2 - std::sqrt(0.84)) / 6.4) <= cert.r_star());
}

TEST_CASE("poor candidate fails with a negative discriminant") {
    const Certificate cert = certify_orbit(given(kLogistic, vec({0.3, 0.6})));
    CHECK_FALSE(cert.verified);
    CHECK(cert.reason == FailureReason::negative_discriminant);
}

TEST_CASE("radius selection edge cases") {
    const RadiusSelection zero = select_radius({Interval(0.0), Interval(0.5), Interval(3.0)});
    CHECK(zero.ok);
    CHECK(zero.r_star == 0.0);
    CHECK(select_radius({Interval(0.1), Interval(1.0), Interval(1.0)}).reason == FailureReason::z1_not_contracting);
    CHECK(select_radius({Interval(0.01), Interval(0.0), Interval(100.0)}).reason ==
          FailureReason::negative_discriminant);
    const RadiusSelection capped =
        select_radius({Interval(1e-3), Interval(0.0), Interval(1.0)}, AprioriRadius::finite(1e-4));
    CHECK(capped.reason == FailureReason::no_admissible_radius);
    CHECK_THROWS(AprioriRadius::finite(-1.0));
    CHECK_THROWS(AprioriRadius::unbounded().value());
}

TEST_CASE("shrinking Y keeps an admissible radius") {
    const Bounds b{Interval(0.012), Interval(1e-3), Interval(20.0)};
    REQUIRE(select_radius(b).ok);
    for (double s = 1.0; s > 1e-12; s /= 3.0) {
        const Bounds smaller{b.Y * s, b.Z1, b.Z2};
        const RadiusSelection r = select_radius(smaller);
        CHECK(r.ok);
        CHECK(r.r_minus.hi() <= select_radius(b).r_minus.hi());
    }
}

TEST_CASE("distinctness") {
    CHECK(check_distinct(vec({0.51, 0.79}), std::ldexp(1.0, -6)));
    CHECK_FALSE(check_distinct(vec({0.5, 0.5}), 1e-300));
    CHECK_FALSE(check_distinct(vec({0.5, 0.6}), 0.05));
}

TEST_CASE("Gershgorin disks") {
    IntervalMatrix M(2, 2);
    M(0, 0) = Interval(2.0);
    M(0, 1) = Interval(0.1);
    M(1, 0) = Interval(0.1);
    M(1, 1) = Interval(5.0);
    const auto disks = gershgorin(M);
    REQUIRE(disks.size() == 2);
    CHECK(disks[0].radius == doctest::Approx(0.1));
    CHECK(disks[1].center == Interval(5.0));
    CHECK(classify_disks(disks) == Stability::unstable);

    // One disk inside, one isolated disk outside: unstable.
    CHECK(classify_disks({{Interval(0.0), 0.5}, {Interval(3.0), 0.5}}) == Stability::unstable);
    // A component that straddles the unit circle decides nothing.
    CHECK(classify_disks({{Interval(0.0), 0.5}, {Interval(1.0), 0.2}}) == Stability::inconclusive);
    CHECK(classify_disks({{Interval(0.2), 0.3}, {Interval(-0.1), 0.2}}) == Stability::stable);
}

TEST_CASE("fixed points of the logistic map") {
    const Certificate c = certify_orbit(given(kLogistic, vec({0.6875})));
    CHECK(c.verified);
    CHECK(c.stability == Stability::unstable);
    CHECK(c.eigenvalue.contains(-1.2));
    const Certificate z = certify_orbit(given(kLogistic, vec({0.0})));
    CHECK(z.verified);
    CHECK(z.stability == Stability::unstable);
    CHECK(z.eigenvalue.contains(3.2));
}

TEST_CASE("predator-prey period two") {
    const MapDef m = MapDef::predprey(-3.0, -10.0);
    const auto found = seed_candidates(m, 2);
    bool any = false;
    for (const auto& c : found) {
        const Certificate cert = certify_orbit(c);
        if (cert.counts_as_orbit()) {
            any = true;
            CHECK(cert.bounds.Z1.hi() < 1e-10);
        }
    }
    CHECK(any);
}

TEST_CASE("certified balls match the bisection oracle") {
    for (double mu : {3.2, 3.5, 3.83}) {
        const MapDef m = MapDef::logistic(mu);
        for (int p = 1; p <= 4; ++p) {
            const auto roots = oracle::least_period_points([&](double x) { return m.f(x); }, p, 0.0, 1.0, 1e-5);
            std::vector<Certificate> certs;
            for (const auto& c : seed_candidates(m, p)) {
                Certificate cert = certify_orbit(c);
                if (!cert.counts_as_orbit()) {
                    continue;
                }
                bool seen = false;
                for (const auto& k : certs) {
                    seen = seen || same_orbit(k, cert);
                }
                if (!seen) {
                    certs.push_back(std::move(cert));
                }
                REQUIRE(certs.back().radius.r_star < 1e-6);
            }
            INFO("mu = " << mu << ", p = " << p);
            CHECK(certs.size() * static_cast<std::size_t>(p) == roots.size());
            for (double r : roots) {
                int hits = 0;
                for (const auto& c : certs) {
                    for (double x : c.candidate.x_bar) {
                        if (std::fabs(x - r) <= c.r_star() + 1e-12) {
                            ++hits;
                        }
                    }
                }
                CHECK(hits == 1);
            }
        }
    }
}

TEST_CASE("same orbit under rotation") {
    const Candidate a = newton_refine(Candidate(kLogistic, 2, vec({0.51, 0.79})));
    const Candidate b = newton_refine(Candidate(kLogistic, 2, vec({0.79, 0.51})));
    const Certificate ca = certify_orbit(a);
    const Certificate cb = certify_orbit(b);
    CHECK(same_orbit(ca, cb));
    const Certificate fp = certify_orbit(newton_refine(Candidate(kLogistic, 1, vec({0.6875}))));
    CHECK_FALSE(same_orbit(ca, fp));
}

TEST_CASE("certificates are reproducible") {
    const Certificate a = certify_orbit(given(MapDef::logistic(3.83), vec({0.15615, 0.50466, 0.95646})));
    const Certificate b = certify_orbit(given(MapDef::logistic(3.83), vec({0.15615, 0.50466, 0.95646})));
    CHECK(a.verified == b.verified);
    CHECK(a.bounds.Y == b.bounds.Y);
    CHECK(a.eigenvalue == b.eigenvalue);
    CHECK(a.stability == b.stability);
    if (a.verified) {
        CHECK(a.bounds.Z1.hi() < 1.0);
    }
}
