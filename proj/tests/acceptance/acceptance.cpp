// One PASS/FAIL line per acceptance criterion. Tolerances and time limits are
// fixed below; the exit status is the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "periodica/certify.hpp"
#include "periodica/cheb.hpp"
#include "periodica/interval.hpp"
#include "periodica/pdcurve.hpp"
#include "periodica/sweep.hpp"
#include "../unit/oracle.hpp"

using namespace periodica;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

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

bool within_rel(double v, double ref, double rel) { return std::fabs(v - ref) <= rel * std::fabs(ref); }

template <class F>
std::vector<double> least_period_roots(F f, int p, double step) {
    auto iterate = [&](double x, int k) {
        for (int i = 0; i < k; ++i) {
            x = f(x);
        }
        return x;
    };
    auto g = [&](double x) { return iterate(x, p) - x; };
    std::vector<double> roots;
    const long n = static_cast<long>(std::ceil(1.0 / step));
    double x0 = 0.0;
    double g0 = g(x0);
    if (g0 == 0.0) {
        roots.push_back(x0);
    }
    for (long i = 1; i <= n; ++i) {
        const double x1 = i == n ? 1.0 : static_cast<double>(i) * step;
        const double g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0) != (g1 < 0)) {
            double lo = x0, hi = x1, glo = g0;
            for (double mid = 0.5 * (lo + hi); mid > lo && mid < hi; mid = 0.5 * (lo + hi)) {
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm < 0) == (glo < 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    std::vector<double> out;
    for (double r : roots) {
        bool lower = false;
        for (int k = 1; k < p; ++k) {
            lower = lower || (p % k == 0 && std::fabs(iterate(r, k) - r) < 1e-7);
        }
        if (!lower) {
            out.push_back(r);
        }
    }
    return out;
}

std::vector<Certificate> distinct_orbits(const MapDef& m, int p, const SeedOptions& opts = {}) {
    return census_cell(m, p, opts);
}

// Slack for comparing an oracle root, itself only accurate to a few ulps of
// f^p - id, with a certificate ball.
constexpr double kRootSlack = 1e-12;

Outcome criterion1() {
    Outcome o;
    const MapDef m = MapDef::logistic(Param::parse("3.2"));
    const Certificate c = certify_orbit(given(m, vec({0.51, 0.79})));
    const Bounds& b = c.bounds;
    o.detail << "Y<=" << b.Y.hi() << " Z1<=" << b.Z1.hi() << " Z2=[" << b.Z2.lo() << "," << b.Z2.hi() << "] lambda=["
             << c.eigenvalue.lo() << "," << c.eigenvalue.hi() << "]";
    o.require(b.Y.hi() >= 0.012775 && b.Y.hi() <= 0.012776, "Y");
    o.require(within_rel(b.Y.hi(), 0.0127751, 1e-6) || (b.Y.hi() <= 0.0127751 && b.Y.lo() >= 0.012775), "Y vs reference");
    o.require(b.Z1.hi() <= 1e-15, "Z1");
    o.require(b.Z2.lo() >= 20.742 && b.Z2.hi() <= 20.743, "Z2");
    o.require((b.Z2.lo() >= 20.7422 || within_rel(b.Z2.lo(), 20.7422, 1e-6)) &&
                  (b.Z2.hi() <= 20.7423 || within_rel(b.Z2.hi(), 20.7423, 1e-6)),
              "Z2 vs reference");
    o.require(radius_admissible(b, std::ldexp(1.0, -6), AprioriRadius::unbounded()), "r = 2^-6");
    o.require(c.eigenvalue.lo() >= -0.065 && c.eigenvalue.hi() <= 0.315 && c.eigenvalue.contains(0.16), "lambda");
    o.require((c.eigenvalue.lo() >= -0.0644712 || within_rel(c.eigenvalue.lo(), -0.0644712, 1e-6)) &&
                  (c.eigenvalue.hi() <= 0.314457 || within_rel(c.eigenvalue.hi(), 0.314457, 1e-6)),
              "lambda vs reference");
    o.require(c.verified && c.stability == Stability::stable, "stable verdict");
    return o;
}

Outcome criterion2() {
    Outcome o;
    const MapDef m = MapDef::logistic(Param::parse("3.2"));
    const Certificate c = certify_orbit(given(m, vec({0.513044509531044, 0.7994554904683129})));
    o.detail << "r_star=" << c.r_star();
    o.require(c.verified && c.r_star() <= 1e-11, "r_star <= 1e-11");
    return o;
}

Outcome criterion3() {
    Outcome o;
    const MapDef m = MapDef::logistic(3.83);
    const auto orbits = distinct_orbits(m, 3);
    const auto roots = least_period_roots([&](double x) { return m.f(x); }, 3, 1e-6);
    o.detail << "mu=3.83 orbits=" << orbits.size() << " oracle points=" << roots.size();
    o.require(!orbits.empty(), "a period-3 orbit");
    for (const auto& c : orbits) {
        o.require(c.distinct, "distinct");
        for (double x : c.candidate.x_bar) {
            bool hit = false;
            for (double r : roots) {
                hit = hit || std::fabs(x - r) <= c.r_star() + kRootSlack;
            }
            o.require(hit, "orbit point matches an oracle root");
        }
    }
    o.require(orbits.size() * 3 == roots.size(), "orbit count matches oracle");
    return o;
}

Outcome criterion4() {
    Outcome o;
    int checked = 0;
    for (double mu : {3.2, 3.5, 3.83}) {
        const MapDef m = MapDef::logistic(mu);
        for (int p = 1; p <= 4; ++p) {
            const auto orbits = distinct_orbits(m, p);
            const auto roots = least_period_roots([&](double x) { return m.f(x); }, p, 1e-6);
            std::ostringstream tag;
            tag << "mu=" << mu << " p=" << p;
            o.require(orbits.size() * static_cast<std::size_t>(p) == roots.size(), tag.str() + " count");
            for (double r : roots) {
                int hits = 0;
                for (const auto& c : orbits) {
                    for (double x : c.candidate.x_bar) {
                        hits += std::fabs(x - r) <= c.r_star() + kRootSlack ? 1 : 0;
                    }
                }
                o.require(hits == 1, tag.str() + " root in exactly one ball");
            }
            checked += static_cast<int>(roots.size());
        }
    }
    o.detail << "oracle points matched=" << checked;
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto below = distinct_orbits(MapDef::predprey(-3.0, -10.0), 2);
    const auto fixed = distinct_orbits(MapDef::predprey(-3.0, -8.0), 1);
    const auto above = distinct_orbits(MapDef::predprey(-3.0, -8.0), 2);
    int stable_fixed = 0;
    for (const auto& c : fixed) {
        stable_fixed += c.stability == Stability::stable ? 1 : 0;
    }
    o.detail << "kappa=-10 p2 orbits=" << below.size() << "; kappa=-8 stable fixed points=" << stable_fixed
             << " p2 orbits=" << above.size();
    o.require(!below.empty(), "period 2 at kappa = -10");
    o.require(stable_fixed >= 1, "stable fixed point at kappa = -8");
    o.require(above.empty(), "no period 2 at kappa = -8");
    return o;
}

Outcome criterion6() {
    Outcome o;
    const ExtendedCandidate cand = node_solve(1, {-12.0, -10.0}, 16, analytic_p1_seed(-12.0));
    const CurveCertificate c = certify_curve(cand);
    o.detail << "r_star=" << c.r_star();
    o.require(c.verified && c.r_star() <= 1e-6, "uniform certificate");
    int inside = 0;
    for (const CurveSample& s : sample_curve(c, 10)) {
        // Root of beta^2 - kappa beta - 2 kappa = 0 with beta < -4.
        const double beta = (s.kappa - std::sqrt(s.kappa * s.kappa + 8.0 * s.kappa)) / 2.0;
        inside += s.beta.lo() - kRootSlack <= beta && beta <= s.beta.hi() + kRootSlack ? 1 : 0;
    }
    o.detail << " samples inside=" << inside << "/10";
    o.require(inside == 10, "analytic root in every sample");
    return o;
}

Outcome criterion7() {
    Outcome o;
    BranchOptions opts;
    opts.K = 16;
    opts.N = 10;
    opts.adaptive = false;
    const auto seeds16 = locate_doubling_points(2, -16.0);
    double worst = 0.0;
    for (const auto& s : seeds16) {
        const CurveCertificate c = certify_curve(node_solve(2, {-16.0, -13.0}, 16, s));
        o.require(c.verified, "window [-16, -13]");
        worst = std::max(worst, c.r_star());
    }
    o.require(!seeds16.empty(), "doubling points at kappa = -16");
    o.require(worst <= 1e-3, "r_star <= 1e-3 on [-16, -13]");
    o.detail << "branches=" << seeds16.size() << " worst r_star on [-16,-13]=" << worst;

    std::vector<KappaWindow> windows;
    for (int j = 0; j < 6; ++j) {
        windows.push_back({-31.0 + 3.0 * j, -28.0 + 3.0 * j});
    }
    const auto seeds31 = locate_doubling_points(2, -31.0);
    int chained = 0;
    for (const auto& s : seeds31) {
        const BranchResult b = certify_branch(2, windows, s, -31.0, opts);
        const bool ok = b.chained() && b.coverage().kappa1 == -31.0 && b.coverage().kappa2 == -13.0;
        chained += ok ? 1 : 0;
    }
    o.detail << " chains over [-31,-13]=" << chained << "/" << seeds31.size();
    o.require(!seeds31.empty() && chained == static_cast<int>(seeds31.size()), "six windows patch into a chain");
    return o;
}

Outcome criterion8() {
    Outcome o;
    SweepConfig cfg;
    cfg.map_id = "logistic";
    cfg.grid = {{3.0, 4.0, 0.02}};
    cfg.p_max = 8;
    cfg.budget = 128;
    cfg.grid_points = 1 << 14;
    cfg.workers = 1;
    const SweepResult one = run_sweep(cfg);
    cfg.workers = 4;
    const SweepResult four = run_sweep(cfg);
    o.require(one.rows == four.rows && one.total_orbits() == four.total_orbits(), "logistic worker invariance");

    SweepConfig pp;
    pp.map_id = "predprey";
    pp.grid = {{-12.0, -2.0, 2.0}, {-30.0, -6.0, 4.0}};
    pp.p_max = 4;
    pp.budget = 64;
    pp.grid_points = 1 << 12;
    pp.workers = 1;
    const SweepResult pp1 = run_sweep(pp);
    pp.workers = 3;
    const SweepResult pp3 = run_sweep(pp);
    o.require(pp1.rows == pp3.rows, "predprey worker invariance");

    std::vector<std::string> problems;
    std::size_t reverified = 0;
    for (const SweepResult* r : {&one, &pp1}) {
        const auto rows = recount(r->archive, &problems);
        long total = 0;
        for (const auto& row : rows) {
            total += row.total();
        }
        o.require(total == r->total_orbits(), "recount total");
        reverified += r->archive.size();
    }
    o.require(problems.empty(), "archive re-verification");

    std::vector<long> counts;
    SweepConfig mono;
    mono.map_id = "logistic";
    mono.p_max = 8;
    mono.budget = 256;
    for (double mu : {3.2, 3.5, 3.57, 3.83, 3.99}) {
        mono.grid = {{mu, mu, 1.0}};
        counts.push_back(run_sweep(mono).total_orbits());
    }
    bool nondecreasing = true;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        nondecreasing = nondecreasing && counts[i] >= counts[i - 1];
    }
    o.detail << "logistic orbits=" << one.total_orbits() << " predprey orbits=" << pp1.total_orbits()
             << " re-verified=" << reverified << " counts(3.2,3.5,3.57,3.83,3.99)=";
    for (long c : counts) {
        o.detail << c << " ";
    }
    o.require(nondecreasing, "nondecreasing count");
    return o;
}

Outcome criterion9() {
    Outcome o;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> op(0, 4);
    long containment = 0;
    // The exact real result at a point of each operand must lie in the
    // interval result; the exact value is bracketed by MPFR.
    auto inside = [](const Interval& r, const oracle::Bracket& b) {
        return mpfr_cmp_d(b.down.get(), r.lo()) >= 0 && mpfr_cmp_d(b.up.get(), r.hi()) <= 0;
    };
    for (int t = 0; t < 100000; ++t) {
        const double a = oracle::random_double(rng, -30, 30);
        const double b = oracle::random_double(rng, -30, 30);
        const Interval x(std::min(a, a * (1 + 1e-9)), std::max(a, a * (1 + 1e-9)));
        const Interval y(std::min(b, b * (1 - 1e-9)), std::max(b, b * (1 - 1e-9)));
        const double sx = (t & 1) ? x.lo() : x.hi();
        const double sy = (t & 2) ? y.lo() : y.hi();
        bool ok = true;
        switch (op(rng)) {
        case 0:
            ok = inside(x + y, oracle::add(sx, sy));
            break;
        case 1:
            ok = inside(x - y, oracle::sub(sx, sy));
            break;
        case 2:
            ok = inside(x * y, oracle::mul(sx, sy));
            break;
        case 3:
            ok = inside(x / y, oracle::div(sx, sy));
            break;
        default: {
            const double e = std::ldexp(sx, -25);
            ok = inside(exp(Interval(e)), oracle::exp(e));
            break;
        }
        }
        containment += ok ? 0 : 1;
    }

    auto random_seq = [&](std::size_t degree) {
        std::vector<Interval> c;
        for (std::size_t k = 0; k <= degree; ++k) {
            c.emplace_back(u(rng) / static_cast<double>(1 + k));
        }
        return ChebSeq(std::move(c));
    };
    long submult = 0;
    for (int t = 0; t < 10000; ++t) {
        const ChebSeq x = random_seq(static_cast<std::size_t>(t % 16));
        const ChebSeq y = random_seq(static_cast<std::size_t>((t / 16) % 16));
        submult += (x * y).norm().lo() <= (x.norm() * y.norm()).hi() ? 0 : 1;
    }
    long domination = 0;
    for (int t = 0; t < 1000; ++t) {
        const ChebSeq s = random_seq(12);
        const double bound = s.norm().hi();
        for (int j = 0; j < 100; ++j) {
            // psi_0 + 2 sum psi_k T_k(a) at 4096 bits; cheb_eval itself clips
            // to the norm and so cannot serve as the witness.
            const double a = u(rng);
            oracle::Real x(a), tprev(1.0), tk(a), sum(s[0].mid()), term, next;
            for (std::size_t k = 1; k <= s.degree(); ++k) {
                mpfr_mul_d(term.get(), tk.get(), 2.0 * s[k].mid(), MPFR_RNDN);
                mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
                mpfr_mul(next.get(), x.get(), tk.get(), MPFR_RNDN);
                mpfr_mul_2ui(next.get(), next.get(), 1, MPFR_RNDN);
                mpfr_sub(next.get(), next.get(), tprev.get(), MPFR_RNDN);
                tprev = tk;
                tk = next;
            }
            mpfr_abs(sum.get(), sum.get(), MPFR_RNDN);
            domination += mpfr_cmp_d(sum.get(), bound) <= 0 ? 0 : 1;
        }
    }
    o.detail << "containment violations=" << containment << "/100000 submultiplicativity=" << submult
             << "/10000 C0 domination=" << domination << "/100000";
    o.require(containment == 0 && submult == 0 && domination == 0, "zero violations");
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "logistic period-2 walkthrough", 1.0, criterion1},
        {2, "refined period-2 radius", 1.0, criterion2},
        {3, "period-3 orbit near mu = 3.83", 10.0, criterion3},
        {4, "bisection oracle equivalence", 60.0, criterion4},
        {5, "predator-prey pointwise", 10.0, criterion5},
        {6, "fixed-point doubling curve", 30.0, criterion6},
        {7, "period-2 doubling curves", 600.0, criterion7},
        {8, "census properties", 900.0, criterion8},
        {9, "kernel property suites", 60.0, criterion9},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.limit_seconds, "time limit");
        failed += o.pass ? 0 : 1;
        std::printf("criterion %d %s: %s (%.2fs < %.0fs) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                    c.limit_seconds, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed;
}
