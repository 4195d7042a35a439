#pragma once

// Extended-precision reference values. Single operations are bracketed by
// MPFR rounding down and up; composite ones round internally at 4096 bits,
// far below double resolution.

#include <mpfr.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "periodica/interval.hpp"

namespace oracle {

inline constexpr mpfr_prec_t kPrec = 4096;

class Real {
  public:
    Real() { mpfr_init2(v_, kPrec); }
    explicit Real(double x) : Real() { mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const Real& o) : Real() { mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real& operator=(const Real& o) {
        mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

  private:
    mpfr_t v_;
};

/// Result of an MPFR operation rounded both ways; exact when the two agree.
struct Bracket {
    Real down;
    Real up;
};

template <class Op>
Bracket bracket(Op op) {
    Bracket b;
    op(b.down.get(), MPFR_RNDD);
    op(b.up.get(), MPFR_RNDU);
    return b;
}

/// lo <= true value <= hi, decided with the conservative MPFR bracket.
inline bool encloses(const periodica::Interval& x, const Bracket& b) {
    return mpfr_cmp_d(b.down.get(), x.lo()) >= 0 && mpfr_cmp_d(b.up.get(), x.hi()) <= 0;
}

inline Bracket add(double a, double b) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a), y(b);
        mpfr_add(r, x.get(), y.get(), m);
    });
}
inline Bracket sub(double a, double b) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a), y(b);
        mpfr_sub(r, x.get(), y.get(), m);
    });
}
inline Bracket mul(double a, double b) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a), y(b);
        mpfr_mul(r, x.get(), y.get(), m);
    });
}
inline Bracket div(double a, double b) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a), y(b);
        mpfr_div(r, x.get(), y.get(), m);
    });
}
inline Bracket sqrt(double a) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a);
        mpfr_sqrt(r, x.get(), m);
    });
}
inline Bracket exp(double a) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a);
        mpfr_exp(r, x.get(), m);
    });
}
/// The exact real denoted by a decimal literal.
inline Bracket decimal(const char* text) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) { mpfr_set_str(r, text, 10, m); });
}

/// Oracle h(x) = -1/(1+e^x) rounded down and up.
inline Bracket reflected_sigmoid(double a) {
    return bracket([&](mpfr_ptr r, mpfr_rnd_t m) {
        Real x(a);
        mpfr_exp(r, x.get(), MPFR_RNDN);
        mpfr_add_ui(r, r, 1, MPFR_RNDN);
        mpfr_ui_div(r, 1, r, m == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD);
        mpfr_neg(r, r, MPFR_RNDN);
    });
}

inline double to_double(const Real& x) { return mpfr_get_d(x.get(), MPFR_RNDN); }

/// Random double with a random sign and a binary exponent in [emin, emax].
inline double random_double(std::mt19937_64& rng, int emin, int emax) {
    std::uniform_real_distribution<double> mant(1.0, 2.0);
    std::uniform_int_distribution<int> ex(emin, emax);
    std::bernoulli_distribution sign(0.5);
    const double v = std::ldexp(mant(rng), ex(rng));
    return sign(rng) ? -v : v;
}

/// Roots of g on [a, b] by a sign-change scan with spacing `step` followed
/// by bisection to full precision. Exact zeros on the grid are kept.
template <class G>
std::vector<double> scan_roots(G g, double a, double b, double step) {
    std::vector<double> roots;
    const long n = static_cast<long>(std::ceil((b - a) / step));
    double x0 = a;
    double g0 = g(x0);
    if (g0 == 0.0) {
        roots.push_back(x0);
    }
    for (long i = 1; i <= n; ++i) {
        const double x1 = i == n ? b : a + static_cast<double>(i) * step;
        const double g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0) != (g1 < 0)) {
            double lo = x0, hi = x1, glo = g0;
            while (true) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
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
    return roots;
}

/// Points of least period p of x -> f(x) on [a, b] found by the scan of
/// f^p(x) - x; lower-period points are dropped.
template <class F>
std::vector<double> least_period_points(F f, int p, double a, double b, double step) {
    auto iterate = [&](double x, int k) {
        for (int i = 0; i < k; ++i) {
            x = f(x);
        }
        return x;
    };
    std::vector<double> out;
    for (double r : scan_roots([&](double x) { return iterate(x, p) - x; }, a, b, step)) {
        bool lower = false;
        for (int k = 1; k < p; ++k) {
            if (p % k == 0 && std::fabs(iterate(r, k) - r) < 1e-7) {
                lower = true;
            }
        }
        if (!lower) {
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace oracle
