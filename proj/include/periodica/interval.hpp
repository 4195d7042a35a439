#pragma once

// Interval arithmetic with outward rounding.
//
// Directed rounding is emulated from the default round-to-nearest mode with
// error-free transformations: the exact rounding error of every +, -, x, /,
// sqrt is recovered (TwoSum, TwoProduct, exact remainders) and the result is
// stepped one ulp outward only when the error points that way. This yields
// the same endpoints as hardware round-down/round-up without touching the
// floating-point environment, so intervals can be shared freely between
// threads. Near the underflow/overflow thresholds, where the transformations
// lose exactness, results are widened by one ulp unconditionally.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace periodica {

class IntervalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operation undefined on part of the input (division by an interval
/// containing zero, sqrt of a negative number, ...).
class DomainError : public IntervalError {
  public:
    using IntervalError::IntervalError;
};

/// An endpoint overflowed to infinity.
class UnboundedResult : public IntervalError {
  public:
    using IntervalError::IntervalError;
};

namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double next_down(double x) { return std::nextafter(x, -kInf); }
inline double next_up(double x) { return std::nextafter(x, kInf); }

namespace detail {

// Results below this magnitude may carry an inexact error term.
inline constexpr double kTiny = 0x1p-968;
// Dekker splitting overflows above this magnitude.
inline constexpr double kHuge = 0x1p+995;

struct Split {
    double value;
    double error;  // exact: true result = value + error (sign is what matters)
};

inline Split two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline Split two_product(double a, double b) {
    const double p = a * b;
#if defined(__FMA__) || defined(__FP_FAST_FMA)
    return {p, std::fma(a, b, -p)};
#else
    constexpr double kSplitter = 134217729.0;  // 2^27 + 1
    const double ca = kSplitter * a;
    const double ah = ca - (ca - a);
    const double al = a - ah;
    const double cb = kSplitter * b;
    const double bh = cb - (cb - b);
    const double bl = b - bh;
    const double err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    return {p, err};
#endif
}

inline void check_finite(double v) {
    if (!std::isfinite(v)) {
        throw UnboundedResult("interval endpoint overflowed");
    }
}

}  // namespace detail

inline double add_down(double a, double b) {
    const auto [s, e] = detail::two_sum(a, b);
    detail::check_finite(s);
    return e < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
    const auto [s, e] = detail::two_sum(a, b);
    detail::check_finite(s);
    return e > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
    const double p = a * b;
    detail::check_finite(p);
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double m = std::max(std::fabs(a), std::fabs(b));
    if (std::fabs(p) < detail::kTiny || m > detail::kHuge) {
        return next_down(p);
    }
    const auto e = detail::two_product(a, b).error;
    return e < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
    const double p = a * b;
    detail::check_finite(p);
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    const double m = std::max(std::fabs(a), std::fabs(b));
    if (std::fabs(p) < detail::kTiny || m > detail::kHuge) {
        return next_up(p);
    }
    const auto e = detail::two_product(a, b).error;
    return e > 0 ? next_up(p) : p;
}

namespace detail {

// Sign of (a/b - q) for q = RN(a/b), or 0 when exact; returns 2 when the
// remainder cannot be computed exactly.
inline int division_direction(double a, double b, double q) {
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny || std::fabs(q) > kHuge ||
        std::fabs(b) > kHuge) {
        return 2;
    }
    // a - q*b is exact; compare a - hi against lo without rounding.
    const auto [hi, lo] = two_product(q, b);
    const double d = a - hi;
    const int rem_sign = d > lo ? 1 : (d < lo ? -1 : 0);
    return b > 0 ? rem_sign : -rem_sign;
}

}  // namespace detail

inline double div_down(double a, double b) {
    const double q = a / b;
    detail::check_finite(q);
    if (a == 0.0) {
        return 0.0;
    }
    const int dir = detail::division_direction(a, b, q);
    return (dir < 0 || dir == 2) ? next_down(q) : q;
}

inline double div_up(double a, double b) {
    const double q = a / b;
    detail::check_finite(q);
    if (a == 0.0) {
        return 0.0;
    }
    const int dir = detail::division_direction(a, b, q);
    return (dir > 0) ? next_up(q) : q;
}

namespace detail {

inline int sqrt_direction(double a, double s) {
    if (s < kTiny || s > kHuge) {
        return 2;
    }
    const auto [hi, lo] = two_product(s, s);
    const double d = a - hi;
    return d > lo ? 1 : (d < lo ? -1 : 0);
}

}  // namespace detail

inline double sqrt_down(double a) {
    if (a == 0.0) {
        return 0.0;
    }
    const double s = std::sqrt(a);
    const int dir = detail::sqrt_direction(a, s);
    return (dir < 0 || dir == 2) ? next_down(s) : s;
}

inline double sqrt_up(double a) {
    if (a == 0.0) {
        return 0.0;
    }
    const double s = std::sqrt(a);
    const int dir = detail::sqrt_direction(a, s);
    return (dir > 0 || dir == 2) ? next_up(s) : s;
}

}  // namespace rounding

/// Closed interval [lo, hi] with finite binary64 endpoints.
class Interval {
  public:
    constexpr Interval() noexcept = default;

    /// Point interval; the double is taken as the exact binary value.
    explicit Interval(double x) : lo_(x), hi_(x) {
        if (!std::isfinite(x)) {
            throw UnboundedResult("non-finite interval endpoint");
        }
    }

    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            throw UnboundedResult("non-finite interval endpoint");
        }
        if (!(lo <= hi)) {
            throw DomainError("interval lower endpoint exceeds upper endpoint");
        }
    }

    /// Tightest enclosure of a decimal literal (e.g. "3.2"); exactly
    /// representable literals give point intervals. Hex-float literals are
    /// accepted and always exact.
    static Interval from_decimal(std::string_view text);

    /// Hull of two doubles in either order.
    static Interval hull(double a, double b) { return a <= b ? Interval(a, b) : Interval(b, a); }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

    /// Midpoint rounded to nearest (always inside the interval).
    double mid() const noexcept {
        const double m = 0.5 * lo_ + 0.5 * hi_;
        return m < lo_ ? lo_ : (m > hi_ ? hi_ : m);
    }
    /// Upper bound of hi - lo.
    double width() const { return rounding::sub_up(hi_, lo_); }
    /// Upper bound of the radius about mid().
    double rad() const {
        const double m = mid();
        return std::max(rounding::sub_up(m, lo_), rounding::sub_up(hi_, m));
    }
    /// Magnitude: max |x| over the interval.
    double mag() const noexcept { return std::max(std::fabs(lo_), std::fabs(hi_)); }
    /// Mignitude: min |x| over the interval.
    double mig() const noexcept {
        if (lo_ <= 0.0 && hi_ >= 0.0) {
            return 0.0;
        }
        return std::min(std::fabs(lo_), std::fabs(hi_));
    }

    bool is_point() const noexcept { return lo_ == hi_; }
    bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& other) const noexcept {
        return lo_ <= other.lo_ && other.hi_ <= hi_;
    }
    bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool subset_of(const Interval& other) const noexcept { return other.contains(*this); }
    bool interior_contains(const Interval& other) const noexcept {
        return lo_ < other.lo_ && other.hi_ < hi_;
    }

    /// Certainly-less: every element of *this is below every element of other.
    bool certainly_lt(const Interval& other) const noexcept { return hi_ < other.lo_; }
    bool certainly_le(const Interval& other) const noexcept { return hi_ <= other.lo_; }

    friend bool operator==(const Interval&, const Interval&) = default;

    Interval operator-() const noexcept {
        Interval r;
        r.lo_ = -hi_;
        r.hi_ = -lo_;
        return r;
    }

    Interval& operator+=(const Interval& y);
    Interval& operator-=(const Interval& y);
    Interval& operator*=(const Interval& y);
    Interval& operator/=(const Interval& y);

  private:
    struct Unchecked {};
    Interval(double lo, double hi, Unchecked) noexcept : lo_(lo), hi_(hi) {}

    friend Interval operator+(const Interval&, const Interval&);
    friend Interval operator-(const Interval&, const Interval&);
    friend Interval operator*(const Interval&, const Interval&);
    friend Interval operator/(const Interval&, const Interval&);
    friend Interval sqr(const Interval&);
    friend Interval sqrt(const Interval&);

    double lo_ = 0.0;
    double hi_ = 0.0;
};

inline Interval operator+(const Interval& x, const Interval& y) {
    return {rounding::add_down(x.lo_, y.lo_), rounding::add_up(x.hi_, y.hi_), Interval::Unchecked{}};
}

inline Interval operator-(const Interval& x, const Interval& y) {
    return {rounding::sub_down(x.lo_, y.hi_), rounding::sub_up(x.hi_, y.lo_), Interval::Unchecked{}};
}

inline Interval operator*(const Interval& x, const Interval& y) {
    using namespace rounding;
    const double a = x.lo_, b = x.hi_, c = y.lo_, d = y.hi_;
    if (a >= 0.0) {
        if (c >= 0.0) {
            return {mul_down(a, c), mul_up(b, d), Interval::Unchecked{}};
        }
        if (d <= 0.0) {
            return {mul_down(b, c), mul_up(a, d), Interval::Unchecked{}};
        }
        return {mul_down(b, c), mul_up(b, d), Interval::Unchecked{}};
    }
    if (b <= 0.0) {
        if (c >= 0.0) {
            return {mul_down(a, d), mul_up(b, c), Interval::Unchecked{}};
        }
        if (d <= 0.0) {
            return {mul_down(b, d), mul_up(a, c), Interval::Unchecked{}};
        }
        return {mul_down(a, d), mul_up(a, c), Interval::Unchecked{}};
    }
    // x straddles zero
    if (c >= 0.0) {
        return {mul_down(a, d), mul_up(b, d), Interval::Unchecked{}};
    }
    if (d <= 0.0) {
        return {mul_down(b, c), mul_up(a, c), Interval::Unchecked{}};
    }
    return {std::min(mul_down(a, d), mul_down(b, c)), std::max(mul_up(a, c), mul_up(b, d)),
            Interval::Unchecked{}};
}

inline Interval operator/(const Interval& x, const Interval& y) {
    using namespace rounding;
    if (y.contains_zero()) {
        throw DomainError("interval division by an interval containing zero");
    }
    const double a = x.lo_, b = x.hi_, c = y.lo_, d = y.hi_;
    if (c > 0.0) {
        if (a >= 0.0) {
            return {div_down(a, d), div_up(b, c), Interval::Unchecked{}};
        }
        if (b <= 0.0) {
            return {div_down(a, c), div_up(b, d), Interval::Unchecked{}};
        }
        return {div_down(a, c), div_up(b, c), Interval::Unchecked{}};
    }
    // y < 0
    if (a >= 0.0) {
        return {div_down(b, d), div_up(a, c), Interval::Unchecked{}};
    }
    if (b <= 0.0) {
        return {div_down(b, c), div_up(a, d), Interval::Unchecked{}};
    }
    return {div_down(b, d), div_up(a, d), Interval::Unchecked{}};
}

inline Interval& Interval::operator+=(const Interval& y) { return *this = *this + y; }
inline Interval& Interval::operator-=(const Interval& y) { return *this = *this - y; }
inline Interval& Interval::operator*=(const Interval& y) { return *this = *this * y; }
inline Interval& Interval::operator/=(const Interval& y) { return *this = *this / y; }

// Mixed forms: the double operand is an exact binary value.
inline Interval operator+(const Interval& x, double y) { return x + Interval(y); }
inline Interval operator+(double x, const Interval& y) { return Interval(x) + y; }
inline Interval operator-(const Interval& x, double y) { return x - Interval(y); }
inline Interval operator-(double x, const Interval& y) { return Interval(x) - y; }
inline Interval operator*(const Interval& x, double y) { return x * Interval(y); }
inline Interval operator*(double x, const Interval& y) { return Interval(x) * y; }
inline Interval operator/(const Interval& x, double y) { return x / Interval(y); }
inline Interval operator/(double x, const Interval& y) { return Interval(x) / y; }

inline Interval abs(const Interval& x) {
    if (x.lo() >= 0.0) {
        return x;
    }
    if (x.hi() <= 0.0) {
        return -x;
    }
    return {0.0, x.mag()};
}

/// x^2 without the dependency overestimate of x*x.
inline Interval sqr(const Interval& x) {
    using namespace rounding;
    const double m = x.mig();
    const double M = x.mag();
    return {m == 0.0 ? 0.0 : mul_down(m, m), mul_up(M, M), Interval::Unchecked{}};
}

/// Integer power by repeated squaring; even powers are nonnegative.
Interval pow(const Interval& x, unsigned n);

inline Interval sqrt(const Interval& x) {
    if (x.lo() < 0.0) {
        throw DomainError("sqrt of an interval with negative part");
    }
    return {rounding::sqrt_down(x.lo()), rounding::sqrt_up(x.hi()), Interval::Unchecked{}};
}

/// Enclosure of e^x. Endpoints use the native exp widened by two ulp,
/// which is sound for any libm with error of at most one ulp.
Interval exp(const Interval& x);

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) {
        return std::nullopt;
    }
    return Interval(lo, hi);
}

/// [max(a.lo, b.lo), max(a.hi, b.hi)]: encloses max(x, y) for x in a, y in b.
inline Interval max(const Interval& a, const Interval& b) {
    return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

/// [x - r, x + r] with outward rounding.
inline Interval ball(double center, double radius) {
    return {rounding::sub_down(center, radius), rounding::add_up(center, radius)};
}

// ---------------------------------------------------------------------------
// Vectors and matrices

using IntervalVector = std::vector<Interval>;

/// Dense square-or-rectangular interval matrix, row-major.
class IntervalMatrix {
  public:
    IntervalMatrix() = default;
    IntervalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static IntervalMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Interval& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Interval> data_;
};

IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalVector operator*(const IntervalMatrix& a, std::span<const Interval> x);
IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b);

/// Enclosure of sum_i |x_i|.
Interval vec_norm1(std::span<const Interval> x);

/// Enclosure of the induced 1-norm max_j sum_i |A_ij|.
Interval op_norm1(const IntervalMatrix& a);

// ---------------------------------------------------------------------------
// Bit-exact text form

/// Lowercase hexadecimal floating-point literal, e.g. "0x1.91eb851eb851fp+1".
std::string to_hex(double x);

/// Parses a hex-float or decimal literal to the nearest double; throws
/// std::invalid_argument on malformed input.
double parse_double(std::string_view text);

}  // namespace periodica
