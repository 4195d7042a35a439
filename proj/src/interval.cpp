#include "periodica/interval.hpp"

#include <cfenv>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace periodica {

namespace {

// glibc's strtod honors the current rounding mode; the mode is per-thread
// and restored on scope exit.
class ScopedRoundingMode {
  public:
    explicit ScopedRoundingMode(int mode) : saved_(std::fegetround()) { std::fesetround(mode); }
    ~ScopedRoundingMode() { std::fesetround(saved_); }
    ScopedRoundingMode(const ScopedRoundingMode&) = delete;
    ScopedRoundingMode& operator=(const ScopedRoundingMode&) = delete;

  private:
    int saved_;
};

std::string trimmed(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\n\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\n\r");
    return std::string(text.substr(first, last - first + 1));
}

bool looks_numeric(const std::string& s) {
    // Rejects "inf", "nan" and friends that strtod would otherwise accept.
    for (char ch : s) {
        if (ch == 'n' || ch == 'N' || ch == 'i' || ch == 'I') {
            return false;
        }
    }
    return !s.empty();
}

double strtod_with_mode(const std::string& s, int mode) {
    ScopedRoundingMode guard(mode);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw std::invalid_argument("malformed numeric literal: '" + s + "'");
    }
    return v;
}

Interval pow_nonneg(const Interval& x, unsigned n) {
    Interval result(1.0);
    Interval base = x;
    while (n > 0) {
        if (n & 1U) {
            result = result * base;
        }
        n >>= 1U;
        if (n > 0) {
            base = base * base;
        }
    }
    return result;
}

}  // namespace

Interval Interval::from_decimal(std::string_view text) {
    const std::string s = trimmed(text);
    if (!looks_numeric(s)) {
        throw std::invalid_argument("malformed numeric literal: '" + std::string(text) + "'");
    }
    const double lo = strtod_with_mode(s, FE_DOWNWARD);
    const double hi = strtod_with_mode(s, FE_UPWARD);
    return Interval(lo, hi);
}

Interval pow(const Interval& x, unsigned n) {
    if (n == 0) {
        return Interval(1.0);
    }
    if (n % 2 == 0) {
        return pow_nonneg(sqr(x), n / 2);
    }
    if (x.lo() >= 0.0) {
        return pow_nonneg(x, n);
    }
    if (x.hi() <= 0.0) {
        return -pow_nonneg(-x, n);
    }
    const double lo = -pow_nonneg(Interval(0.0, -x.lo()), n).hi();
    const double hi = pow_nonneg(Interval(0.0, x.hi()), n).hi();
    return Interval(lo, hi);
}

Interval exp(const Interval& x) {
    using rounding::next_down;
    using rounding::next_up;
    if (x.lo() == 0.0 && x.hi() == 0.0) {
        return Interval(1.0);
    }
    const double hi_native = std::exp(x.hi());
    if (!std::isfinite(hi_native)) {
        throw UnboundedResult("exp overflow");
    }
    const double hi = next_up(next_up(hi_native));
    if (!std::isfinite(hi)) {
        throw UnboundedResult("exp overflow");
    }
    double lo = next_down(next_down(std::exp(x.lo())));
    if (lo < 0.0) {
        lo = 0.0;
    }
    return Interval(lo, hi);
}

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
    IntervalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = Interval(1.0);
    }
    return m;
}

IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("interval matrix product: dimension mismatch");
    }
    IntervalMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Interval s;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += a(i, k) * b(k, j);
            }
            c(i, j) = s;
        }
    }
    return c;
}

IntervalVector operator*(const IntervalMatrix& a, std::span<const Interval> x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("interval matrix-vector product: dimension mismatch");
    }
    IntervalVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Interval s;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            s += a(i, k) * x[k];
        }
        y[i] = s;
    }
    return y;
}

IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("interval matrix difference: dimension mismatch");
    }
    IntervalMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            c(i, j) = a(i, j) - b(i, j);
        }
    }
    return c;
}

Interval vec_norm1(std::span<const Interval> x) {
    Interval s;
    for (const auto& xi : x) {
        s += abs(xi);
    }
    return s;
}

Interval op_norm1(const IntervalMatrix& a) {
    Interval best;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        Interval col;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            col += abs(a(i, j));
        }
        best = j == 0 ? col : max(best, col);
    }
    return best;
}

std::string to_hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double parse_double(std::string_view text) {
    const std::string s = trimmed(text);
    if (!looks_numeric(s)) {
        throw std::invalid_argument("malformed numeric literal: '" + std::string(text) + "'");
    }
    return strtod_with_mode(s, FE_TONEAREST);
}

}  // namespace periodica
