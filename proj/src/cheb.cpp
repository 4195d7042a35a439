#include "periodica/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace periodica {

namespace {

// Absolute error allowance on native cos(k pi / K); the true error is below 1e-15.
constexpr double kNodeSlack = 0x1p-48;

Interval node_enclosure(std::size_t k, std::size_t K) {
    if (k == 0) {
        return Interval(-1.0);
    }
    if (k == K) {
        return Interval(1.0);
    }
    if (2 * k == K) {
        return Interval(0.0);
    }
    if (2 * k > K) {
        return -node_enclosure(K - k, K);
    }
    const double c = -std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(K));
    return Interval(std::max(-1.0, rounding::sub_down(c, kNodeSlack)), std::min(1.0, rounding::add_up(c, kNodeSlack)));
}

// T_n at node k, using cos(j pi / K) = -a_j for j <= K.
Interval chebyshev_at_node(std::size_t n, std::size_t k, const std::vector<Interval>& nodes) {
    const std::size_t K = nodes.size() - 1;
    std::size_t j = (n * (K - k)) % (2 * K);
    if (j > K) {
        j = 2 * K - j;
    }
    return -nodes[j];
}

}  // namespace

ChebSeq::ChebSeq(std::vector<Interval> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        coeffs_.emplace_back();
    }
}

ChebSeq ChebSeq::from_doubles(std::span<const double> halved) {
    std::vector<Interval> c;
    c.reserve(halved.size());
    for (double v : halved) {
        c.emplace_back(v);
    }
    return ChebSeq(std::move(c));
}

Interval ChebSeq::norm() const {
    Interval tail;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        tail += abs(coeffs_[k]);
    }
    return abs(coeffs_[0]) + 2.0 * tail;
}

ChebSeq& ChebSeq::operator+=(const ChebSeq& o) {
    if (o.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(o.coeffs_.size());
    }
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) {
        coeffs_[k] += o.coeffs_[k];
    }
    return *this;
}

ChebSeq& ChebSeq::operator-=(const ChebSeq& o) {
    if (o.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(o.coeffs_.size());
    }
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) {
        coeffs_[k] -= o.coeffs_[k];
    }
    return *this;
}

ChebSeq operator+(const ChebSeq& a, const ChebSeq& b) {
    ChebSeq c = a;
    return c += b;
}

ChebSeq operator-(const ChebSeq& a, const ChebSeq& b) {
    ChebSeq c = a;
    return c -= b;
}

ChebSeq operator-(const ChebSeq& a) {
    std::vector<Interval> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& ck : c) {
        ck = -ck;
    }
    return ChebSeq(std::move(c));
}

ChebSeq operator*(const Interval& s, const ChebSeq& a) {
    std::vector<Interval> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& ck : c) {
        ck = s * ck;
    }
    return ChebSeq(std::move(c));
}

ChebSeq operator+(const ChebSeq& a, const Interval& s) {
    std::vector<Interval> c(a.coeffs().begin(), a.coeffs().end());
    c[0] += s;
    return ChebSeq(std::move(c));
}

ChebSeq cheb_mul(const ChebSeq& a, const ChebSeq& b) {
    const auto m = static_cast<long>(a.degree());
    const auto n = static_cast<long>(b.degree());
    const auto ac = a.coeffs();
    const auto bc = b.coeffs();
    std::vector<Interval> out(static_cast<std::size_t>(m + n + 1));
    for (long k = 0; k <= m + n; ++k) {
        Interval s;
        for (long j = std::max(-n, k - m); j <= std::min(n, k + m); ++j) {
            s += ac[static_cast<std::size_t>(std::labs(k - j))] * bc[static_cast<std::size_t>(std::labs(j))];
        }
        out[static_cast<std::size_t>(k)] = s;
    }
    return ChebSeq(std::move(out));
}

ChebSeq cheb_pow(const ChebSeq& a, unsigned n) {
    ChebSeq result = ChebSeq::constant(Interval(1.0));
    ChebSeq base = a;
    while (n > 0) {
        if (n & 1U) {
            result = cheb_mul(result, base);
        }
        n >>= 1U;
        if (n > 0) {
            base = cheb_mul(base, base);
        }
    }
    return result;
}

std::vector<Interval> cheb_nodes(std::size_t K) {
    if (K == 0) {
        return {Interval(-1.0)};
    }
    std::vector<Interval> nodes;
    nodes.reserve(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        nodes.push_back(node_enclosure(k, K));
    }
    return nodes;
}

std::vector<double> cheb_nodes_native(std::size_t K) {
    std::vector<double> out;
    for (const auto& a : cheb_nodes(K)) {
        out.push_back(a.mid());
    }
    return out;
}

ChebSeq cheb_interpolate(std::span<const Interval> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("cheb_interpolate: no samples");
    }
    const std::size_t K = samples.size() - 1;
    if (K == 0) {
        return ChebSeq::constant(samples[0]);
    }
    const std::vector<Interval> nodes = cheb_nodes(K);
    const Interval Ki(static_cast<double>(K));
    std::vector<Interval> c(K + 1);
    for (std::size_t n = 0; n <= K; ++n) {
        Interval s;
        for (std::size_t k = 0; k <= K; ++k) {
            Interval term = samples[k] * chebyshev_at_node(n, k, nodes);
            if (k == 0 || k == K) {
                term = term / 2.0;
            }
            s += term;
        }
        c[n] = (n == K) ? s / (2.0 * Ki) : s / Ki;
    }
    return ChebSeq(std::move(c));
}

ChebSeq cheb_interpolate(std::span<const double> samples) {
    std::vector<Interval> s;
    s.reserve(samples.size());
    for (double v : samples) {
        s.emplace_back(v);
    }
    return cheb_interpolate(s);
}

Interval cheb_eval(const ChebSeq& psi, const Interval& a) {
    if (!Interval(-1.0, 1.0).contains(a)) {
        throw DomainError("cheb_eval: argument outside [-1, 1]");
    }
    const auto c = psi.coeffs();
    const std::size_t K = psi.degree();
    Interval b1;
    Interval b2;
    const Interval two_a = 2.0 * a;
    for (std::size_t k = K; k >= 1; --k) {
        const Interval bk = 2.0 * c[k] + two_a * b1 - b2;
        b2 = b1;
        b1 = bk;
    }
    const Interval value = c[0] + a * b1 - b2;
    const double bound = psi.norm().hi();
    const auto clipped = intersect(value, Interval(-bound, bound));
    return clipped ? *clipped : value;
}

ChebSeq cheb_midpoint(const ChebSeq& psi) {
    std::vector<Interval> c;
    for (const auto& ck : psi.coeffs()) {
        c.emplace_back(ck.mid());
    }
    return ChebSeq(std::move(c));
}

ChebOpMatrix ChebOpMatrix::identity(std::size_t n) {
    ChebOpMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = ChebSeq::constant(Interval(1.0));
    }
    return m;
}

ChebOpMatrix operator*(const ChebOpMatrix& a, const ChebOpMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("ChebOpMatrix product: dimension mismatch");
    }
    ChebOpMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            ChebSeq s;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += cheb_mul(a(i, k), b(k, j));
            }
            c(i, j) = std::move(s);
        }
    }
    return c;
}

ChebVector operator*(const ChebOpMatrix& a, const ChebVector& x) {
    if (a.cols() != x.size()) {
        throw std::invalid_argument("ChebOpMatrix-vector product: dimension mismatch");
    }
    ChebVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            y[i] += cheb_mul(a(i, k), x[k]);
        }
    }
    return y;
}

ChebOpMatrix operator-(const ChebOpMatrix& a, const ChebOpMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("ChebOpMatrix difference: dimension mismatch");
    }
    ChebOpMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            c(i, j) = a(i, j) - b(i, j);
        }
    }
    return c;
}

Interval opmatrix_norm(const ChebOpMatrix& W) {
    Interval best;
    for (std::size_t j = 0; j < W.cols(); ++j) {
        Interval col;
        for (std::size_t i = 0; i < W.rows(); ++i) {
            col += W(i, j).norm();
        }
        best = j == 0 ? col : max(best, col);
    }
    return best;
}

Interval seq_vec_norm(std::span<const ChebSeq> w) {
    Interval s;
    for (const auto& wi : w) {
        s += wi.norm();
    }
    return s;
}

IntervalMatrix cheb_eval(const ChebOpMatrix& W, const Interval& a) {
    IntervalMatrix M(W.rows(), W.cols());
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = 0; j < W.cols(); ++j) {
            M(i, j) = cheb_eval(W(i, j), a);
        }
    }
    return M;
}

IntervalVector cheb_eval(std::span<const ChebSeq> w, const Interval& a) {
    IntervalVector v;
    v.reserve(w.size());
    for (const auto& wi : w) {
        v.push_back(cheb_eval(wi, a));
    }
    return v;
}

}  // namespace periodica
