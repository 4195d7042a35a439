#include "periodica/pdcurve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "periodica/maps.hpp"

namespace periodica {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_period(int p) {
    if (p < 1 || p > kMaxCurvePeriod) {
        throw CurveError("curve period must be 1 or 2, got " + std::to_string(p));
    }
}

void check_size(int p, std::size_t n) {
    check_period(p);
    if (n != static_cast<std::size_t>(2 * p)) {
        throw std::invalid_argument("extended state must have 2p entries");
    }
}

// Native h and derivatives through sigma = 1/(1+e^-x), stable for large |x|.
struct NativeH {
    double h;
    double d1;
    double d2;
};

NativeH native_h(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    const double q = s * (1.0 - s);
    return {s - 1.0, q, q * (1.0 - 2.0 * s)};
}

Interval h_full(const Interval& x) { return reflected_sigmoid(x); }
Interval h1_full(const Interval& x) { return reflected_sigmoid_slope(x); }
Interval h2_full(const Interval& x) { return sigmoid_derivative(2, x); }

Interval factorial(int n) {
    Interval f(1.0);
    for (int k = 2; k <= n; ++k) {
        f = f * static_cast<double>(k);
    }
    return f;
}

// Taylor polynomial of h^(m) about the jet center, evaluated at offset d.
Interval h_poly_eval(const SigmoidJet& jet, int m, const Interval& d) {
    Interval acc;
    for (int n = jet.order; n >= m; --n) {
        Interval coef = jet.coeffs[static_cast<std::size_t>(n)];
        for (int j = 0; j < m; ++j) {
            coef = coef * static_cast<double>(n - j);
        }
        acc = acc * d + coef;
    }
    return acc;
}

// Lagrange enclosure of h^(m)(x) - (Taylor polynomial of h^(m)) at x.
Interval h_remainder_eval(const Interval& chi, int N, int m, const Interval& x) {
    const Interval d = x - chi;
    const int order = N + 1;
    const Interval deriv = sigmoid_derivative(order, hull(chi, x));
    return deriv * pow(d, static_cast<unsigned>(order - m)) / factorial(order - m);
}

// Taylor polynomial of h^(m) composed with a Chebyshev function d = xbar - chi.
ChebSeq h_poly_cheb(const SigmoidJet& jet, int m, const ChebSeq& d) {
    ChebSeq acc;
    for (int n = jet.order; n >= m; --n) {
        Interval coef = jet.coeffs[static_cast<std::size_t>(n)];
        for (int j = 0; j < m; ++j) {
            coef = coef * static_cast<double>(n - j);
        }
        acc = cheb_mul(acc, d) + coef;
    }
    return acc;
}

template <class FFn, class JFn>
ExtendedSolve newton_generic(FFn&& F, JFn&& J, Eigen::VectorXd x, const NewtonOptions& opts) {
    ExtendedSolve out;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd Fx = F(x);
        const double r = Fx.lpNorm<1>();
        out.residual = r;
        out.iterations = it;
        if (!std::isfinite(r)) {
            out.status = NewtonStatus::diverged;
            break;
        }
        if (r <= opts.tol) {
            out.status = NewtonStatus::converged;
            break;
        }
        if (it >= opts.max_iter) {
            out.status = NewtonStatus::max_iterations;
            break;
        }
        const Eigen::MatrixXd Jx = J(x);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jx);
        if (!Jx.allFinite() || !(lu.rcond() >= 1e-15)) {
            out.status = NewtonStatus::singular;
            break;
        }
        const Eigen::VectorXd dx = lu.solve(-Fx);
        x += dx;
        const double scale = 1.0 + x.lpNorm<1>();
        if (dx.lpNorm<1>() <= 64 * kEps * scale) {
            const Eigen::VectorXd Fend = F(x);
            out.residual = Fend.lpNorm<1>();
            out.status = out.residual <= 1e-10 * scale ? NewtonStatus::converged : NewtonStatus::diverged;
            break;
        }
    }
    out.w = std::move(x);
    return out;
}

IntervalVector point_vector(const Eigen::VectorXd& x) {
    IntervalVector v;
    for (double xi : x) {
        v.emplace_back(xi);
    }
    return v;
}

Eigen::VectorXd mids(const IntervalVector& v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = v[i].mid();
    }
    return x;
}

Eigen::MatrixXd mids(const IntervalMatrix& M) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(M.rows()), static_cast<Eigen::Index>(M.cols()));
    for (std::size_t i = 0; i < M.rows(); ++i) {
        for (std::size_t j = 0; j < M.cols(); ++j) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(i, j).mid();
        }
    }
    return A;
}

// sup |D^2 F| over the a priori ball, per unit |kappa| (see the p = 2 bilinear bound).
Interval second_derivative_factor(int p, const Interval& u_bound, double R) {
    const Interval h2 = sigmoid_derivative_global_bound(2);
    const Interval h3 = sigmoid_derivative_global_bound(3);
    if (p == 1) {
        return h2 + h3;
    }
    const Interval u_reach = max(Interval(1.0), u_bound + R);
    return h2 + max(h2, u_reach * h3);
}

Interval cheb_power_norm(const ChebSeq& d, int n) {
    if (n <= 0) {
        return Interval(1.0);
    }
    const Interval via_algebra = cheb_pow(d, static_cast<unsigned>(n)).norm();
    const Interval via_norm = pow(d.norm(), static_cast<unsigned>(n));
    return via_algebra.hi() <= via_norm.hi() ? via_algebra : via_norm;
}

}  // namespace

Interval KappaWindow::kappa_at(const Interval& alpha) const {
    return Interval(kappa1) + (alpha + 1.0) / 2.0 * (Interval(kappa2) - Interval(kappa1));
}

ChebSeq KappaWindow::kappa_cheb() const {
    const Interval k1(kappa1);
    const Interval k2(kappa2);
    return ChebSeq::affine((k1 + k2) / 2.0, (k2 - k1) / 2.0);
}

Eigen::VectorXd extended_F(int p, const Eigen::VectorXd& w, double kappa) {
    check_size(p, static_cast<std::size_t>(w.size()));
    Eigen::VectorXd F(2 * p);
    if (p == 1) {
        const NativeH h = native_h(w[0]);
        F[0] = w[1] + kappa * h.h;
        F[1] = 2.0 + kappa * h.d1;
        return F;
    }
    const double x0 = w[0], x1 = w[1], u = w[2], beta = w[3];
    const NativeH h0 = native_h(x0);
    const NativeH h1 = native_h(x1);
    F[0] = beta + x1 + kappa * h1.h - x0;
    F[1] = beta + x0 + kappa * h0.h - x1;
    F[2] = (1.0 + kappa * h1.d1) * u + 1.0;
    F[3] = (1.0 + kappa * h0.d1) - u;
    return F;
}

Eigen::MatrixXd extended_DF(int p, const Eigen::VectorXd& w, double kappa) {
    check_size(p, static_cast<std::size_t>(w.size()));
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    if (p == 1) {
        const NativeH h = native_h(w[0]);
        J(0, 0) = kappa * h.d1;
        J(0, 1) = 1.0;
        J(1, 0) = kappa * h.d2;
        return J;
    }
    const double u = w[2];
    const NativeH h0 = native_h(w[0]);
    const NativeH h1 = native_h(w[1]);
    J(0, 0) = -1.0;
    J(0, 1) = 1.0 + kappa * h1.d1;
    J(0, 3) = 1.0;
    J(1, 0) = 1.0 + kappa * h0.d1;
    J(1, 1) = -1.0;
    J(1, 3) = 1.0;
    J(2, 1) = kappa * h1.d2 * u;
    J(2, 2) = 1.0 + kappa * h1.d1;
    J(3, 0) = kappa * h0.d2;
    J(3, 2) = -1.0;
    return J;
}

IntervalVector build_extended_F(int p, std::span<const Interval> w, const Interval& kappa, Split split,
                                const TaylorSplit* taylor) {
    check_size(p, w.size());
    if (split != Split::full) {
        if (taylor == nullptr || taylor->chi.size() != static_cast<std::size_t>(p)) {
            throw std::invalid_argument("poly/remainder split needs one expansion center per x coordinate");
        }
        if (taylor->N < 1 || taylor->N + 1 > kMaxSigmoidOrder) {
            throw std::out_of_range("Taylor order without a registered derivative bound");
        }
    }
    // h and h' of coordinate i under the requested split.
    auto hm = [&](int i, int m) -> Interval {
        const Interval& x = w[static_cast<std::size_t>(i)];
        switch (split) {
        case Split::full:
            return m == 0 ? h_full(x) : h1_full(x);
        case Split::poly: {
            const SigmoidJet jet = taylor_jet(taylor->chi[static_cast<std::size_t>(i)], taylor->N);
            return h_poly_eval(jet, m, x - taylor->chi[static_cast<std::size_t>(i)]);
        }
        case Split::remainder:
            return h_remainder_eval(taylor->chi[static_cast<std::size_t>(i)], taylor->N, m, x);
        }
        return Interval();
    };
    // Remainder rows carry only the kappa h~ terms.
    const bool rem = split == Split::remainder;
    IntervalVector F(static_cast<std::size_t>(2 * p));
    if (p == 1) {
        F[0] = (rem ? Interval() : w[1]) + kappa * hm(0, 0);
        F[1] = (rem ? Interval() : Interval(2.0)) + kappa * hm(0, 1);
        return F;
    }
    const Interval& x0 = w[0];
    const Interval& x1 = w[1];
    const Interval& u = w[2];
    const Interval& beta = w[3];
    if (rem) {
        F[0] = kappa * hm(1, 0);
        F[1] = kappa * hm(0, 0);
        F[2] = kappa * hm(1, 1) * u;
        F[3] = kappa * hm(0, 1);
        return F;
    }
    F[0] = beta + x1 + kappa * hm(1, 0) - x0;
    F[1] = beta + x0 + kappa * hm(0, 0) - x1;
    F[2] = (1.0 + kappa * hm(1, 1)) * u + 1.0;
    F[3] = (1.0 + kappa * hm(0, 1)) - u;
    return F;
}

IntervalMatrix build_extended_DF(int p, std::span<const Interval> w, const Interval& kappa) {
    check_size(p, w.size());
    IntervalMatrix J(static_cast<std::size_t>(2 * p), static_cast<std::size_t>(2 * p));
    if (p == 1) {
        J(0, 0) = kappa * h1_full(w[0]);
        J(0, 1) = Interval(1.0);
        J(1, 0) = kappa * h2_full(w[0]);
        return J;
    }
    const Interval df0 = 1.0 + kappa * h1_full(w[0]);
    const Interval df1 = 1.0 + kappa * h1_full(w[1]);
    J(0, 0) = Interval(-1.0);
    J(0, 1) = df1;
    J(0, 3) = Interval(1.0);
    J(1, 0) = df0;
    J(1, 1) = Interval(-1.0);
    J(1, 3) = Interval(1.0);
    J(2, 1) = kappa * h2_full(w[1]) * w[2];
    J(2, 2) = df1;
    J(3, 0) = kappa * h2_full(w[0]);
    J(3, 2) = Interval(-1.0);
    return J;
}

ExtendedSolve extended_newton(int p, Eigen::VectorXd w0, double kappa, const NewtonOptions& opts) {
    check_size(p, static_cast<std::size_t>(w0.size()));
    return newton_generic([&](const Eigen::VectorXd& w) { return extended_F(p, w, kappa); },
                          [&](const Eigen::VectorXd& w) { return extended_DF(p, w, kappa); }, std::move(w0), opts);
}

Eigen::VectorXd canonical_extended(int p, Eigen::VectorXd w, double kappa) {
    if (p == 2 && w[1] < w[0]) {
        std::swap(w[0], w[1]);
        w[2] = 1.0 + kappa * native_h(w[0]).d1;
    }
    return w;
}

ExtendedCandidate node_solve(int p, const KappaWindow& window, int K, const Eigen::VectorXd& seed,
                             const NodeSolveOptions& opts) {
    check_size(p, static_cast<std::size_t>(seed.size()));
    if (K < 0) {
        throw std::invalid_argument("interpolation order must be nonnegative");
    }
    if (!(window.kappa1 < window.kappa2)) {
        throw std::invalid_argument("kappa window must satisfy kappa1 < kappa2");
    }
    ExtendedCandidate c;
    c.p = p;
    c.window = window;
    c.K = K;
    c.N = opts.N;
    const std::vector<double> alphas = cheb_nodes_native(static_cast<std::size_t>(K));
    const int n = static_cast<int>(alphas.size());
    int det_sign = 0;
    std::vector<Eigen::MatrixXd> inverses;
    for (int k = 0; k < n; ++k) {
        const double kappa = window.kappa_at(alphas[static_cast<std::size_t>(k)]);
        Eigen::VectorXd guess = k == 0 ? seed : c.node_w.back();
        if (k >= 2) {
            const double t = (alphas[static_cast<std::size_t>(k)] - alphas[static_cast<std::size_t>(k - 1)]) /
                             (alphas[static_cast<std::size_t>(k - 1)] - alphas[static_cast<std::size_t>(k - 2)]);
            guess = c.node_w[static_cast<std::size_t>(k - 1)] +
                    t * (c.node_w[static_cast<std::size_t>(k - 1)] - c.node_w[static_cast<std::size_t>(k - 2)]);
        }
        ExtendedSolve sol = extended_newton(p, guess, kappa, opts.newton);
        if (sol.status != NewtonStatus::converged && k > 0) {
            sol = extended_newton(p, c.node_w.back(), kappa, opts.newton);
        }
        if (sol.status != NewtonStatus::converged) {
            throw CurveError("Newton failed at node " + std::to_string(k) + " (kappa = " + std::to_string(kappa) +
                             "): " + std::string(to_string(sol.status)));
        }
        const Eigen::MatrixXd J = extended_DF(p, sol.w, kappa);
        const double det = J.determinant();
        const int sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
        if (sign == 0 || (det_sign != 0 && sign != det_sign)) {
            throw CurveError("sign change of det D_w F near node " + std::to_string(k) + " (fold)");
        }
        det_sign = sign;
        try {
            inverses.push_back(approx_inverse(J));
        } catch (const SingularMatrix& e) {
            throw CurveError(std::string("singular Jacobian at node ") + std::to_string(k) + ": " + e.what());
        }
        c.node_w.push_back(sol.w);
        c.node_residuals.push_back(sol.residual);
    }

    const std::size_t dim = static_cast<std::size_t>(2 * p);
    std::vector<double> samples(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < dim; ++i) {
        for (int k = 0; k < n; ++k) {
            samples[static_cast<std::size_t>(k)] = c.node_w[static_cast<std::size_t>(k)][static_cast<Eigen::Index>(i)];
        }
        c.w_bar.push_back(cheb_midpoint(cheb_interpolate(samples)));
    }
    c.A_cheb = ChebOpMatrix(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            for (int k = 0; k < n; ++k) {
                samples[static_cast<std::size_t>(k)] =
                    inverses[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
            c.A_cheb(i, j) = cheb_midpoint(cheb_interpolate(samples));
        }
    }
    for (int i = 0; i < p; ++i) {
        double sum = 0.0;
        for (const auto& w : c.node_w) {
            sum += w[i];
        }
        c.chi.emplace_back(sum / n);
    }
    return c;
}

UniformBounds uniform_bounds(const ExtendedCandidate& c, double R) {
    check_period(c.p);
    if (c.N < 1 || c.N + 1 > kMaxSigmoidOrder) {
        throw std::out_of_range("Taylor order without a registered derivative bound: N = " + std::to_string(c.N));
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("uniform bounds need a finite R > 0");
    }
    const int p = c.p;
    const int N = c.N;
    const std::size_t dim = static_cast<std::size_t>(2 * p);
    UniformBounds b;
    const ChebSeq kappa = c.window.kappa_cheb();
    b.kappa_norm = kappa.norm();
    b.A_norm = opmatrix_norm(c.A_cheb);
    b.u_norm = p == 2 ? c.w_bar[2].norm() : Interval();

    std::vector<ChebSeq> hp(static_cast<std::size_t>(p));
    std::vector<ChebSeq> hp1(static_cast<std::size_t>(p));
    std::vector<ChebSeq> hp2(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const ChebSeq d = c.w_bar[si] + (-c.chi[si]);
        const SigmoidJet jet = taylor_jet(c.chi[si], N);
        hp[si] = h_poly_cheb(jet, 0, d);
        hp1[si] = h_poly_cheb(jet, 1, d);
        hp2[si] = h_poly_cheb(jet, 2, d);

        // Every point chi + tau (xbar(alpha) - chi) lies within ||d|| of chi.
        const double reach = d.norm().hi();
        const Interval range = c.chi[si] + Interval(-reach, reach);
        const Interval local = abs(sigmoid_derivative(N + 1, range));
        const Interval global = sigmoid_derivative_global_bound(N + 1);
        const Interval hsup = local.hi() <= global.hi() ? Interval(0.0, local.hi()) : global;
        b.rem0.push_back(cheb_power_norm(d, N + 1) / factorial(N + 1) * hsup);
        b.rem1.push_back(cheb_power_norm(d, N) / factorial(N) * hsup);
        b.rem2.push_back(cheb_power_norm(d, N - 1) / factorial(N - 1) * hsup);
    }

    ChebVector Fp(dim);
    ChebOpMatrix DFp(dim, dim);
    const Interval one(1.0);
    if (p == 1) {
        const ChebSeq& beta = c.w_bar[1];
        Fp[0] = beta + cheb_mul(kappa, hp[0]);
        Fp[1] = cheb_mul(kappa, hp1[0]) + Interval(2.0);
        DFp(0, 0) = cheb_mul(kappa, hp1[0]);
        DFp(0, 1) = ChebSeq::constant(one);
        DFp(1, 0) = cheb_mul(kappa, hp2[0]);
    } else {
        const ChebSeq& x0 = c.w_bar[0];
        const ChebSeq& x1 = c.w_bar[1];
        const ChebSeq& u = c.w_bar[2];
        const ChebSeq& beta = c.w_bar[3];
        const ChebSeq df0 = cheb_mul(kappa, hp1[0]) + one;
        const ChebSeq df1 = cheb_mul(kappa, hp1[1]) + one;
        const ChebSeq ddf0 = cheb_mul(kappa, hp2[0]);
        const ChebSeq ddf1 = cheb_mul(kappa, hp2[1]);
        Fp[0] = beta + x1 + cheb_mul(kappa, hp[1]) - x0;
        Fp[1] = beta + x0 + cheb_mul(kappa, hp[0]) - x1;
        Fp[2] = cheb_mul(df1, u) + one;
        Fp[3] = df0 - u;
        DFp(0, 0) = ChebSeq::constant(-one);
        DFp(0, 1) = df1;
        DFp(0, 3) = ChebSeq::constant(one);
        DFp(1, 0) = df0;
        DFp(1, 1) = ChebSeq::constant(-one);
        DFp(1, 3) = ChebSeq::constant(one);
        DFp(2, 1) = cheb_mul(ddf1, u);
        DFp(2, 2) = df1;
        DFp(3, 0) = ddf0;
        DFp(3, 2) = ChebSeq::constant(-one);
    }

    b.Y_poly = seq_vec_norm(c.A_cheb * Fp);
    b.Z1_poly = opmatrix_norm(ChebOpMatrix::identity(dim) - c.A_cheb * DFp);

    Interval y_tail;
    Interval z_tail;
    if (p == 1) {
        y_tail = b.rem0[0] + b.rem1[0];
        z_tail = b.rem1[0] + b.rem2[0];
    } else {
        y_tail = b.rem0[1] + b.rem0[0] + b.u_norm * b.rem1[1] + b.rem1[0];
        // Columns x0, x1 and u of the remainder Jacobian.
        z_tail = max(max(b.rem1[0] + b.rem2[0], b.rem1[1] + b.u_norm * b.rem2[1]), b.rem1[1]);
    }
    b.Y_tail = b.A_norm * b.kappa_norm * y_tail;
    b.Z1_tail = b.A_norm * b.kappa_norm * z_tail;
    b.Y = b.Y_poly + b.Y_tail;
    b.Z1 = b.Z1_poly + b.Z1_tail;
    b.Z2 = b.A_norm * b.kappa_norm * second_derivative_factor(p, b.u_norm, R);
    return b;
}

CurveCertificate certify_curve(const ExtendedCandidate& c, double R) {
    CurveCertificate cert;
    cert.candidate = c;
    cert.R = R;
    cert.bounds = uniform_bounds(c, R);
    const Bounds pointwise{cert.bounds.Y, cert.bounds.Z1, cert.bounds.Z2};
    cert.radius = select_radius(pointwise, AprioriRadius::finite(R));
    cert.verified = cert.radius.ok;
    cert.reason = cert.radius.reason;
    if (cert.verified) {
        const Interval widen(-cert.radius.r_star, cert.radius.r_star);
        for (const auto& wi : c.w_bar) {
            cert.endpoint_lo.push_back(cheb_eval(wi, Interval(-1.0)) + widen);
            cert.endpoint_hi.push_back(cheb_eval(wi, Interval(1.0)) + widen);
        }
    }
    return cert;
}

PatchResult patch_curves(const CurveCertificate& a, const CurveCertificate& b) {
    PatchResult out;
    if (a.candidate.p != b.candidate.p) {
        out.message = "different periods";
        return out;
    }
    if (!a.verified || !b.verified) {
        out.message = "unverified certificate";
        return out;
    }
    double alpha_b = 0.0;
    if (a.candidate.window.kappa2 == b.candidate.window.kappa1) {
        alpha_b = -1.0;
    } else if (a.candidate.window.kappa2 == b.candidate.window.kappa2) {
        alpha_b = 1.0;
    } else {
        out.message = "windows do not share the endpoint kappa = " + std::to_string(a.candidate.window.kappa2);
        return out;
    }
    Interval dist;
    double worst = -1.0;
    for (std::size_t i = 0; i < a.candidate.w_bar.size(); ++i) {
        const Interval diff =
            abs(cheb_eval(a.candidate.w_bar[i], Interval(1.0)) - cheb_eval(b.candidate.w_bar[i], Interval(alpha_b)));
        if (diff.hi() > worst) {
            worst = diff.hi();
            out.coordinate = i;
        }
        dist += diff;
    }
    out.gap = (dist + a.radius.r_star).hi();
    out.room = b.radius.r_unique;
    out.ok = out.gap <= out.room;
    if (!out.ok) {
        out.message = "endpoint ball does not fit in the uniqueness ball (coordinate " + std::to_string(out.coordinate) + ")";
    }
    return out;
}

FrozenCertificate certify_frozen(const ExtendedCandidate& c, double alpha, double R) {
    check_period(c.p);
    const Interval a(alpha);
    const Eigen::VectorXd w = mids(cheb_eval(c.w_bar, a));
    const Eigen::MatrixXd A = mids(cheb_eval(c.A_cheb, a));
    const Interval kappa = c.window.kappa_at(a);
    const IntervalVector wi = point_vector(w);
    const Interval u = c.p == 2 ? abs(wi[2]) : Interval();
    const Interval lipschitz = abs(kappa) * second_derivative_factor(c.p, u, R);
    FrozenCertificate out;
    out.bounds = bounds_from(build_extended_F(c.p, wi, kappa), build_extended_DF(c.p, wi, kappa), A, lipschitz);
    out.radius = select_radius(out.bounds, AprioriRadius::finite(R));
    return out;
}

Eigen::VectorXd continue_point(int p, Eigen::VectorXd w, double kappa_from, double kappa_to, double max_step) {
    check_size(p, static_cast<std::size_t>(w.size()));
    double kappa = kappa_from;
    double step = max_step;
    Eigen::VectorXd prev = w;
    double prev_kappa = kappa;
    {
        const ExtendedSolve s = extended_newton(p, w, kappa);
        if (s.status != NewtonStatus::converged) {
            throw CurveError("continuation start is not a solution");
        }
        w = s.w;
    }
    while (kappa != kappa_to) {
        const double dir = kappa_to > kappa ? 1.0 : -1.0;
        const double next = std::fabs(kappa_to - kappa) <= step ? kappa_to : kappa + dir * step;
        Eigen::VectorXd guess = w;
        if (prev_kappa != kappa) {
            guess = w + (next - kappa) / (kappa - prev_kappa) * (w - prev);
        }
        const ExtendedSolve s = extended_newton(p, guess, next);
        if (s.status == NewtonStatus::converged && (s.w - w).lpNorm<1>() < 10.0 * std::max(step, 0.1)) {
            prev = w;
            prev_kappa = kappa;
            w = s.w;
            kappa = next;
            step = std::min(max_step, step * 1.5);
        } else {
            step /= 2.0;
            if (step < 1e-6) {
                throw CurveError("continuation stalled at kappa = " + std::to_string(kappa));
            }
        }
    }
    return w;
}

Eigen::VectorXd analytic_p1_seed(double kappa) {
    if (!(kappa <= -8.0)) {
        throw std::domain_error("the p = 1 doubling curve requires kappa <= -8");
    }
    const double beta = (kappa - std::sqrt(kappa * kappa + 8.0 * kappa)) / 2.0;
    Eigen::VectorXd w(2);
    w << std::log(kappa / beta - 1.0), beta;
    return w;
}

std::vector<Eigen::VectorXd> locate_doubling_points(int p, double kappa, const DoublingScanOptions& opts) {
    check_period(p);
    if (!(kappa < 0.0)) {
        throw std::domain_error("doubling scan needs kappa < 0");
    }
    struct Orbit {
        Eigen::VectorXd x;
        double g;
    };
    SeedOptions seed_opts;
    seed_opts.strategy = kSeedGrid;
    seed_opts.grid_points = opts.x_grid;
    seed_opts.dedup_radius = 1e-7;

    std::vector<Eigen::VectorXd> found;
    std::vector<Orbit> previous;
    double previous_beta = 0.0;
    const int n = opts.beta_points;
    for (int j = 1; j < n; ++j) {
        const double beta = kappa + (0.0 - kappa) * j / n;
        const MapDef m = MapDef::predprey(beta, kappa);
        std::vector<Orbit> current;
        for (Candidate& c : seed_candidates(m, p, seed_opts)) {
            if (!check_distinct(c.x_bar, 1e-7)) {
                continue;
            }
            double lambda = 1.0;
            for (double xk : c.x_bar) {
                lambda *= m.df(xk);
            }
            current.push_back({c.x_bar, lambda + 1.0});
        }
        for (const Orbit& o : current) {
            const Orbit* match = nullptr;
            double best = 0.5;
            for (const Orbit& q : previous) {
                const double d = (q.x - o.x).lpNorm<1>();
                if (d < best) {
                    best = d;
                    match = &q;
                }
            }
            if (match == nullptr || (match->g < 0) == (o.g < 0)) {
                continue;
            }
            const double t = match->g / (match->g - o.g);
            const Eigen::VectorXd x = match->x + t * (o.x - match->x);
            const double b = previous_beta + t * (beta - previous_beta);
            const MapDef mb = MapDef::predprey(b, kappa);
            Eigen::VectorXd w(2 * p);
            for (int k = 0; k < p; ++k) {
                w[k] = x[k];
            }
            for (int k = 0; k + 1 < p; ++k) {
                w[p + k] = mb.df(x[k]);
            }
            w[2 * p - 1] = b;
            const ExtendedSolve s = extended_newton(p, w, kappa);
            if (s.status != NewtonStatus::converged) {
                continue;
            }
            const Eigen::VectorXd cw = canonical_extended(p, s.w, kappa);
            const bool duplicate = std::any_of(found.begin(), found.end(),
                                               [&](const Eigen::VectorXd& f) { return (f - cw).lpNorm<1>() < 1e-7; });
            if (!duplicate) {
                found.push_back(cw);
            }
        }
        previous = std::move(current);
        previous_beta = beta;
    }
    std::sort(found.begin(), found.end(),
              [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a[a.size() - 1] < b[b.size() - 1]; });
    return found;
}

bool BranchResult::all_verified() const {
    return failures.empty() &&
           std::all_of(pieces.begin(), pieces.end(), [](const CurveCertificate& c) { return c.verified; });
}

bool BranchResult::chained() const {
    return !pieces.empty() && all_verified() && patches.size() + 1 == pieces.size() &&
           std::all_of(patches.begin(), patches.end(), [](const PatchResult& r) { return r.ok; });
}

KappaWindow BranchResult::coverage() const {
    if (!chained()) {
        return {};
    }
    return {pieces.front().candidate.window.kappa1, pieces.back().candidate.window.kappa2};
}

BranchResult certify_branch(int p, std::vector<KappaWindow> windows, const Eigen::VectorXd& seed, double seed_kappa,
                            const BranchOptions& opts) {
    check_size(p, static_cast<std::size_t>(seed.size()));
    BranchResult out;
    std::vector<std::pair<double, Eigen::VectorXd>> known{{seed_kappa, seed}};
    auto nearest_known = [&](double kappa) {
        return *std::min_element(known.begin(), known.end(), [&](const auto& a, const auto& b) {
            return std::fabs(a.first - kappa) < std::fabs(b.first - kappa);
        });
    };
    NodeSolveOptions node_opts;
    node_opts.N = opts.N;

    std::function<void(const KappaWindow&, const Eigen::VectorXd&)> attempt = [&](const KappaWindow& win,
                                                                                  const Eigen::VectorXd& start) {
        std::string failure;
        try {
            ExtendedCandidate cand = node_solve(p, win, opts.K, start, node_opts);
            known.emplace_back(win.kappa2, cand.node_w.back());
            CurveCertificate cert = certify_curve(cand, opts.R);
            if (cert.verified) {
                out.pieces.push_back(std::move(cert));
                return;
            }
            failure = std::string(to_string(cert.reason));
        } catch (const CurveError& e) {
            failure = e.what();
        }
        const double half = win.width() / 2.0;
        if (!opts.adaptive || half < opts.min_width) {
            out.failures.emplace_back(win, failure);
            return;
        }
        const double mid = win.kappa1 + half;
        attempt({win.kappa1, mid}, start);
        try {
            const auto [k0, w0] = nearest_known(mid);
            attempt({mid, win.kappa2}, continue_point(p, w0, k0, mid));
        } catch (const CurveError& e) {
            out.failures.emplace_back(KappaWindow{mid, win.kappa2}, e.what());
        }
    };

    for (const KappaWindow& win : windows) {
        try {
            const auto [k0, w0] = nearest_known(win.kappa1);
            const Eigen::VectorXd start = continue_point(p, w0, k0, win.kappa1);
            known.emplace_back(win.kappa1, start);
            attempt(win, start);
        } catch (const CurveError& e) {
            out.failures.emplace_back(win, e.what());
        }
    }
    std::sort(out.pieces.begin(), out.pieces.end(), [](const CurveCertificate& a, const CurveCertificate& b) {
        return a.candidate.window.kappa1 < b.candidate.window.kappa1;
    });
    for (std::size_t i = 0; i + 1 < out.pieces.size(); ++i) {
        out.patches.push_back(patch_curves(out.pieces[i], out.pieces[i + 1]));
    }
    return out;
}

std::vector<CurveSample> sample_curve(const CurveCertificate& c, int n) {
    if (n < 2) {
        throw std::invalid_argument("sample_curve needs at least two samples");
    }
    std::vector<CurveSample> out;
    const ChebSeq& beta = c.candidate.w_bar.back();
    const Interval widen(-c.radius.r_star, c.radius.r_star);
    for (int j = 0; j < n; ++j) {
        const double alpha = j == n - 1 ? 1.0 : -1.0 + 2.0 * j / (n - 1);
        out.push_back({c.candidate.window.kappa_at(alpha), cheb_eval(beta, Interval(alpha)) + widen});
    }
    return out;
}

}  // namespace periodica
