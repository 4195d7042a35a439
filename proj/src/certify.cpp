#include "periodica/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace periodica {

namespace {

constexpr double kMax = std::numeric_limits<double>::max();

IntervalMatrix point_matrix(const Eigen::MatrixXd& A) {
    IntervalMatrix M(static_cast<std::size_t>(A.rows()), static_cast<std::size_t>(A.cols()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            M(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Interval(A(i, j));
        }
    }
    return M;
}

IntervalVector point_vector(const Eigen::VectorXd& x) {
    IntervalVector v;
    v.reserve(static_cast<std::size_t>(x.size()));
    for (double xi : x) {
        v.emplace_back(xi);
    }
    return v;
}

double smallest_power_of_two_at_least(double x) {
    int e = 0;
    const double m = std::frexp(x, &e);  // x = m 2^e, m in [0.5, 1)
    return m == 0.5 ? x : std::ldexp(1.0, e);
}

// Connected components of overlapping disks (union-find on pairwise overlap).
std::vector<int> disk_components(const std::vector<GershgorinDisk>& disks) {
    std::vector<int> parent(disks.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            i = parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        }
        return i;
    };
    for (std::size_t i = 0; i < disks.size(); ++i) {
        for (std::size_t j = i + 1; j < disks.size(); ++j) {
            // Real centers here: overlap when the center gap is within the radii sum.
            const double gap = std::max(disks[j].center.lo() - disks[i].center.hi(),
                                        disks[i].center.lo() - disks[j].center.hi());
            if (gap <= rounding::add_up(disks[i].radius, disks[j].radius)) {
                parent[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
            }
        }
    }
    std::vector<int> comp(disks.size());
    for (std::size_t i = 0; i < disks.size(); ++i) {
        comp[i] = find(static_cast<int>(i));
    }
    return comp;
}

}  // namespace

AprioriRadius AprioriRadius::finite(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("a priori radius must be positive and finite");
    }
    AprioriRadius R;
    R.value_ = r;
    return R;
}

double AprioriRadius::value() const {
    if (!value_) {
        throw std::logic_error("unbounded a priori radius has no finite value");
    }
    return *value_;
}

double AprioriRadius::cap() const noexcept { return value_ ? *value_ : kMax; }

std::string_view to_string(FailureReason r) {
    switch (r) {
    case FailureReason::none:
        return "none";
    case FailureReason::newton_failed:
        return "newton_failed";
    case FailureReason::singular_jacobian:
        return "singular_jacobian";
    case FailureReason::z1_not_contracting:
        return "z1_not_contracting";
    case FailureReason::negative_discriminant:
        return "negative_discriminant";
    case FailureReason::no_admissible_radius:
        return "no_admissible_radius";
    case FailureReason::not_distinct:
        return "not_distinct";
    }
    return "unknown";
}

std::string_view to_string(Stability s) {
    switch (s) {
    case Stability::stable:
        return "stable";
    case Stability::unstable:
        return "unstable";
    case Stability::inconclusive:
        return "inconclusive";
    }
    return "unknown";
}

bool radius_admissible(const Bounds& b, double r, const AprioriRadius& R) {
    if (!(r >= 0.0) || !std::isfinite(r) || r > R.cap()) {
        return false;
    }
    const Interval ri(r);
    const Interval P = b.Y + ri * (b.Z1 - 1.0) + sqr(ri) * b.Z2 / 2.0;
    const Interval contraction = b.Z1 + ri * b.Z2;
    return P.hi() <= 0.0 && contraction.hi() < 1.0;
}

Bounds bounds_from(std::span<const Interval> F, const IntervalMatrix& DF, const Eigen::MatrixXd& A,
                   const Interval& lipschitz) {
    const IntervalMatrix Ai = point_matrix(A);
    const Interval A_norm = op_norm1(Ai);
    Bounds b;
    b.Y = vec_norm1(Ai * F);
    b.Z1 = op_norm1(IntervalMatrix::identity(DF.rows()) - Ai * DF);
    b.Z2 = lipschitz * A_norm;
    return b;
}

Bounds compute_bounds(const Candidate& c, const AprioriRadius&) {
    // Both registered maps have a global bound on |f''|, so R does not enter.
    if (c.A.size() == 0) {
        throw SingularMatrix("candidate has no approximate inverse");
    }
    const IntervalVector x = point_vector(c.x_bar);
    return bounds_from(build_F(c.map, x), build_DF(c.map, x), c.A, c.map.lipschitz_df());
}

RadiusSelection select_radius(const Bounds& b, const AprioriRadius& R) {
    RadiusSelection s;
    if (!(b.Z1.hi() < 1.0)) {
        s.reason = FailureReason::z1_not_contracting;
        return s;
    }
    const Interval gap = 1.0 - b.Z1;
    if (b.Z2.hi() == 0.0) {
        s.r_minus = b.Y / gap;
        s.r_plus = Interval(kMax, kMax);
    } else {
        const Interval disc = sqr(gap) - 2.0 * b.Y * b.Z2;
        if (!(disc.lo() > 0.0)) {
            s.reason = FailureReason::negative_discriminant;
            return s;
        }
        const Interval root = sqrt(disc);
        s.r_minus = 2.0 * b.Y / (gap + root);
        s.r_plus = (gap + root) / b.Z2;
    }

    const double rm = s.r_minus.hi();
    double r_star = -1.0;
    if (rm == 0.0) {
        if (radius_admissible(b, 0.0, R)) {
            r_star = 0.0;
        }
    } else {
        const double pow2 = smallest_power_of_two_at_least(rm);
        if (radius_admissible(b, pow2, R)) {
            r_star = pow2;
        } else {
            const double fallback = rounding::mul_up(rm, 1.0 + 0x1p-20);
            if (radius_admissible(b, fallback, R)) {
                r_star = fallback;
            }
        }
    }
    if (r_star < 0.0) {
        s.reason = FailureReason::no_admissible_radius;
        return s;
    }
    s.ok = true;
    s.r_star = r_star;

    s.r_tight = r_star;
    for (double eps : {0.0, 0x1p-50, 0x1p-40, 0x1p-30, 0x1p-20}) {
        const double r = rounding::mul_up(rm, 1.0 + eps);
        if (r <= r_star && radius_admissible(b, r, R)) {
            s.r_tight = r;
            break;
        }
    }

    s.r_unique = r_star;
    double upper = b.Z2.hi() == 0.0 ? R.cap() : ((1.0 - b.Z1) / b.Z2).lo();
    upper = std::min(upper, R.cap());
    if (!R.is_unbounded() && radius_admissible(b, upper, R)) {
        s.r_unique = std::max(upper, r_star);
    } else {
        for (int k : {30, 20, 10, 5, 3, 2, 1}) {
            const double r = rounding::mul_down(upper, 1.0 - std::ldexp(1.0, -k));
            if (r > r_star && radius_admissible(b, r, R)) {
                s.r_unique = r;
                break;
            }
        }
    }
    return s;
}

bool check_distinct(const Eigen::VectorXd& x_bar, double r) {
    std::vector<double> pts(x_bar.begin(), x_bar.end());
    std::sort(pts.begin(), pts.end());
    const double diameter = rounding::mul_up(2.0, r);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        if (!(rounding::sub_down(pts[k], pts[k - 1]) > diameter)) {
            return false;
        }
    }
    return true;
}

std::vector<GershgorinDisk> gershgorin(const IntervalMatrix& M) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("gershgorin: matrix is not square");
    }
    std::vector<GershgorinDisk> disks;
    for (std::size_t i = 0; i < M.rows(); ++i) {
        Interval off;
        for (std::size_t j = 0; j < M.cols(); ++j) {
            if (j != i) {
                off += abs(M(i, j));
            }
        }
        // Uncertainty in the diagonal entry is carried by the interval center.
        disks.push_back({M(i, i), off.hi()});
    }
    return disks;
}

Stability classify_disks(const std::vector<GershgorinDisk>& disks) {
    if (disks.empty()) {
        return Stability::inconclusive;
    }
    bool all_inside = true;
    for (const auto& d : disks) {
        if (!(rounding::add_up(abs(d.center).hi(), d.radius) < 1.0)) {
            all_inside = false;
        }
    }
    if (all_inside) {
        return Stability::stable;
    }
    const std::vector<int> comp = disk_components(disks);
    for (std::size_t i = 0; i < disks.size(); ++i) {
        bool outside = true;
        for (std::size_t j = 0; j < disks.size(); ++j) {
            if (comp[j] == comp[i] && !(rounding::sub_down(abs(disks[j].center).lo(), disks[j].radius) > 1.0)) {
                outside = false;
            }
        }
        if (outside) {
            return Stability::unstable;
        }
    }
    return Stability::inconclusive;
}

StabilityAssessment assess_stability(const MapDef& m, const Eigen::VectorXd& x_bar, double r) {
    StabilityAssessment out;
    Interval lambda(1.0);
    for (double xk : x_bar) {
        lambda = lambda * m.df(ball(xk, r));
    }
    out.eigenvalue = lambda;
    if (abs(lambda).hi() < 1.0) {
        out.verdict = Stability::stable;
    } else if (abs(lambda).lo() > 1.0) {
        out.verdict = Stability::unstable;
    } else {
        out.verdict = Stability::inconclusive;
    }
    return out;
}

Certificate certify_orbit(const Candidate& c, const AprioriRadius& R) {
    Certificate cert(c);
    cert.R = R;
    if (c.A.size() == 0 || !c.x_bar.allFinite()) {
        cert.reason = (c.status == NewtonStatus::converged || c.status == NewtonStatus::not_run)
                          ? FailureReason::singular_jacobian
                          : FailureReason::newton_failed;
        return cert;
    }
    cert.bounds = compute_bounds(c, R);
    cert.radius = select_radius(cert.bounds, R);
    if (!cert.radius.ok) {
        cert.reason = cert.radius.reason;
        return cert;
    }
    cert.verified = true;
    cert.distinct = check_distinct(c.x_bar, cert.radius.r_star);
    if (!cert.distinct) {
        cert.reason = FailureReason::not_distinct;
    }
    // Any verified radius encloses the zero; the tightest gives the tightest eigenvalue.
    const StabilityAssessment st = assess_stability(c.map, c.x_bar, cert.radius.r_tight);
    cert.eigenvalue = st.eigenvalue;
    cert.disks = st.disks;
    cert.stability = st.verdict;
    return cert;
}

bool same_orbit(const Certificate& a, const Certificate& b) {
    if (a.candidate.period != b.candidate.period || a.candidate.x_bar.size() != b.candidate.x_bar.size()) {
        return false;
    }
    const Eigen::VectorXd& xa = a.candidate.x_bar;
    const Eigen::VectorXd& xb = b.candidate.x_bar;
    const Eigen::Index p = xa.size();
    bool overlapping = false;
    for (Eigen::Index shift = 0; shift < p; ++shift) {
        Interval dist;
        for (Eigen::Index k = 0; k < p; ++k) {
            dist += abs(Interval(xa[(k + shift) % p]) - Interval(xb[k]));
        }
        if ((dist + a.radius.r_star).hi() <= b.radius.r_unique || (dist + b.radius.r_star).hi() <= a.radius.r_unique) {
            return true;
        }
        if (dist.lo() <= rounding::add_up(a.radius.r_star, b.radius.r_star)) {
            overlapping = true;
        }
    }
    return overlapping;
}

}  // namespace periodica
