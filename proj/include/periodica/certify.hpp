#pragma once

// Radii-polynomial certification of period-p orbits: Y/Z1/Z2 bounds, radius
// selection, distinctness of the orbit points and a rigorous eigenvalue.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "periodica/interval.hpp"
#include "periodica/zerofind.hpp"

namespace periodica {

/// A priori radius R; unbounded is allowed where Z2 holds globally.
class AprioriRadius {
  public:
    static AprioriRadius unbounded() { return AprioriRadius(); }
    static AprioriRadius finite(double r);

    bool is_unbounded() const noexcept { return !value_.has_value(); }
    double value() const;
    /// R as a double, +max for the unbounded sentinel.
    double cap() const noexcept;

  private:
    AprioriRadius() = default;
    std::optional<double> value_;
};

struct Bounds {
    Interval Y;
    Interval Z1;
    Interval Z2;
};

enum class FailureReason {
    none,
    newton_failed,
    singular_jacobian,
    z1_not_contracting,
    negative_discriminant,
    no_admissible_radius,
    not_distinct,
};

std::string_view to_string(FailureReason r);

struct RadiusSelection {
    bool ok = false;
    FailureReason reason = FailureReason::none;
    Interval r_minus;
    /// Upper root; hi is +max when Z2 = 0.
    Interval r_plus;
    /// Power of two (or fallback) at which both conditions were re-verified.
    double r_star = 0.0;
    /// Smallest verified radius found near sup(r_minus); r_tight <= r_star.
    double r_tight = 0.0;
    /// Largest verified radius, still inside the region Z1 + r Z2 < 1.
    double r_unique = 0.0;
};

/// Sound evaluation of P(r) <= 0, Z1 + r Z2 < 1 and r <= R.
bool radius_admissible(const Bounds& b, double r, const AprioriRadius& R);

/// Y, Z1 and Z2 from F(xbar), DF(xbar) (rigorous enclosures) and a bound L
/// with ||DF(x) - DF(y)|| <= L ||x - y|| on the a priori ball.
Bounds bounds_from(std::span<const Interval> F, const IntervalMatrix& DF, const Eigen::MatrixXd& A,
                   const Interval& lipschitz);

/// Bounds for the periodic orbit problem; Z2 = lipschitz_DF(params) ||A||.
Bounds compute_bounds(const Candidate& c, const AprioriRadius& R = AprioriRadius::unbounded());

RadiusSelection select_radius(const Bounds& b, const AprioriRadius& R = AprioriRadius::unbounded());

/// Pairwise disjointness of the closed 1-D balls [x_k - r, x_k + r].
bool check_distinct(const Eigen::VectorXd& x_bar, double r);

enum class Stability { stable, unstable, inconclusive };
std::string_view to_string(Stability s);

struct GershgorinDisk {
    Interval center;
    double radius = 0.0;
};

/// Row-wise disks of an interval matrix (center = diagonal entry, radius an
/// upper bound of the off-diagonal absolute row sum).
std::vector<GershgorinDisk> gershgorin(const IntervalMatrix& M);

/// Stable when every disk lies in the open unit disk; unstable when some
/// connected component of disks lies outside the closed unit disk.
Stability classify_disks(const std::vector<GershgorinDisk>& disks);

struct StabilityAssessment {
    Interval eigenvalue;
    std::vector<GershgorinDisk> disks;
    Stability verdict = Stability::inconclusive;
};

StabilityAssessment assess_stability(const MapDef& m, const Eigen::VectorXd& x_bar, double r);

struct Certificate {
    explicit Certificate(Candidate c) : candidate(std::move(c)) {}

    Candidate candidate;
    AprioriRadius R = AprioriRadius::unbounded();
    Bounds bounds;
    RadiusSelection radius;
    bool distinct = false;
    Interval eigenvalue;
    std::vector<GershgorinDisk> disks;
    Stability stability = Stability::inconclusive;
    bool verified = false;
    FailureReason reason = FailureReason::none;

    double r_star() const { return radius.r_star; }
    /// Verified zero of F whose points are pairwise distinct.
    bool counts_as_orbit() const { return verified && distinct; }
};

/// bounds -> radius -> distinctness -> stability. verified reports the
/// existence proof; a verified certificate with non-distinct points keeps
/// verified = true, distinct = false and reason not_distinct.
Certificate certify_orbit(const Candidate& c, const AprioriRadius& R = AprioriRadius::unbounded());

/// True when the two certified orbits are provably the same (some rotation of
/// a lies, with its existence ball, inside b's uniqueness ball or vice versa),
/// or when their balls overlap without nesting (not separable).
bool same_orbit(const Certificate& a, const Certificate& b);

}  // namespace periodica
