#pragma once

// Uniform contraction over Chebyshev interpolants for period-doubling
// candidate curves of the predator-prey map f(x) = beta + x + kappa h(x),
// h(x) = -1/(1+e^x). Unknowns w = (x_0..x_{p-1}, u_0..u_{p-2}, beta), kappa
// runs over a window [kappa1, kappa2] reparametrized by alpha in [-1, 1].

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "periodica/certify.hpp"
#include "periodica/cheb.hpp"
#include "periodica/interval.hpp"
#include "periodica/zerofind.hpp"

namespace periodica {

class CurveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxCurvePeriod = 2;

struct KappaWindow {
    double kappa1 = 0.0;
    double kappa2 = 0.0;

    double width() const { return kappa2 - kappa1; }
    double kappa_at(double alpha) const { return kappa1 + (alpha + 1.0) / 2.0 * (kappa2 - kappa1); }
    Interval kappa_at(const Interval& alpha) const;
    /// kappa(alpha) as a Chebyshev sequence; its norm is |k1+k2|/2 + |k2-k1|/2.
    ChebSeq kappa_cheb() const;
};

enum class Split { full, poly, remainder };

/// Expansion centers (one per x coordinate) and Taylor order for the split.
struct TaylorSplit {
    std::vector<Interval> chi;
    int N = 10;
};

/// Native extended map and Jacobian at a fixed kappa.
Eigen::VectorXd extended_F(int p, const Eigen::VectorXd& w, double kappa);
Eigen::MatrixXd extended_DF(int p, const Eigen::VectorXd& w, double kappa);

/// Rigorous extended map. poly replaces h by its Taylor polynomial about
/// chi_i for coordinate x_i; remainder encloses full - poly via the Lagrange
/// remainder.
IntervalVector build_extended_F(int p, std::span<const Interval> w, const Interval& kappa, Split split = Split::full,
                                const TaylorSplit* taylor = nullptr);
IntervalMatrix build_extended_DF(int p, std::span<const Interval> w, const Interval& kappa);

/// Newton on the extended system at fixed kappa.
struct ExtendedSolve {
    Eigen::VectorXd w;
    NewtonStatus status = NewtonStatus::not_run;
    double residual = 0.0;
    int iterations = 0;
};
ExtendedSolve extended_newton(int p, Eigen::VectorXd w0, double kappa, const NewtonOptions& opts = {1e-13, 50});

/// For p = 2, orders (x0, x1) so that x0 <= x1 and resets u accordingly.
Eigen::VectorXd canonical_extended(int p, Eigen::VectorXd w, double kappa);

struct ExtendedCandidate {
    int p = 1;
    KappaWindow window;
    int K = 16;
    int N = 10;
    ChebVector w_bar;
    ChebOpMatrix A_cheb;
    std::vector<Interval> chi;
    std::vector<Eigen::VectorXd> node_w;
    std::vector<double> node_residuals;
};

struct NodeSolveOptions {
    int N = 10;
    NewtonOptions newton{1e-13, 50};
};

/// Solves at the nodes with continuation in k starting from `seed` (a
/// solution guess at alpha = -1), interpolates w and A^-1 and sets the centers.
/// Throws CurveError on Newton failure or a sign flip of det D_w F (fold).
ExtendedCandidate node_solve(int p, const KappaWindow& window, int K, const Eigen::VectorXd& seed,
                             const NodeSolveOptions& opts = {});

struct UniformBounds {
    Interval Y;
    Interval Z1;
    Interval Z2;
    Interval A_norm;
    Interval kappa_norm;
    Interval u_norm;
    Interval Y_poly;
    Interval Y_tail;
    Interval Z1_poly;
    Interval Z1_tail;
    /// Per x coordinate: sups of |h~|, |h~'|, |h~''| along the curve.
    std::vector<Interval> rem0;
    std::vector<Interval> rem1;
    std::vector<Interval> rem2;
};

inline constexpr double kDefaultCurveR = 1e-2;

UniformBounds uniform_bounds(const ExtendedCandidate& c, double R = kDefaultCurveR);

struct CurveCertificate {
    ExtendedCandidate candidate;
    UniformBounds bounds;
    double R = kDefaultCurveR;
    RadiusSelection radius;
    bool verified = false;
    FailureReason reason = FailureReason::none;
    /// w_bar(-1) and w_bar(+1) widened by r_star in every coordinate.
    IntervalVector endpoint_lo;
    IntervalVector endpoint_hi;

    double r_star() const { return radius.r_star; }
};

CurveCertificate certify_curve(const ExtendedCandidate& c, double R = kDefaultCurveR);

struct PatchResult {
    bool ok = false;
    /// Upper bound of ||w_a(+1) - w_b(alpha_b)||_1 + r_a.
    double gap = 0.0;
    /// Radius the gap must fit in (b's uniqueness radius).
    double room = 0.0;
    /// Coordinate with the largest contribution to the gap.
    std::size_t coordinate = 0;
    std::string message;
};

/// a's right endpoint must equal one endpoint of b's window. ok iff the
/// existence ball of a at kappa = a.kappa2 lies inside b's uniqueness ball.
PatchResult patch_curves(const CurveCertificate& a, const CurveCertificate& b);

/// Pointwise radii-polynomial certificate of the extended system frozen at alpha.
struct FrozenCertificate {
    Bounds bounds;
    RadiusSelection radius;
};
FrozenCertificate certify_frozen(const ExtendedCandidate& c, double alpha, double R = kDefaultCurveR);

/// Natural-parameter continuation of an extended solution from kappa_from to kappa_to.
Eigen::VectorXd continue_point(int p, Eigen::VectorXd w, double kappa_from, double kappa_to, double max_step = 0.25);

/// (x, beta) on the analytic p = 1 curve kappa = beta^2/(beta+2), beta < -4 branch.
Eigen::VectorXd analytic_p1_seed(double kappa);

struct DoublingScanOptions {
    int beta_points = 1500;
    int x_grid = 3000;
};

/// Extended solutions at fixed kappa, sorted by beta, found by scanning beta
/// for sign changes of (multiplier + 1) along p-periodic orbits.
std::vector<Eigen::VectorXd> locate_doubling_points(int p, double kappa, const DoublingScanOptions& opts = {});

struct BranchOptions {
    int K = 16;
    int N = 10;
    double R = kDefaultCurveR;
    double min_width = 1.0 / 16.0;
    bool adaptive = true;
};

struct BranchResult {
    /// Certified pieces sorted by kappa1.
    std::vector<CurveCertificate> pieces;
    /// patches[i] joins pieces[i] and pieces[i+1].
    std::vector<PatchResult> patches;
    /// Windows that failed at the minimum width, with the failure message.
    std::vector<std::pair<KappaWindow, std::string>> failures;

    bool all_verified() const;
    bool chained() const;
    /// Union of certified windows when they patch into one chain.
    KappaWindow coverage() const;
};

/// Certifies each window (splitting in half on failure down to min_width),
/// seeding by continuation from (seed, seed_kappa), then patches neighbors.
BranchResult certify_branch(int p, std::vector<KappaWindow> windows, const Eigen::VectorXd& seed, double seed_kappa,
                            const BranchOptions& opts = {});

struct CurveSample {
    double kappa = 0.0;
    Interval beta;
};

/// Enclosures of beta*(kappa) at n equally spaced alpha values.
std::vector<CurveSample> sample_curve(const CurveCertificate& c, int n);

}  // namespace periodica
