#pragma once

// Period-p zero-finding map F(x)_k = f(x_{k-1 mod p}) - x_k, its Jacobian,
// native Newton refinement and seed generation.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "periodica/interval.hpp"
#include "periodica/maps.hpp"

namespace periodica {

class SingularMatrix : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class NewtonStatus { not_run, converged, max_iterations, singular, diverged };

std::string_view to_string(NewtonStatus s);

struct Candidate {
    MapDef map;
    int period = 1;
    Eigen::VectorXd x_bar;
    Eigen::MatrixXd A;
    double residual = 0.0;
    NewtonStatus status = NewtonStatus::not_run;
    /// ||F||_1 before each Newton step and after the last one.
    std::vector<double> residual_history;

    Candidate(MapDef m, int p, Eigen::VectorXd x) : map(std::move(m)), period(p), x_bar(std::move(x)) {}
    int iterations() const { return residual_history.empty() ? 0 : static_cast<int>(residual_history.size()) - 1; }
};

Eigen::VectorXd build_F(const MapDef& m, const Eigen::VectorXd& x);
Eigen::MatrixXd build_DF(const MapDef& m, const Eigen::VectorXd& x);
IntervalVector build_F(const MapDef& m, std::span<const Interval> x);
IntervalMatrix build_DF(const MapDef& m, std::span<const Interval> x);

/// Numerical inverse by LU with complete pivoting; throws SingularMatrix when
/// the reciprocal condition estimate is below rcond_min or entries are not finite.
Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& J, double rcond_min = 1e-14);

struct NewtonOptions {
    double tol = 1e-14;
    int max_iter = 50;
};

/// Refines c.x_bar; sets status, residual, history and A = DF(x_bar)^-1
/// whenever the final Jacobian is invertible.
Candidate newton_refine(Candidate c, const NewtonOptions& opts = {});

/// Largest observed ratio r_{k+1} / r_k^2 over the last `window` steps with
/// nonzero residuals; infinity if fewer than two such steps exist.
double quadratic_convergence_constant(const std::vector<double>& history, int window = 3);

/// Rotation of the orbit so that its minimal coordinate comes first.
Eigen::VectorXd canonical_rotation(const Eigen::VectorXd& x);
Candidate canonicalize_orbit(Candidate c);

enum SeedStrategy : unsigned {
    kSeedIteration = 1U << 0,
    kSeedRandom = 1U << 1,
    kSeedGrid = 1U << 2,
    kSeedAll = kSeedIteration | kSeedRandom | kSeedGrid,
};

struct SeedOptions {
    unsigned strategy = kSeedAll;
    /// Number of starts for the iteration and random strategies.
    int budget = 256;
    /// Grid resolution for the sign-change scan of f^p(x) - x.
    int grid_points = 1 << 15;
    std::uint64_t rng_seed = 0x5eed;
    double dedup_radius = 1e-8;
    NewtonOptions newton;
};

/// Converged, canonicalized and deduplicated candidates, sorted
/// lexicographically by x_bar. An empty result is not an error.
std::vector<Candidate> seed_candidates(const MapDef& m, int p, const SeedOptions& opts = {});

}  // namespace periodica
