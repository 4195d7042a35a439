#include "periodica/zerofind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace periodica {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_length(const MapDef& m, std::size_t len) {
    if (len == 0 || len % static_cast<std::size_t>(m.dim()) != 0) {
        throw std::invalid_argument("state length must be a positive multiple of the map dimension");
    }
}

// Orbit of length p starting at x0, or empty if it leaves the finite range.
std::vector<double> orbit_from(const MapDef& m, double x0, int p) {
    std::vector<double> out;
    double x = x0;
    for (int k = 0; k < p; ++k) {
        if (!std::isfinite(x)) {
            return {};
        }
        out.push_back(x);
        x = m.f(x);
    }
    return out;
}

double iterate_return_gap(const MapDef& m, double x, int p) {
    double y = x;
    for (int k = 0; k < p; ++k) {
        y = m.f(y);
    }
    return y - x;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::string_view to_string(NewtonStatus s) {
    switch (s) {
    case NewtonStatus::not_run:
        return "not_run";
    case NewtonStatus::converged:
        return "converged";
    case NewtonStatus::max_iterations:
        return "max_iterations";
    case NewtonStatus::singular:
        return "singular";
    case NewtonStatus::diverged:
        return "diverged";
    }
    return "unknown";
}

Eigen::VectorXd build_F(const MapDef& m, const Eigen::VectorXd& x) {
    check_length(m, static_cast<std::size_t>(x.size()));
    const Eigen::Index p = x.size();
    Eigen::VectorXd F(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index prev = (k + p - 1) % p;
        F[k] = m.f(x[prev]) - x[k];
    }
    return F;
}

Eigen::MatrixXd build_DF(const MapDef& m, const Eigen::VectorXd& x) {
    check_length(m, static_cast<std::size_t>(x.size()));
    const Eigen::Index p = x.size();
    Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index prev = (k + p - 1) % p;
        J(k, prev) += m.df(x[prev]);
    }
    return J;
}

IntervalVector build_F(const MapDef& m, std::span<const Interval> x) {
    check_length(m, x.size());
    const std::size_t p = x.size();
    IntervalVector F(p);
    for (std::size_t k = 0; k < p; ++k) {
        F[k] = m.f(x[(k + p - 1) % p]) - x[k];
    }
    return F;
}

IntervalMatrix build_DF(const MapDef& m, std::span<const Interval> x) {
    check_length(m, x.size());
    const std::size_t p = x.size();
    IntervalMatrix J(p, p);
    for (std::size_t k = 0; k < p; ++k) {
        J(k, k) = Interval(-1.0);
    }
    for (std::size_t k = 0; k < p; ++k) {
        const std::size_t prev = (k + p - 1) % p;
        J(k, prev) = J(k, prev) + m.df(x[prev]);
    }
    return J;
}

Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& J, double rcond_min) {
    if (J.rows() != J.cols()) {
        throw std::invalid_argument("approx_inverse: matrix is not square");
    }
    if (!J.allFinite()) {
        throw SingularMatrix("approx_inverse: non-finite entries");
    }
    // Complete pivoting: the residual I - A J is markedly smaller at these sizes.
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    // rcond() does not see exactly zero pivots.
    if (!lu.isInvertible() || !(lu.rcond() >= rcond_min)) {
        throw SingularMatrix("approx_inverse: numerically singular (rcond " + std::to_string(lu.rcond()) + ")");
    }
    Eigen::MatrixXd A = lu.inverse();
    if (!A.allFinite()) {
        throw SingularMatrix("approx_inverse: non-finite inverse");
    }
    return A;
}

Candidate newton_refine(Candidate c, const NewtonOptions& opts) {
    c.residual_history.clear();
    c.status = NewtonStatus::max_iterations;
    Eigen::VectorXd& x = c.x_bar;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd F = build_F(c.map, x);
        const double r = F.lpNorm<1>();
        c.residual_history.push_back(r);
        c.residual = r;
        if (!std::isfinite(r)) {
            c.status = NewtonStatus::diverged;
            break;
        }
        if (r <= opts.tol) {
            c.status = NewtonStatus::converged;
            break;
        }
        if (it >= opts.max_iter) {
            c.status = NewtonStatus::max_iterations;
            break;
        }
        const Eigen::MatrixXd J = build_DF(c.map, x);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!J.allFinite() || !(lu.rcond() >= 1e-15)) {
            c.status = NewtonStatus::singular;
            break;
        }
        const Eigen::VectorXd dx = lu.solve(-F);
        x += dx;
        // Step at the rounding floor: the residual cannot improve further.
        const double scale = 1.0 + x.lpNorm<1>();
        if (dx.lpNorm<1>() <= 16 * kEps * scale) {
            const double r_final = build_F(c.map, x).lpNorm<1>();
            c.residual_history.push_back(r_final);
            c.residual = r_final;
            c.status = r_final <= 1e-10 * scale ? NewtonStatus::converged : NewtonStatus::diverged;
            break;
        }
    }
    if (c.status == NewtonStatus::converged) {
        try {
            c.A = approx_inverse(build_DF(c.map, x));
        } catch (const SingularMatrix&) {
            c.status = NewtonStatus::singular;
        }
    }
    return c;
}

double quadratic_convergence_constant(const std::vector<double>& history, int window) {
    double worst = -1.0;
    int used = 0;
    for (std::size_t k = history.size(); k-- > 1 && used < window;) {
        if (history[k] == 0.0 || history[k - 1] == 0.0) {
            continue;
        }
        worst = std::max(worst, history[k] / (history[k - 1] * history[k - 1]));
        ++used;
    }
    return used == 0 ? std::numeric_limits<double>::infinity() : worst;
}

Eigen::VectorXd canonical_rotation(const Eigen::VectorXd& x) {
    if (x.size() == 0) {
        return x;
    }
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < x.size(); ++k) {
        // Ties broken by the lexicographically smaller rotation.
        if (x[k] < x[best]) {
            best = k;
        } else if (x[k] == x[best]) {
            for (Eigen::Index j = 1; j < x.size(); ++j) {
                const double a = x[(k + j) % x.size()];
                const double b = x[(best + j) % x.size()];
                if (a != b) {
                    if (a < b) {
                        best = k;
                    }
                    break;
                }
            }
        }
    }
    Eigen::VectorXd out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        out[j] = x[(best + j) % x.size()];
    }
    return out;
}

Candidate canonicalize_orbit(Candidate c) {
    const Eigen::VectorXd rotated = canonical_rotation(c.x_bar);
    if (rotated != c.x_bar) {
        c.x_bar = rotated;
        if (c.A.size() != 0) {
            try {
                c.A = approx_inverse(build_DF(c.map, c.x_bar));
            } catch (const SingularMatrix&) {
                c.A.resize(0, 0);
            }
        }
    }
    return c;
}

std::vector<Candidate> seed_candidates(const MapDef& m, int p, const SeedOptions& opts) {
    if (p < 1) {
        throw std::invalid_argument("period must be positive");
    }
    if (opts.budget <= 0) {
        throw std::invalid_argument("seeding budget must be positive");
    }
    const auto [lo, hi] = m.seed_box();
    std::mt19937_64 rng(opts.rng_seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(p)));
    std::uniform_real_distribution<double> unif(lo, hi);

    std::vector<std::vector<double>> seeds;
    if (opts.strategy & kSeedIteration) {
        constexpr int kTransient = 1000;
        for (int s = 0; s < opts.budget; ++s) {
            double x = unif(rng);
            for (int t = 0; t < kTransient && std::isfinite(x); ++t) {
                x = m.f(x);
            }
            if (auto orbit = orbit_from(m, x, p); !orbit.empty()) {
                seeds.push_back(std::move(orbit));
            }
        }
    }
    if (opts.strategy & kSeedRandom) {
        for (int s = 0; s < opts.budget; ++s) {
            if (s % 2 == 0) {
                std::vector<double> v(static_cast<std::size_t>(p));
                for (auto& vi : v) {
                    vi = unif(rng);
                }
                seeds.push_back(std::move(v));
            } else if (auto orbit = orbit_from(m, unif(rng), p); !orbit.empty()) {
                seeds.push_back(std::move(orbit));
            }
        }
    }
    if ((opts.strategy & kSeedGrid) && m.dim() == 1 && opts.grid_points > 1) {
        const int n = opts.grid_points;
        const double step = (hi - lo) / n;
        double x_prev = lo;
        double g_prev = iterate_return_gap(m, x_prev, p);
        for (int i = 1; i <= n; ++i) {
            const double x = (i == n) ? hi : lo + step * i;
            const double g = iterate_return_gap(m, x, p);
            if (std::isfinite(g) && std::isfinite(g_prev) && (g_prev == 0.0 || (g_prev < 0) != (g < 0))) {
                double a = x_prev;
                double b = x;
                double ga = g_prev;
                for (int it = 0; it < 60 && ga != 0.0; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (mid <= a || mid >= b) {
                        break;
                    }
                    const double gm = iterate_return_gap(m, mid, p);
                    if ((gm < 0) == (ga < 0)) {
                        a = mid;
                        ga = gm;
                    } else {
                        b = mid;
                    }
                }
                if (auto orbit = orbit_from(m, ga == 0.0 ? a : 0.5 * (a + b), p); !orbit.empty()) {
                    seeds.push_back(std::move(orbit));
                }
            }
            x_prev = x;
            g_prev = g;
        }
    }

    std::vector<Candidate> converged;
    for (const auto& s : seeds) {
        Candidate c = newton_refine(Candidate(m, p, to_vector(s)), opts.newton);
        if (c.status != NewtonStatus::converged || !c.x_bar.allFinite()) {
            continue;
        }
        converged.push_back(canonicalize_orbit(std::move(c)));
    }
    std::stable_sort(converged.begin(), converged.end(),
                     [](const Candidate& a, const Candidate& b) { return lex_less(a.x_bar, b.x_bar); });

    std::vector<Candidate> kept;
    for (auto& c : converged) {
        bool duplicate = false;
        for (std::size_t j = kept.size(); j-- > 0;) {
            if (c.x_bar[0] - kept[j].x_bar[0] > opts.dedup_radius) {
                break;
            }
            if ((c.x_bar - kept[j].x_bar).lpNorm<1>() < opts.dedup_radius) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(std::move(c));
        }
    }
    return kept;
}

}  // namespace periodica
