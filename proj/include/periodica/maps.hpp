#pragma once

// One-dimensional parameterized maps x -> f(x; params) with native and
// rigorous evaluators, plus the reflected sigmoid h(x) = -1/(1+e^x) used by
// the predator-prey map and its derivative machinery.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "periodica/interval.hpp"

namespace periodica {

/// A parameter value: the double used by native evaluation and a rigorous
/// enclosure of the intended real value.
struct Param {
    double nominal = 0.0;
    Interval enclosure;

    /// The double itself is the parameter (point enclosure).
    static Param exact(double x) { return {x, Interval(x)}; }
    /// Decimal or hex literal: nominal is the nearest double, enclosure the
    /// tightest interval around the literal's exact value.
    static Param parse(std::string_view text);
};

/// Behavior of a registered map family. Implementations are stateless.
class MapModel {
  public:
    virtual ~MapModel() = default;

    virtual std::string_view id() const = 0;
    virtual std::span<const std::string_view> param_names() const = 0;

    virtual double f(double x, std::span<const double> p) const = 0;
    virtual double df(double x, std::span<const double> p) const = 0;
    virtual Interval f(const Interval& x, std::span<const Interval> p) const = 0;
    virtual Interval df(const Interval& x, std::span<const Interval> p) const = 0;

    /// Global upper bound of |f''| over the whole real line.
    virtual Interval lipschitz_df(std::span<const Interval> p) const = 0;

    /// Box from which random seeds are drawn.
    virtual std::pair<double, double> seed_box(std::span<const double> p) const = 0;

    /// Human-readable notes for parameters outside the nominal region; never
    /// a rejection.
    virtual std::vector<std::string> parameter_warnings(std::span<const double>) const { return {}; }
};

/// Registry lookup; throws std::invalid_argument for unknown ids.
std::shared_ptr<const MapModel> find_map_model(std::string_view id);
std::vector<std::string> registered_map_ids();
/// Adds or replaces a model under model->id().
void register_map_model(std::shared_ptr<const MapModel> model);

/// A map family with concrete parameter values.
class MapDef {
  public:
    MapDef(std::shared_ptr<const MapModel> model, std::vector<Param> params);
    MapDef(std::string_view id, std::vector<Param> params);

    static MapDef logistic(Param mu) { return MapDef("logistic", {mu}); }
    static MapDef logistic(double mu) { return logistic(Param::exact(mu)); }
    static MapDef predprey(Param beta, Param kappa) { return MapDef("predprey", {beta, kappa}); }
    static MapDef predprey(double beta, double kappa) {
        return predprey(Param::exact(beta), Param::exact(kappa));
    }

    std::string_view id() const { return model_->id(); }
    int dim() const { return 1; }
    const MapModel& model() const { return *model_; }
    const std::vector<Param>& params() const { return params_; }
    std::span<const double> nominal() const { return nominal_; }
    std::span<const Interval> enclosures() const { return enclosures_; }

    double f(double x) const { return model_->f(x, nominal_); }
    double df(double x) const { return model_->df(x, nominal_); }
    Interval f(const Interval& x) const { return model_->f(x, enclosures_); }
    Interval df(const Interval& x) const { return model_->df(x, enclosures_); }
    Interval lipschitz_df() const { return model_->lipschitz_df(enclosures_); }
    std::pair<double, double> seed_box() const { return model_->seed_box(nominal_); }
    std::vector<std::string> warnings() const { return model_->parameter_warnings(nominal_); }

  private:
    std::shared_ptr<const MapModel> model_;
    std::vector<Param> params_;
    std::vector<double> nominal_;
    std::vector<Interval> enclosures_;
};

// ---------------------------------------------------------------------------
// Reflected sigmoid h(x) = -1/(1+e^x) = sigma(x) - 1, sigma(x) = 1/(1+e^-x).

/// Highest derivative order supported by sigmoid_derivative.
inline constexpr int kMaxSigmoidOrder = 12;

/// Enclosure of sigma over x (monotone, evaluated at the endpoints).
Interval sigmoid(const Interval& x);

/// Enclosure of h over x.
Interval reflected_sigmoid(const Interval& x);

/// Enclosure of h'(x) = 1/(2 + e^x + e^-x); tight for wide intervals.
Interval reflected_sigmoid_slope(const Interval& x);

/// Integer coefficients (ascending powers of sigma) of the polynomial P_n
/// with h^(n)(x) = P_n(sigma(x)).
std::span<const double> sigmoid_derivative_polynomial(int n);

/// Enclosure of h^(n)(xi) for all xi in x, 0 <= n <= 12.
Interval sigmoid_derivative(int n, const Interval& x);

/// Upper bound of sup over the real line of |h^(n)|. Orders 2, 3 and 11 use
/// the closed-form values sqrt(3)/18, 1/8 and 691/8; other orders fall back
/// to the coefficient-sum bound of P_n on [0, 1].
Interval sigmoid_derivative_global_bound(int n);

/// Taylor coefficients of h about a center: coeffs[n] encloses h^(n)(chi)/n!.
struct SigmoidJet {
    Interval center;
    int order = 0;
    std::vector<Interval> coeffs;
};

SigmoidJet taylor_jet(const Interval& center, int order);

}  // namespace periodica
