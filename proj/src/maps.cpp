#include "periodica/maps.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace periodica {

namespace {

// exp overflows past ~709.78; beyond this threshold sigma is bounded directly.
constexpr double kExpLimit = 700.0;

// Enclosure of 1/(1+e^-t) at a single point t (as a thin interval).
Interval sigmoid_at(double t) {
    if (t > kExpLimit) {
        // 1 - e^-t <= sigma <= 1
        return Interval(rounding::next_down(1.0), 1.0);
    }
    if (t < -kExpLimit) {
        // 0 < sigma <= e^t
        return Interval(0.0, exp(Interval(t)).hi());
    }
    return 1.0 / (1.0 + exp(Interval(-t)));
}

// 2 + e^t + e^-t at a point, as an enclosure (upper end may be huge).
Interval cosh_sum_at(double t) {
    if (std::fabs(t) > kExpLimit) {
        return Interval(std::exp(kExpLimit), std::numeric_limits<double>::max());
    }
    const Interval ti(t);
    return 2.0 + exp(ti) + exp(-ti);
}

Interval horner(std::span<const double> coeffs, const Interval& s) {
    Interval acc(coeffs.back());
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
        acc = acc * s + Interval(coeffs[k]);
    }
    return acc;
}

// Interval Horner on a subdivided range limits the dependency overestimate.
Interval eval_polynomial_on(std::span<const double> coeffs, const Interval& s) {
    constexpr int kPieces = 64;
    if (s.width() < 1e-3) {
        return horner(coeffs, s);
    }
    Interval result = horner(coeffs, Interval(s.lo()));
    const double step = (s.hi() - s.lo()) / kPieces;
    double left = s.lo();
    for (int i = 0; i < kPieces; ++i) {
        const double right = (i == kPieces - 1) ? s.hi() : std::min(s.hi(), s.lo() + step * (i + 1));
        if (right > left) {
            result = hull(result, horner(coeffs, Interval(left, right)));
        }
        left = right;
    }
    return result;
}

const std::vector<std::vector<double>>& sigmoid_polynomials() {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<long long>> p(kMaxSigmoidOrder + 1);
        p[0] = {-1, 1};  // h = sigma - 1
        for (int n = 0; n < kMaxSigmoidOrder; ++n) {
            // P_{n+1}(s) = P_n'(s) * (s - s^2)
            const auto& cur = p[n];
            std::vector<long long> deriv(cur.size() > 1 ? cur.size() - 1 : 1, 0);
            for (std::size_t k = 1; k < cur.size(); ++k) {
                deriv[k - 1] = static_cast<long long>(k) * cur[k];
            }
            std::vector<long long> next(deriv.size() + 2, 0);
            for (std::size_t k = 0; k < deriv.size(); ++k) {
                next[k + 1] += deriv[k];
                next[k + 2] -= deriv[k];
            }
            p[n + 1] = std::move(next);
        }
        std::vector<std::vector<double>> out;
        for (const auto& poly : p) {
            std::vector<double> d;
            for (long long c : poly) {
                if (std::llabs(c) > (1LL << 53)) {
                    throw std::logic_error("sigmoid polynomial coefficient not exact in binary64");
                }
                d.push_back(static_cast<double>(c));
            }
            out.push_back(std::move(d));
        }
        return out;
    }();
    return table;
}

void check_order(int n) {
    if (n < 0 || n > kMaxSigmoidOrder) {
        throw std::out_of_range("sigmoid derivative order out of range [0, 12]: " + std::to_string(n));
    }
}

// ---------------------------------------------------------------------------

class LogisticModel final : public MapModel {
  public:
    std::string_view id() const override { return "logistic"; }
    std::span<const std::string_view> param_names() const override { return names_; }

    double f(double x, std::span<const double> p) const override { return p[0] * x * (1 - x); }
    double df(double x, std::span<const double> p) const override { return p[0] * (1 - 2 * x); }

    Interval f(const Interval& x, std::span<const Interval> p) const override {
        // mu * (1/4 - (x - 1/2)^2) has no dependency overestimate.
        return p[0] * (0.25 - sqr(x - 0.5));
    }
    Interval df(const Interval& x, std::span<const Interval> p) const override {
        return p[0] * (1.0 - 2.0 * x);
    }
    Interval lipschitz_df(std::span<const Interval> p) const override { return 2.0 * abs(p[0]); }

    std::pair<double, double> seed_box(std::span<const double>) const override { return {0.0, 1.0}; }

    std::vector<std::string> parameter_warnings(std::span<const double> p) const override {
        if (p[0] < 0.0 || p[0] > 4.0) {
            return {"mu outside [0, 4]: [0, 1] is not invariant"};
        }
        return {};
    }

  private:
    static constexpr std::array<std::string_view, 1> names_{"mu"};
};

class PredPreyModel final : public MapModel {
  public:
    std::string_view id() const override { return "predprey"; }
    std::span<const std::string_view> param_names() const override { return names_; }

    double f(double x, std::span<const double> p) const override {
        return p[0] + x - p[1] / (1 + std::exp(x));
    }
    double df(double x, std::span<const double> p) const override {
        const double e = std::exp(x);
        return 1 + p[1] * e / ((1 + e) * (1 + e));
    }

    Interval f(const Interval& x, std::span<const Interval> p) const override {
        return p[0] + x + p[1] * reflected_sigmoid(x);
    }
    Interval df(const Interval& x, std::span<const Interval> p) const override {
        return 1.0 + p[1] * reflected_sigmoid_slope(x);
    }
    Interval lipschitz_df(std::span<const Interval> p) const override {
        return sigmoid_derivative_global_bound(2) * abs(p[1]);
    }

    std::pair<double, double> seed_box(std::span<const double> p) const override {
        // Orbits live roughly within |kappa| of the origin; f(x) ~ beta + x for
        // large x and beta + x - kappa for very negative x.
        const double span = std::fabs(p[1]) + std::fabs(p[0]) + 2.0;
        return {-span, span};
    }

    std::vector<std::string> parameter_warnings(std::span<const double> p) const override {
        if (!(p[1] < p[0] && p[0] < 0.0)) {
            return {"(beta, kappa) outside the region kappa < beta < 0"};
        }
        return {};
    }

  private:
    static constexpr std::array<std::string_view, 2> names_{"beta", "kappa"};
};

struct Registry {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const MapModel>, std::less<>> models;

    Registry() {
        models.emplace("logistic", std::make_shared<LogisticModel>());
        models.emplace("predprey", std::make_shared<PredPreyModel>());
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

Param Param::parse(std::string_view text) {
    return {parse_double(text), Interval::from_decimal(text)};
}

std::shared_ptr<const MapModel> find_map_model(std::string_view id) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    const auto it = r.models.find(id);
    if (it == r.models.end()) {
        throw std::invalid_argument("unknown map id: '" + std::string(id) + "'");
    }
    return it->second;
}

std::vector<std::string> registered_map_ids() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> ids;
    for (const auto& [id, _] : r.models) {
        ids.push_back(id);
    }
    return ids;
}

void register_map_model(std::shared_ptr<const MapModel> model) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.models[std::string(model->id())] = std::move(model);
}

MapDef::MapDef(std::shared_ptr<const MapModel> model, std::vector<Param> params)
    : model_(std::move(model)), params_(std::move(params)) {
    if (params_.size() != model_->param_names().size()) {
        throw std::invalid_argument("map '" + std::string(model_->id()) + "' expects " +
                                    std::to_string(model_->param_names().size()) + " parameters");
    }
    for (const auto& p : params_) {
        nominal_.push_back(p.nominal);
        enclosures_.push_back(p.enclosure);
    }
}

MapDef::MapDef(std::string_view id, std::vector<Param> params) : MapDef(find_map_model(id), std::move(params)) {}

// ---------------------------------------------------------------------------

Interval sigmoid(const Interval& x) {
    const double lo = sigmoid_at(x.lo()).lo();
    const double hi = sigmoid_at(x.hi()).hi();
    return Interval(std::max(lo, 0.0), std::min(hi, 1.0));
}

Interval reflected_sigmoid(const Interval& x) {
    // h(x) = -sigma(-x), increasing in x.
    const double lo = -sigmoid_at(-x.lo()).hi();
    const double hi = -sigmoid_at(-x.hi()).lo();
    return Interval(std::max(lo, -1.0), std::min(hi, 0.0));
}

Interval reflected_sigmoid_slope(const Interval& x) {
    // 2 + e^t + e^-t is convex with minimum 4 at t = 0.
    const Interval g_lo = cosh_sum_at(x.lo());
    const Interval g_hi = cosh_sum_at(x.hi());
    const double g_min = x.contains_zero() ? 4.0 : std::min(g_lo.lo(), g_hi.lo());
    const double g_max = std::max(g_lo.hi(), g_hi.hi());
    const double lo = rounding::div_down(1.0, g_max);
    const double hi = rounding::div_up(1.0, g_min);
    return Interval(lo, std::min(hi, 0.25));
}

std::span<const double> sigmoid_derivative_polynomial(int n) {
    check_order(n);
    return sigmoid_polynomials()[static_cast<std::size_t>(n)];
}

Interval sigmoid_derivative(int n, const Interval& x) {
    check_order(n);
    const auto& poly = sigmoid_polynomials()[static_cast<std::size_t>(n)];
    if (n >= 1 && x.lo() > 0.0) {
        // sigma^(n)(x) = (-1)^(n+1) sigma^(n)(-x); near s = 1 the polynomial cancels badly.
        const Interval v = eval_polynomial_on(poly, sigmoid(-x));
        return n % 2 == 1 ? v : -v;
    }
    return eval_polynomial_on(poly, sigmoid(x));
}

Interval sigmoid_derivative_global_bound(int n) {
    check_order(n);
    switch (n) {
    case 2:
        return sqrt(Interval(3.0)) / 18.0;
    case 3:
        return Interval(0.125);
    case 11:
        return Interval(691.0 / 8.0);
    default: {
        Interval sum;
        for (double c : sigmoid_polynomials()[static_cast<std::size_t>(n)]) {
            sum += Interval(std::fabs(c));
        }
        return sum;
    }
    }
}

SigmoidJet taylor_jet(const Interval& center, int order) {
    if (order < 0 || order > 11) {
        throw std::out_of_range("Taylor order out of range [0, 11]: " + std::to_string(order));
    }
    SigmoidJet jet{center, order, {}};
    const Interval s = sigmoid(center);
    Interval factorial(1.0);
    for (int n = 0; n <= order; ++n) {
        if (n > 0) {
            factorial = factorial * static_cast<double>(n);
        }
        jet.coeffs.push_back(eval_polynomial_on(sigmoid_polynomials()[static_cast<std::size_t>(n)], s) /
                             factorial);
    }
    return jet;
}

}  // namespace periodica
