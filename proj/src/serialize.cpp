#include "periodica/serialize.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace periodica {

json hex_json(double x) { return to_hex(x); }

double double_from_json(const json& j) {
    if (j.is_string()) {
        return parse_double(j.get<std::string>());
    }
    if (j.is_number()) {
        return j.get<double>();
    }
    throw std::invalid_argument("expected a number or a hex-float string");
}

json to_json(const Interval& x) { return json::array({hex_json(x.lo()), hex_json(x.hi())}); }

Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("interval must be a [lo, hi] pair");
    }
    return Interval(double_from_json(j[0]), double_from_json(j[1]));
}

json to_json(const ChebSeq& s) {
    json coeffs = json::array();
    for (const auto& c : s.coeffs()) {
        coeffs.push_back(to_json(c));
    }
    return {{"convention", "halved"}, {"coeffs", coeffs}};
}

ChebSeq cheb_from_json(const json& j) {
    if (j.value("convention", std::string("halved")) != "halved") {
        throw std::invalid_argument("unsupported Chebyshev convention");
    }
    std::vector<Interval> c;
    for (const auto& e : j.at("coeffs")) {
        c.push_back(interval_from_json(e));
    }
    return ChebSeq(std::move(c));
}

json to_json(const MapDef& m) {
    json params = json::object();
    const auto names = m.model().param_names();
    for (std::size_t i = 0; i < m.params().size(); ++i) {
        const Param& p = m.params()[i];
        params[std::string(names[i])] = {{"nominal", hex_json(p.nominal)}, {"enclosure", to_json(p.enclosure)}};
    }
    return {{"id", std::string(m.id())}, {"params", params}};
}

MapDef map_from_json(const json& j) {
    const auto model = find_map_model(j.at("id").get<std::string>());
    std::vector<Param> params;
    for (std::string_view name : model->param_names()) {
        const json& p = j.at("params").at(std::string(name));
        params.push_back({double_from_json(p.at("nominal")), interval_from_json(p.at("enclosure"))});
    }
    return MapDef(model, std::move(params));
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(hex_json(x));
    }
    return a;
}

json radius_json(const RadiusSelection& r) {
    return {{"ok", r.ok},
            {"reason", std::string(to_string(r.reason))},
            {"r_minus", to_json(r.r_minus)},
            {"r_plus", to_json(r.r_plus)},
            {"r_star", hex_json(r.r_star)},
            {"r_tight", hex_json(r.r_tight)},
            {"r_unique", hex_json(r.r_unique)}};
}

FailureReason reason_from_string(const std::string& s) {
    for (auto r : {FailureReason::none, FailureReason::newton_failed, FailureReason::singular_jacobian,
                   FailureReason::z1_not_contracting, FailureReason::negative_discriminant,
                   FailureReason::no_admissible_radius, FailureReason::not_distinct}) {
        if (to_string(r) == s) {
            return r;
        }
    }
    throw std::invalid_argument("unknown failure reason: " + s);
}

Stability stability_from_string(const std::string& s) {
    for (auto v : {Stability::stable, Stability::unstable, Stability::inconclusive}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown stability verdict: " + s);
}

}  // namespace

json to_json(const Certificate& c) {
    json disks = json::array();
    for (const auto& d : c.disks) {
        disks.push_back({{"center", to_json(d.center)}, {"radius", hex_json(d.radius)}});
    }
    return {{"kind", "orbit"},
            {"map", to_json(c.candidate.map)},
            {"period", c.candidate.period},
            {"x_bar", vector_json(c.candidate.x_bar)},
            {"newton", {{"status", std::string(to_string(c.candidate.status))},
                        {"iterations", c.candidate.iterations()},
                        {"residual", hex_json(c.candidate.residual)}}},
            {"R", c.R.is_unbounded() ? json("unbounded") : hex_json(c.R.value())},
            {"Y", to_json(c.bounds.Y)},
            {"Z1", to_json(c.bounds.Z1)},
            {"Z2", to_json(c.bounds.Z2)},
            {"radius", radius_json(c.radius)},
            {"verified", c.verified},
            {"distinct", c.distinct},
            {"eigenvalue", to_json(c.eigenvalue)},
            {"disks", disks},
            {"stability", std::string(to_string(c.stability))},
            {"reason", std::string(to_string(c.reason))}};
}

Certificate certificate_from_json(const json& j) {
    MapDef m = map_from_json(j.at("map"));
    const int p = j.at("period").get<int>();
    Eigen::VectorXd x(static_cast<Eigen::Index>(j.at("x_bar").size()));
    for (std::size_t i = 0; i < j.at("x_bar").size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = double_from_json(j.at("x_bar")[i]);
    }
    Candidate cand(std::move(m), p, std::move(x));
    const json& newton = j.at("newton");
    const std::string status = newton.at("status").get<std::string>();
    for (auto s : {NewtonStatus::not_run, NewtonStatus::converged, NewtonStatus::max_iterations, NewtonStatus::singular,
                   NewtonStatus::diverged}) {
        if (to_string(s) == status) {
            cand.status = s;
        }
    }
    cand.residual = double_from_json(newton.at("residual"));
    try {
        cand.A = approx_inverse(build_DF(cand.map, cand.x_bar));
    } catch (const SingularMatrix&) {
        cand.status = NewtonStatus::singular;
    }
    Certificate c(std::move(cand));
    const json& R = j.at("R");
    c.R = R.is_string() && R.get<std::string>() == "unbounded" ? AprioriRadius::unbounded()
                                                                : AprioriRadius::finite(double_from_json(R));
    c.bounds = {interval_from_json(j.at("Y")), interval_from_json(j.at("Z1")), interval_from_json(j.at("Z2"))};
    const json& r = j.at("radius");
    c.radius.ok = r.at("ok").get<bool>();
    c.radius.reason = reason_from_string(r.at("reason").get<std::string>());
    c.radius.r_minus = interval_from_json(r.at("r_minus"));
    c.radius.r_plus = interval_from_json(r.at("r_plus"));
    c.radius.r_star = double_from_json(r.at("r_star"));
    c.radius.r_tight = double_from_json(r.at("r_tight"));
    c.radius.r_unique = double_from_json(r.at("r_unique"));
    c.verified = j.at("verified").get<bool>();
    c.distinct = j.at("distinct").get<bool>();
    c.eigenvalue = interval_from_json(j.at("eigenvalue"));
    for (const auto& d : j.at("disks")) {
        c.disks.push_back({interval_from_json(d.at("center")), double_from_json(d.at("radius"))});
    }
    c.stability = stability_from_string(j.at("stability").get<std::string>());
    c.reason = reason_from_string(j.at("reason").get<std::string>());
    return c;
}

json to_json(const CurveCertificate& c) {
    const ExtendedCandidate& e = c.candidate;
    json w = json::array();
    for (const auto& s : e.w_bar) {
        w.push_back(to_json(s));
    }
    json chi = json::array();
    for (const auto& x : e.chi) {
        chi.push_back(to_json(x));
    }
    json lo = json::array();
    json hi = json::array();
    for (const auto& x : c.endpoint_lo) {
        lo.push_back(to_json(x));
    }
    for (const auto& x : c.endpoint_hi) {
        hi.push_back(to_json(x));
    }
    const UniformBounds& b = c.bounds;
    return {{"kind", "curve"},
            {"label", "period-doubling candidate"},
            {"map", "predprey"},
            {"period", e.p},
            {"window", {hex_json(e.window.kappa1), hex_json(e.window.kappa2)}},
            {"K", e.K},
            {"N", e.N},
            {"chi", chi},
            {"R", hex_json(c.R)},
            {"Y", to_json(b.Y)},
            {"Z1", to_json(b.Z1)},
            {"Z2", to_json(b.Z2)},
            {"parts",
             {{"A_norm", to_json(b.A_norm)},
              {"kappa_norm", to_json(b.kappa_norm)},
              {"u_norm", to_json(b.u_norm)},
              {"Y_poly", to_json(b.Y_poly)},
              {"Y_tail", to_json(b.Y_tail)},
              {"Z1_poly", to_json(b.Z1_poly)},
              {"Z1_tail", to_json(b.Z1_tail)}}},
            {"radius", radius_json(c.radius)},
            {"verified", c.verified},
            {"reason", std::string(to_string(c.reason))},
            {"endpoint_lo", lo},
            {"endpoint_hi", hi},
            {"w_bar", w}};
}

json to_json(const PatchResult& p) {
    return {{"ok", p.ok}, {"gap", hex_json(p.gap)}, {"room", hex_json(p.room)}, {"coordinate", p.coordinate},
            {"message", p.message}};
}

std::string curve_samples_csv(const std::vector<CurveCertificate>& pieces, int per_piece) {
    std::ostringstream out;
    out << "kappa,beta_lo,beta_hi\n";
    char buf[128];
    for (const auto& c : pieces) {
        if (!c.verified) {
            continue;
        }
        for (const auto& s : sample_curve(c, per_piece)) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.kappa, s.beta.lo(), s.beta.hi());
            out << buf;
        }
    }
    return out.str();
}

}  // namespace periodica
