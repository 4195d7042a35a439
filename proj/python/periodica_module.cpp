#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "periodica/certify.hpp"
#include "periodica/pdcurve.hpp"
#include "periodica/serialize.hpp"
#include "periodica/sweep.hpp"

namespace py = pybind11;
using namespace periodica;

namespace {

// Parameter values arrive as floats (taken exactly) or strings (decimal or
// hex literals, enclosed tightly).
Param to_param(const py::handle& v) {
    if (py::isinstance<py::str>(v)) {
        return Param::parse(v.cast<std::string>());
    }
    return Param::exact(v.cast<double>());
}

MapDef make_map(const std::string& id, const py::dict& params) {
    const auto model = find_map_model(id);
    std::vector<Param> ps;
    for (auto name : model->param_names()) {
        const py::str key{std::string(name)};
        if (!params.contains(key)) {
            throw py::key_error("missing parameter '" + std::string(name) + "'");
        }
        ps.push_back(to_param(params[key]));
    }
    return MapDef(model, std::move(ps));
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string certify_json(const std::string& id, const py::dict& params, int period, const std::vector<double>& x,
                         bool refine, std::optional<double> R) {
    const MapDef m = make_map(id, params);
    if (static_cast<int>(x.size()) != period) {
        throw py::value_error("x must have `period` entries");
    }
    Candidate c(m, period, to_vector(x));
    if (refine) {
        c = newton_refine(std::move(c));
    } else {
        try {
            c.A = approx_inverse(build_DF(m, c.x_bar));
        } catch (const SingularMatrix&) {
            c.status = NewtonStatus::singular;
        }
    }
    const AprioriRadius radius = R ? AprioriRadius::finite(*R) : AprioriRadius::unbounded();
    py::gil_scoped_release release;
    return to_json(certify_orbit(c, radius)).dump();
}

std::vector<std::string> seed_json(const std::string& id, const py::dict& params, int period, std::uint64_t seed,
                                   int budget) {
    const MapDef m = make_map(id, params);
    SeedOptions opts;
    opts.rng_seed = seed;
    opts.budget = budget;
    std::vector<std::string> out;
    py::gil_scoped_release release;
    for (const auto& c : census_cell(m, period, opts)) {
        out.push_back(to_json(c).dump());
    }
    return out;
}

py::dict sweep(const std::string& id, const py::dict& grid, int p_min, int p_max, int budget, int grid_points,
               std::uint64_t seed, int workers) {
    SweepConfig cfg;
    cfg.map_id = id;
    const auto model = find_map_model(id);
    for (auto name : model->param_names()) {
        const py::str key{std::string(name)};
        if (!grid.contains(key)) {
            throw py::key_error("missing grid for '" + std::string(name) + "'");
        }
        const auto r = grid[key].cast<std::tuple<double, double, double>>();
        cfg.grid.push_back({std::get<0>(r), std::get<1>(r), std::get<2>(r)});
    }
    cfg.p_min = p_min;
    cfg.p_max = p_max;
    cfg.budget = budget;
    cfg.grid_points = grid_points;
    cfg.seed = seed;
    cfg.workers = workers;
    SweepResult r;
    {
        py::gil_scoped_release release;
        r = run_sweep(cfg);
    }
    py::list rows;
    for (const auto& row : r.rows) {
        py::dict d;
        d["params"] = row.params;
        d["period"] = row.period;
        d["n_stable"] = row.n_stable;
        d["n_unstable"] = row.n_unstable;
        d["n_inconclusive"] = row.n_inconclusive;
        d["max_period"] = row.max_period;
        rows.append(d);
    }
    py::list archive;
    for (const auto& c : r.archive) {
        archive.append(to_json(c).dump());
    }
    const FigureTables t = aggregate_figures(r);
    py::dict out;
    out["param_names"] = r.param_names;
    out["rows"] = rows;
    out["archive"] = archive;
    out["total_orbits"] = r.total_orbits();
    out["total_points"] = r.total_points();
    out["failures"] = r.failures.size();
    out["census_csv"] = t.census;
    out["bifurcation_csv"] = t.bifurcation;
    return out;
}

std::string curve_json(int p, double kappa1, double kappa2, std::vector<double> seed, int K, int N, double R) {
    py::gil_scoped_release release;
    NodeSolveOptions opts;
    opts.N = N;
    const ExtendedCandidate c = node_solve(p, {kappa1, kappa2}, K, to_vector(seed), opts);
    return to_json(certify_curve(c, R)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rigorous certificates for periodic orbits of one-dimensional maps";

    py::class_<Interval>(m, "Interval")
        .def(py::init<>())
        .def(py::init<double>())
        .def(py::init<double, double>())
        .def_static("from_decimal", &Interval::from_decimal)
        .def_property_readonly("lo", &Interval::lo)
        .def_property_readonly("hi", &Interval::hi)
        .def("mid", &Interval::mid)
        .def("width", &Interval::width)
        .def("mag", &Interval::mag)
        .def("contains", [](const Interval& a, double x) { return a.contains(x); })
        .def("__add__", [](const Interval& a, const Interval& b) { return a + b; })
        .def("__sub__", [](const Interval& a, const Interval& b) { return a - b; })
        .def("__mul__", [](const Interval& a, const Interval& b) { return a * b; })
        .def("__truediv__", [](const Interval& a, const Interval& b) { return a / b; })
        .def("__neg__", [](const Interval& a) { return -a; })
        .def("exp", [](const Interval& a) { return exp(a); })
        .def("sqrt", [](const Interval& a) { return sqrt(a); })
        .def("__repr__", [](const Interval& a) {
            std::ostringstream s;
            s.precision(17);
            s << "Interval(" << a.lo() << ", " << a.hi() << ")";
            return s.str();
        });

    py::register_exception<IntervalError>(m, "IntervalError", PyExc_ValueError);
    py::register_exception<CurveError>(m, "CurveError", PyExc_RuntimeError);

    m.def("map_ids", &registered_map_ids);
    m.def("to_hex", &to_hex);
    m.def("parse_double", &parse_double);
    m.def("certify_json", &certify_json, py::arg("map"), py::arg("params"), py::arg("period"), py::arg("x"),
          py::arg("refine") = false, py::arg("R") = py::none());
    m.def("seed_json", &seed_json, py::arg("map"), py::arg("params"), py::arg("period"), py::arg("seed") = 0x5eed,
          py::arg("budget") = 256);
    m.def("sweep", &sweep, py::arg("map"), py::arg("grid"), py::arg("p_min") = 1, py::arg("p_max") = 4,
          py::arg("budget") = 256, py::arg("grid_points") = 1 << 15, py::arg("seed") = 0x5eed, py::arg("workers") = 0);
    m.def(
        "analytic_p1_seed",
        [](double kappa) {
            const Eigen::VectorXd w = analytic_p1_seed(kappa);
            return std::vector<double>(w.begin(), w.end());
        },
        py::arg("kappa"));
    m.def(
        "locate_doubling_points",
        [](int p, double kappa) {
            std::vector<std::vector<double>> out;
            for (const auto& w : locate_doubling_points(p, kappa)) {
                out.emplace_back(w.begin(), w.end());
            }
            return out;
        },
        py::arg("p"), py::arg("kappa"));
    m.def("curve_json", &curve_json, py::arg("p"), py::arg("kappa1"), py::arg("kappa2"), py::arg("seed"),
          py::arg("K") = 16, py::arg("N") = 10, py::arg("R") = kDefaultCurveR);
}
