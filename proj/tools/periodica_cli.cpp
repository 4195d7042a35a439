// periodica: certify periodic orbits, run parameter sweeps and enclose
// period-doubling candidate curves.
//
//   periodica certify --map logistic --mu 3.2 --period 2 --x 0.51,0.79
//   periodica sweep --map logistic --mu 3.2:3.6:0.1 --pmax 4 --out census/
//   periodica curve --period 2 --kappa-lo -31 --kappa-hi -13 --out curves/
//   periodica recount --archive census/archive.jsonl
//   periodica selfcheck
//
// Exit status: 0 verified / success, 1 not verified, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "periodica/certify.hpp"
#include "periodica/pdcurve.hpp"
#include "periodica/serialize.hpp"
#include "periodica/sweep.hpp"
#include "periodica/zerofind.hpp"

using namespace periodica;

namespace {

constexpr int kExitUnverified = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, sep);) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double number(const std::string& text, const char* what) {
    try {
        return parse_double(text);
    } catch (const std::exception&) {
        throw UsageError(std::string("bad number for ") + what + ": '" + text + "'");
    }
}

// Config values are spliced in ahead of the command-line flags, so flags win
// (every option keeps its last value).
std::vector<std::string> config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file " + path);
    }
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const std::exception& e) {
        throw UsageError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!cfg.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    std::vector<std::string> args;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                args.push_back(flag);
            }
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            }
            args.insert(args.end(), {flag, joined});
        } else {
            args.insert(args.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
        }
    }
    return args;
}

struct MapFlags {
    std::string map = "logistic";
    std::string mu, beta, kappa;

    void add(CLI::App* app) {
        app->add_option("--map", map, "Map id (logistic, predprey)");
        app->add_option("--mu", mu, "Logistic parameter");
        app->add_option("--beta", beta, "Predator-prey beta");
        app->add_option("--kappa", kappa, "Predator-prey kappa");
    }

    const std::string& value_of(std::string_view name) const {
        if (name == "mu") {
            return mu;
        }
        if (name == "beta") {
            return beta;
        }
        if (name == "kappa") {
            return kappa;
        }
        throw UsageError("map parameter '" + std::string(name) + "' has no flag");
    }

    MapDef build() const {
        std::shared_ptr<const MapModel> model;
        try {
            model = find_map_model(map);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        std::vector<Param> params;
        for (auto name : model->param_names()) {
            const std::string& text = value_of(name);
            if (text.empty()) {
                throw UsageError("missing --" + std::string(name) + " for map " + map);
            }
            try {
                params.push_back(Param::parse(text));
            } catch (const std::exception&) {
                throw UsageError("bad value for --" + std::string(name) + ": '" + text + "'");
            }
        }
        return MapDef(model, std::move(params));
    }
};

unsigned parse_strategy(const std::string& s) {
    unsigned bits = 0;
    for (const auto& part : split(s, ',')) {
        if (part == "iteration") {
            bits |= kSeedIteration;
        } else if (part == "random") {
            bits |= kSeedRandom;
        } else if (part == "grid") {
            bits |= kSeedGrid;
        } else if (part == "all") {
            bits |= kSeedAll;
        } else {
            throw UsageError("unknown seeding strategy '" + part + "'");
        }
    }
    if (bits == 0) {
        throw UsageError("empty seeding strategy");
    }
    return bits;
}

void emit(const json& j, const std::string& out_file) {
    const std::string text = j.dump(2) + "\n";
    if (out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_file, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + out_file);
    }
    f << text;
}

json with_warnings(json j, const MapDef& m) {
    json w = json::array();
    for (const auto& s : m.warnings()) {
        w.push_back(s);
    }
    j["warnings"] = w;
    return j;
}

// ---------------------------------------------------------------------------

struct CertifyCmd {
    MapFlags map;
    int period = 0;
    std::string x;
    bool refine = false;
    std::uint64_t seed = 0x5eed;
    int budget = 256;
    std::string strategy = "all";
    std::string R;
    std::string out;

    void add(CLI::App* app) {
        map.add(app);
        app->add_option("--period,-p", period, "Orbit period")->required();
        app->add_option("--x", x, "Candidate orbit, comma separated; omitted: seed automatically");
        app->add_flag("--refine", refine, "Newton-refine the given candidate first");
        app->add_option("--seed", seed, "PRNG seed for random starts");
        app->add_option("--budget", budget, "Seeding starts per strategy");
        app->add_option("--strategy", strategy, "Seeding strategies: iteration,random,grid or all");
        app->add_option("--R", R, "A priori radius (default unbounded)");
        app->add_option("--out,-o", out, "Write JSON here instead of stdout");
    }

    int run() const {
        if (period < 1) {
            throw UsageError("--period must be positive");
        }
        const MapDef m = map.build();
        const AprioriRadius radius = R.empty() ? AprioriRadius::unbounded() : AprioriRadius::finite(number(R, "--R"));
        if (!x.empty()) {
            const auto parts = split(x, ',');
            if (static_cast<int>(parts.size()) != period) {
                throw UsageError("--x needs exactly --period values");
            }
            Eigen::VectorXd xv(period);
            for (int k = 0; k < period; ++k) {
                xv[k] = number(parts[static_cast<std::size_t>(k)], "--x");
            }
            Candidate c(m, period, xv);
            if (refine) {
                c = newton_refine(std::move(c));
            } else {
                try {
                    c.A = approx_inverse(build_DF(m, c.x_bar));
                } catch (const SingularMatrix&) {
                    c.status = NewtonStatus::singular;
                }
            }
            const Certificate cert = certify_orbit(c, radius);
            emit(with_warnings(to_json(cert), m), out);
            return cert.verified ? 0 : kExitUnverified;
        }
        SeedOptions opts;
        opts.rng_seed = seed;
        opts.budget = budget;
        opts.strategy = parse_strategy(strategy);
        json list = json::array();
        bool any = false;
        for (const Certificate& cert : census_cell(m, period, opts)) {
            list.push_back(to_json(cert));
            any = true;
        }
        emit(with_warnings({{"seed", seed}, {"certificates", list}}, m), out);
        return any ? 0 : kExitUnverified;
    }
};

// ---------------------------------------------------------------------------

struct SweepCmd {
    std::string map = "logistic";
    std::string mu, beta, kappa;
    int p_min = 0, p_max = 0;
    int budget = 0;
    int grid_points = 0;
    std::string strategy;
    std::uint64_t seed = 0x5eed;
    int workers = 0;
    std::string out;

    void add(CLI::App* app) {
        app->add_option("--map", map, "Map id");
        app->add_option("--mu", mu, "Range lo:hi:step or a single value");
        app->add_option("--beta", beta, "Range lo:hi:step or a single value");
        app->add_option("--kappa", kappa, "Range lo:hi:step or a single value");
        app->add_option("--pmin", p_min, "Smallest period");
        app->add_option("--pmax", p_max, "Largest period");
        app->add_option("--budget", budget, "Seeding starts per cell, period and strategy");
        app->add_option("--grid-points", grid_points, "Sign-change scan resolution");
        app->add_option("--strategy", strategy, "Seeding strategies: iteration,random,grid or all");
        app->add_option("--seed", seed, "PRNG seed");
        app->add_option("--workers", workers, "Worker threads (default PERIODICA_WORKERS or all cores)");
        app->add_option("--out,-o", out, "Output directory for CSV tables and the archive");
    }

    static ParamRange range(const std::string& text, const char* what) {
        const auto parts = split(text, ':');
        if (parts.size() == 1) {
            const double v = number(parts[0], what);
            return {v, v, 1.0};
        }
        if (parts.size() != 3) {
            throw UsageError(std::string(what) + " must be lo:hi:step or a single value");
        }
        const ParamRange r{number(parts[0], what), number(parts[1], what), number(parts[2], what)};
        if (!(r.step > 0.0)) {
            throw UsageError(std::string(what) + " step must be positive");
        }
        return r;
    }

    int run() const {
        SweepConfig cfg;
        if (map == "logistic") {
            cfg = SweepConfig::logistic_default();
            if (!mu.empty()) {
                cfg.grid[0] = range(mu, "--mu");
            }
        } else if (map == "predprey") {
            cfg = SweepConfig::predprey_default();
            if (!beta.empty()) {
                cfg.grid[0] = range(beta, "--beta");
            }
            if (!kappa.empty()) {
                cfg.grid[1] = range(kappa, "--kappa");
            }
        } else {
            throw UsageError("sweep supports logistic and predprey");
        }
        if (p_min > 0) {
            cfg.p_min = p_min;
        }
        if (p_max > 0) {
            cfg.p_max = p_max;
        }
        if (budget > 0) {
            cfg.budget = budget;
        }
        if (grid_points > 0) {
            cfg.grid_points = grid_points;
        }
        if (!strategy.empty()) {
            cfg.strategy = parse_strategy(strategy);
        }
        cfg.seed = seed;
        cfg.workers = workers;
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const SweepResult r = run_sweep(cfg);
        if (!out.empty()) {
            write_sweep_outputs(r, out);
        }
        json summary = {{"map", map},
                        {"seed", r.seed},
                        {"cells_x_periods", r.rows.size()},
                        {"total_orbits", r.total_orbits()},
                        {"total_points", r.total_points()},
                        {"failures", r.failures.size()}};
        std::cout << summary.dump(2) << "\n";
        if (out.empty()) {
            std::cout << aggregate_figures(r).census;
        }
        return 0;
    }
};

// ---------------------------------------------------------------------------

struct CurveCmd {
    int period = 2;
    std::string kappa_lo = "-31", kappa_hi = "-13", width = "3";
    std::string seed_kappa;
    int branch = -1;
    int K = 16, N = 10;
    std::string R;
    std::string min_width;
    bool no_adaptive = false;
    int samples = 33;
    std::string out;

    void add(CLI::App* app) {
        app->add_option("--period,-p", period, "1 or 2");
        app->add_option("--kappa-lo", kappa_lo, "Left end of the kappa range");
        app->add_option("--kappa-hi", kappa_hi, "Right end of the kappa range");
        app->add_option("--width", width, "Window width");
        app->add_option("--seed-kappa", seed_kappa, "Where doubling points are located (default kappa-lo)");
        app->add_option("--branch", branch, "Index of the located branch to follow (default all)");
        app->add_option("--K", K, "Chebyshev interpolation order");
        app->add_option("--N", N, "Taylor order");
        app->add_option("--R", R, "A priori radius");
        app->add_option("--min-width", min_width, "Smallest window after adaptive halving");
        app->add_flag("--no-adaptive", no_adaptive, "Do not split failing windows");
        app->add_option("--samples", samples, "CSV samples per window");
        app->add_option("--out,-o", out, "Output directory");
    }

    int run() const {
        if (period < 1 || period > kMaxCurvePeriod) {
            throw UsageError("--period must be 1 or 2");
        }
        const double lo = number(kappa_lo, "--kappa-lo");
        const double hi = number(kappa_hi, "--kappa-hi");
        const double w = number(width, "--width");
        if (!(lo < hi) || !(w > 0.0) || !(hi < 0.0)) {
            throw UsageError("need kappa-lo < kappa-hi < 0 and width > 0");
        }
        if (samples < 2 || K < 0 || N < 1 || N + 1 > kMaxSigmoidOrder) {
            throw UsageError("need samples >= 2, K >= 0 and 1 <= N <= 11");
        }
        std::vector<KappaWindow> windows;
        for (double a = hi; a > lo;) {
            const double b = std::max(lo, a - w);
            windows.push_back({b, a});
            a = b;
        }
        BranchOptions bo;
        bo.K = K;
        bo.N = N;
        if (!R.empty()) {
            bo.R = number(R, "--R");
        }
        if (!min_width.empty()) {
            bo.min_width = number(min_width, "--min-width");
        }
        bo.adaptive = !no_adaptive;

        const double sk = seed_kappa.empty() ? lo : number(seed_kappa, "--seed-kappa");
        const std::vector<Eigen::VectorXd> seeds = locate_doubling_points(period, sk);
        if (branch >= static_cast<int>(seeds.size())) {
            throw UsageError("--branch out of range: " + std::to_string(seeds.size()) + " branches located");
        }
        json branches = json::array();
        bool all_chained = !seeds.empty();
        if (!out.empty()) {
            std::filesystem::create_directories(out);
        }
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (branch >= 0 && static_cast<std::size_t>(branch) != i) {
                continue;
            }
            const BranchResult br = certify_branch(period, windows, seeds[i], sk, bo);
            json pieces = json::array();
            json patches = json::array();
            json failures = json::array();
            for (const auto& c : br.pieces) {
                pieces.push_back(to_json(c));
            }
            for (const auto& p : br.patches) {
                patches.push_back(to_json(p));
            }
            for (const auto& [win, msg] : br.failures) {
                failures.push_back({{"window", {hex_json(win.kappa1), hex_json(win.kappa2)}}, {"message", msg}});
            }
            json seed_w = json::array();
            for (double v : seeds[i]) {
                seed_w.push_back(hex_json(v));
            }
            const KappaWindow cov = br.coverage();
            branches.push_back({{"index", i},
                                {"seed_kappa", hex_json(sk)},
                                {"seed_w", seed_w},
                                {"chained", br.chained()},
                                {"coverage", br.chained() ? json::array({cov.kappa1, cov.kappa2}) : json()},
                                {"pieces", pieces},
                                {"patches", patches},
                                {"failures", failures}});
            all_chained = all_chained && br.chained() && cov.kappa1 <= lo && cov.kappa2 >= hi;
            if (!out.empty()) {
                std::ofstream csv(std::filesystem::path(out) / ("branch" + std::to_string(i) + ".csv"));
                csv << curve_samples_csv(br.pieces, samples);
            }
        }
        const json result = {{"label", "period-doubling candidate"},
                             {"period", period},
                             {"kappa_range", {lo, hi}},
                             {"K", K},
                             {"N", N},
                             {"branches", branches}};
        emit(result, out.empty() ? std::string() : (std::filesystem::path(out) / "curves.json").string());
        if (!out.empty()) {
            std::cout << "branches: " << branches.size() << ", all chained: " << (all_chained ? "yes" : "no") << "\n";
        }
        return all_chained ? 0 : kExitUnverified;
    }
};

// ---------------------------------------------------------------------------

struct RecountCmd {
    std::string archive;

    void add(CLI::App* app) { app->add_option("--archive", archive, "archive.jsonl from a sweep")->required(); }

    int run() const {
        std::ifstream in(archive);
        if (!in) {
            throw UsageError("cannot read " + archive);
        }
        std::vector<Certificate> certs;
        std::vector<std::string> names;
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) {
                continue;
            }
            const json j = json::parse(line);
            Certificate c = certificate_from_json(j);
            if (names.empty()) {
                for (auto n : c.candidate.map.model().param_names()) {
                    names.emplace_back(n);
                }
            }
            certs.push_back(std::move(c));
        }
        std::vector<std::string> problems;
        const auto rows = recount(certs, &problems);
        SweepResult r;
        r.param_names = names;
        r.rows = rows;
        std::cout << aggregate_figures(r).census;
        for (const auto& p : problems) {
            std::cerr << "recount: " << p << "\n";
        }
        return problems.empty() ? 0 : kExitUnverified;
    }
};

// ---------------------------------------------------------------------------

struct SelfcheckCmd {
    int run() const {
        const MapDef m = MapDef::logistic(Param::parse("3.2"));
        Eigen::VectorXd x(2);
        x << 0.51, 0.79;
        Candidate c(m, 2, x);
        c.A = approx_inverse(build_DF(m, x));
        const Certificate cert = certify_orbit(c);
        const double r6 = std::ldexp(1.0, -6);

        Eigen::VectorXd xr(2);
        xr << 0.513044509531044, 0.7994554904683129;
        Candidate cr(m, 2, xr);
        cr.A = approx_inverse(build_DF(m, xr));
        const Certificate refined = certify_orbit(cr);

        struct Line {
            std::string name;
            std::string computed;
            std::string reference;
            bool ok;
        };
        auto iv = [](const Interval& v) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "[%.9g, %.9g]", v.lo(), v.hi());
            return std::string(buf);
        };
        auto num = [](double v) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            return std::string(buf);
        };
        const double tol = 1e-6;
        const Interval lam = cert.eigenvalue;
        const std::vector<Line> lines{
            {"Y", iv(cert.bounds.Y), "[0.012775, 0.0127751]",
             cert.bounds.Y.hi() <= 0.0127751 * (1 + tol) && cert.bounds.Y.hi() >= 0.012775 * (1 - tol)},
            {"Z1", iv(cert.bounds.Z1), "[0, 6.66134e-16]", cert.bounds.Z1.hi() <= 6.66134e-16 * (1 + tol)},
            {"Z2", iv(cert.bounds.Z2), "[20.7422, 20.7423]",
             cert.bounds.Z2.lo() >= 20.7422 * (1 - tol) && cert.bounds.Z2.hi() <= 20.7423 * (1 + tol)},
            {"r = 2^-6 admissible", radius_admissible(cert.bounds, r6, AprioriRadius::unbounded()) ? "yes" : "no",
             "yes", radius_admissible(cert.bounds, r6, AprioriRadius::unbounded())},
            {"r_minus", iv(cert.radius.r_minus), "<= 0.015625", cert.radius.r_minus.hi() <= r6},
            {"lambda", iv(lam), "[-0.0644712, 0.314457]",
             lam.lo() >= -0.0644712 - tol * 0.0644712 && lam.hi() <= 0.314457 * (1 + tol)},
            {"stability", std::string(to_string(cert.stability)), "stable", cert.stability == Stability::stable},
            {"distinct", cert.distinct ? "yes" : "no", "yes", cert.distinct},
            {"refined r_star", num(refined.r_star()), "order 1e-12", refined.verified && refined.r_star() <= 1e-11},
        };
        bool all = true;
        std::printf("%-22s %-36s %-24s %s\n", "quantity", "computed", "reference", "ok");
        for (const auto& l : lines) {
            std::printf("%-22s %-36s %-24s %s\n", l.name.c_str(), l.computed.c_str(), l.reference.c_str(),
                        l.ok ? "yes" : "NO");
            all = all && l.ok;
        }
        return all ? 0 : kExitUnverified;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigorous certificates for periodic orbits and period-doubling candidate curves"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config;

    CertifyCmd certify;
    SweepCmd sweep;
    CurveCmd curve;
    RecountCmd recount_cmd;
    SelfcheckCmd selfcheck;
    auto* c1 = app.add_subcommand("certify", "Certify one candidate orbit or all seeded orbits");
    auto* c2 = app.add_subcommand("sweep", "Census over a parameter grid");
    auto* c3 = app.add_subcommand("curve", "Certify period-doubling candidate curves of the predator-prey map");
    auto* c4 = app.add_subcommand("recount", "Re-verify an archive and rebuild the census");
    auto* c5 = app.add_subcommand("selfcheck", "Reproduce the logistic period-2 walkthrough");
    certify.add(c1);
    sweep.add(c2);
    curve.add(c3);
    recount_cmd.add(c4);
    for (auto* sub : {c1, c2, c3, c4}) {
        sub->add_option("--config", config, "JSON file with flag values (flags take precedence)");
    }

    // Splice config values right after the subcommand name.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                const auto extra = config_args(args[i + 1]);
                std::size_t at = 0;
                while (at < args.size() && args[at].rfind("-", 0) == 0) {
                    ++at;
                }
                args.insert(args.begin() + static_cast<long>(std::min(at + 1, args.size())), extra.begin(),
                            extra.end());
                break;
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*c1) {
            return certify.run();
        }
        if (*c2) {
            return sweep.run();
        }
        if (*c3) {
            return curve.run();
        }
        if (*c4) {
            return recount_cmd.run();
        }
        return selfcheck.run();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnverified;
    }
}
