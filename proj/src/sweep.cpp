#include "periodica/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "periodica/serialize.hpp"

namespace periodica {

std::vector<double> ParamRange::values() const {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("parameter step must be positive");
    }
    std::vector<double> out;
    if (hi < lo) {
        return out;
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
    for (long i = 0; i <= n; ++i) {
        out.push_back(i == n && std::fabs(lo + static_cast<double>(i) * step - hi) <= step * 1e-6
                          ? hi
                          : lo + static_cast<double>(i) * step);
    }
    return out;
}

void SweepConfig::validate() const {
    const auto model = find_map_model(map_id);
    if (grid.size() != model->param_names().size()) {
        throw std::invalid_argument("sweep grid needs one range per parameter of '" + map_id + "'");
    }
    for (const auto& r : grid) {
        if (!(r.step > 0.0)) {
            throw std::invalid_argument("parameter step must be positive");
        }
    }
    if (p_min < 1 || p_max < p_min) {
        throw std::invalid_argument("period range must satisfy 1 <= p_min <= p_max");
    }
    if (budget <= 0) {
        throw std::invalid_argument("seeding budget must be positive");
    }
}

SweepConfig SweepConfig::logistic_default() {
    SweepConfig c;
    c.map_id = "logistic";
    c.grid = {{2.8, 4.0, 0.01}};
    c.p_max = 16;
    return c;
}

SweepConfig SweepConfig::predprey_default() {
    SweepConfig c;
    c.map_id = "predprey";
    c.grid = {{-20.0, -2.0, 0.25}, {-45.0, -5.0, 0.5}};
    c.p_max = 6;
    return c;
}

long SweepResult::total_orbits() const {
    long n = 0;
    for (const auto& r : rows) {
        n += r.total();
    }
    return n;
}

long SweepResult::total_points() const {
    long n = 0;
    for (const auto& r : rows) {
        n += static_cast<long>(r.total()) * r.period;
    }
    return n;
}

int resolve_workers(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("PERIODICA_WORKERS"); env != nullptr) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::uint64_t item_seed(std::uint64_t base, std::size_t cell, int period) {
    // splitmix64 finalizer over the item coordinates.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(cell) * 1024 + period + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

void tally(CensusRow& row, const Certificate& c) {
    switch (c.stability) {
    case Stability::stable:
        ++row.n_stable;
        break;
    case Stability::unstable:
        ++row.n_unstable;
        break;
    case Stability::inconclusive:
        ++row.n_inconclusive;
        break;
    }
}

void fill_max_period(std::vector<CensusRow>& rows) {
    std::map<std::vector<double>, int> best;
    for (const auto& r : rows) {
        int& b = best[r.params];
        if (r.total() > 0) {
            b = std::max(b, r.period);
        }
    }
    for (auto& r : rows) {
        r.max_period = best[r.params];
    }
}

std::vector<std::vector<double>> cartesian(const std::vector<ParamRange>& grid) {
    std::vector<std::vector<double>> cells{{}};
    for (const auto& r : grid) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : cells) {
            for (double v : r.values()) {
                auto c = prefix;
                c.push_back(v);
                next.push_back(std::move(c));
            }
        }
        cells = std::move(next);
    }
    return cells;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void append_params(std::ostringstream& out, const std::vector<double>& params) {
    for (double v : params) {
        out << fmt(v) << ',';
    }
}

}  // namespace

std::vector<Certificate> census_cell(const MapDef& m, int p, const SeedOptions& opts) {
    std::vector<Certificate> kept;
    for (const Candidate& c : seed_candidates(m, p, opts)) {
        Certificate cert = certify_orbit(c);
        if (!cert.counts_as_orbit()) {
            continue;
        }
        const bool seen =
            std::any_of(kept.begin(), kept.end(), [&](const Certificate& k) { return same_orbit(k, cert); });
        if (!seen) {
            kept.push_back(std::move(cert));
        }
    }
    return kept;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto model = find_map_model(cfg.map_id);
    SweepResult result;
    result.seed = cfg.seed;
    for (auto name : model->param_names()) {
        result.param_names.emplace_back(name);
    }
    const auto cells = cartesian(cfg.grid);
    const int n_periods = cfg.p_max - cfg.p_min + 1;
    const std::size_t n_items = cells.size() * static_cast<std::size_t>(n_periods);

    struct ItemOut {
        std::vector<Certificate> orbits;
        std::string error;
    };
    std::vector<ItemOut> outs(n_items);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n_items; i = next++) {
            const std::size_t cell = i / static_cast<std::size_t>(n_periods);
            const int p = cfg.p_min + static_cast<int>(i % static_cast<std::size_t>(n_periods));
            try {
                std::vector<Param> params;
                for (double v : cells[cell]) {
                    params.push_back(Param::exact(v));
                }
                SeedOptions opts;
                opts.strategy = cfg.strategy;
                opts.budget = cfg.budget;
                opts.grid_points = cfg.grid_points;
                opts.rng_seed = item_seed(cfg.seed, cell, p);
                outs[i].orbits = census_cell(MapDef(model, std::move(params)), p, opts);
            } catch (const std::exception& e) {
                outs[i].error = e.what();
            }
        }
    };
    const int workers = std::min<int>(resolve_workers(cfg.workers), static_cast<int>(std::max<std::size_t>(n_items, 1)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }

    // Items are already in (cell, period) order; the grid is lexicographic.
    for (std::size_t i = 0; i < n_items; ++i) {
        const std::size_t cell = i / static_cast<std::size_t>(n_periods);
        const int p = cfg.p_min + static_cast<int>(i % static_cast<std::size_t>(n_periods));
        CensusRow row{cells[cell], p};
        if (!outs[i].error.empty()) {
            result.failures.push_back({cells[cell], p, outs[i].error});
        }
        for (auto& c : outs[i].orbits) {
            tally(row, c);
            result.archive.push_back(std::move(c));
        }
        result.rows.push_back(std::move(row));
    }
    fill_max_period(result.rows);
    return result;
}

std::vector<CensusRow> recount(const std::vector<Certificate>& archive, std::vector<std::string>* problems) {
    std::map<std::pair<std::vector<double>, int>, std::vector<Certificate>> groups;
    for (const Certificate& stored : archive) {
        Certificate c = certify_orbit(stored.candidate, stored.R);
        const auto nominal = stored.candidate.map.nominal();
        std::vector<double> params(nominal.begin(), nominal.end());
        if (!c.counts_as_orbit()) {
            if (problems != nullptr) {
                problems->push_back("archived orbit no longer verifies: " + std::string(to_string(c.reason)));
            }
            continue;
        }
        if (c.stability != stored.stability && problems != nullptr) {
            problems->push_back("stability verdict changed on re-verification");
        }
        auto& kept = groups[{params, stored.candidate.period}];
        const bool seen = std::any_of(kept.begin(), kept.end(), [&](const Certificate& k) { return same_orbit(k, c); });
        if (seen) {
            if (problems != nullptr) {
                problems->push_back("archive holds a duplicate orbit");
            }
            continue;
        }
        kept.push_back(std::move(c));
    }
    std::vector<CensusRow> rows;
    for (const auto& [key, certs] : groups) {
        CensusRow row{key.first, key.second};
        for (const auto& c : certs) {
            tally(row, c);
        }
        rows.push_back(std::move(row));
    }
    fill_max_period(rows);
    return rows;
}

FigureTables aggregate_figures(const SweepResult& result) {
    std::string header;
    for (const auto& n : result.param_names) {
        header += n + ",";
    }
    std::ostringstream census;
    std::ostringstream bif;
    std::ostringstream counts;
    std::ostringstream heat;
    census << header << "period,n_stable,n_unstable,n_inconclusive\n";
    bif << header << "period,stability,coordinate\n";
    counts << header << "n_stable,n_unstable,n_inconclusive,n_orbits,n_points\n";
    const bool two_params = result.param_names.size() == 2;
    if (two_params) {
        heat << header << "max_period\n";
    }

    for (const auto& r : result.rows) {
        append_params(census, r.params);
        census << r.period << ',' << r.n_stable << ',' << r.n_unstable << ',' << r.n_inconclusive << '\n';
    }
    for (const auto& c : result.archive) {
        const auto nominal = c.candidate.map.nominal();
        for (double x : c.candidate.x_bar) {
            append_params(bif, {nominal.begin(), nominal.end()});
            bif << c.candidate.period << ',' << to_string(c.stability) << ',' << fmt(x) << '\n';
        }
    }
    for (std::size_t i = 0; i < result.rows.size();) {
        const auto& params = result.rows[i].params;
        int s = 0, u = 0, q = 0;
        long points = 0;
        int max_period = 0;
        for (; i < result.rows.size() && result.rows[i].params == params; ++i) {
            const auto& r = result.rows[i];
            s += r.n_stable;
            u += r.n_unstable;
            q += r.n_inconclusive;
            points += static_cast<long>(r.total()) * r.period;
            max_period = r.max_period;
        }
        append_params(counts, params);
        counts << s << ',' << u << ',' << q << ',' << (s + u + q) << ',' << points << '\n';
        if (two_params) {
            append_params(heat, params);
            heat << max_period << '\n';
        }
    }
    return {census.str(), bif.str(), counts.str(), two_params ? heat.str() : std::string()};
}

void write_sweep_outputs(const SweepResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        }
        f << text;
    };
    const FigureTables t = aggregate_figures(result);
    write("census.csv", t.census);
    write("bifurcation.csv", t.bifurcation);
    write("counts.csv", t.counts);
    if (!t.heatmap.empty()) {
        write("heatmap.csv", t.heatmap);
    }
    std::string archive;
    for (const auto& c : result.archive) {
        archive += to_json(c).dump() + "\n";
    }
    write("archive.jsonl", archive);
    std::string failures;
    for (const auto& f : result.failures) {
        for (double v : f.params) {
            failures += fmt(v) + " ";
        }
        failures += "p=" + std::to_string(f.period) + ": " + f.message + "\n";
    }
    write("failures.txt", failures);
    const json summary = {{"seed", result.seed},
                          {"total_orbits", result.total_orbits()},
                          {"total_points", result.total_points()},
                          {"note", "counts are certified lower bounds at this grid and budget"}};
    write("summary.json", summary.dump(2) + "\n");
}

}  // namespace periodica
