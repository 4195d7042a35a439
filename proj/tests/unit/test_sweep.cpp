#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "periodica/serialize.hpp"
#include "periodica/sweep.hpp"

using namespace periodica;

namespace {

SweepConfig small_logistic() {
    SweepConfig cfg;
    cfg.map_id = "logistic";
    cfg.grid = {{3.2, 3.5, 0.3}};
    cfg.p_max = 4;
    cfg.budget = 64;
    cfg.grid_points = 1 << 12;
    cfg.workers = 1;
    return cfg;
}

const CensusRow& row_at(const SweepResult& r, double param, int p) {
    for (const auto& row : r.rows) {
        if (std::fabs(row.params[0] - param) < 1e-12 && row.period == p) {
            return row;
        }
    }
    throw std::runtime_error("row not found");
}

}  // namespace

TEST_CASE("parameter ranges") {
    CHECK(ParamRange{2.8, 4.0, 0.01}.values().size() == 121);
    CHECK(ParamRange{2.8, 4.0, 0.01}.values().back() == 4.0);
    CHECK(ParamRange{1.0, 0.0, 0.1}.values().empty());
    CHECK(ParamRange{1.0, 1.0, 0.1}.values().size() == 1);
    CHECK_THROWS(ParamRange{0.0, 1.0, 0.0}.values());
}

TEST_CASE("config validation") {
    SweepConfig cfg = small_logistic();
    cfg.p_min = 3;
    cfg.p_max = 2;
    CHECK_THROWS(cfg.validate());
    cfg = small_logistic();
    cfg.grid.push_back({0, 1, 1});
    CHECK_THROWS(cfg.validate());
    cfg = small_logistic();
    cfg.map_id = "nope";
    CHECK_THROWS(cfg.validate());
    CHECK_NOTHROW(SweepConfig::logistic_default().validate());
    CHECK_NOTHROW(SweepConfig::predprey_default().validate());
}

TEST_CASE("logistic census") {
    const SweepResult r = run_sweep(small_logistic());
    CHECK(r.rows.size() == 8);
    CHECK(r.failures.empty());
    const CensusRow& fp = row_at(r, 3.2, 1);
    CHECK(fp.n_unstable == 2);
    CHECK(fp.n_stable == 0);
    CHECK(row_at(r, 3.2, 2).n_stable == 1);
    CHECK(row_at(r, 3.2, 4).total() == 0);
    CHECK(row_at(r, 3.2, 2).max_period == 2);
    CHECK(row_at(r, 3.5, 4).n_stable == 1);
    CHECK(row_at(r, 3.5, 2).n_unstable == 1);
    CHECK(row_at(r, 3.5, 1).max_period == 4);
    CHECK(r.total_orbits() == 3 + 4);
    CHECK(r.total_points() == (2 + 2) + (2 + 2 + 4));
    CHECK(r.archive.size() == 7);
    for (const auto& c : r.archive) {
        CHECK(c.counts_as_orbit());
    }
}

TEST_CASE("predator-prey cell") {
    SweepConfig cfg;
    cfg.map_id = "predprey";
    cfg.grid = {{-3.0, -3.0, 1.0}, {-8.0, -8.0, 1.0}};
    cfg.p_max = 2;
    cfg.budget = 64;
    cfg.workers = 2;
    const SweepResult r = run_sweep(cfg);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.param_names == std::vector<std::string>{"beta", "kappa"});
    CHECK(r.rows[0].total() >= 1);
    const FigureTables t = aggregate_figures(r);
    CHECK(t.heatmap.rfind("beta,kappa,max_period\n", 0) == 0);
}

TEST_CASE("empty grid") {
    SweepConfig cfg = small_logistic();
    cfg.grid = {{1.0, 0.0, 0.1}};
    const SweepResult r = run_sweep(cfg);
    CHECK(r.rows.empty());
    CHECK(r.total_orbits() == 0);
}

TEST_CASE("results do not depend on the worker count") {
    SweepConfig cfg = small_logistic();
    cfg.grid = {{3.2, 3.9, 0.1}};
    cfg.workers = 1;
    const SweepResult one = run_sweep(cfg);
    cfg.workers = 4;
    const SweepResult four = run_sweep(cfg);
    CHECK(one.rows == four.rows);
    REQUIRE(one.archive.size() == four.archive.size());
    for (std::size_t i = 0; i < one.archive.size(); ++i) {
        CHECK(one.archive[i].candidate.x_bar == four.archive[i].candidate.x_bar);
    }
    CHECK(aggregate_figures(one).census == aggregate_figures(four).census);
}

TEST_CASE("recount reproduces the nonzero rows") {
    const SweepResult r = run_sweep(small_logistic());
    std::vector<std::string> problems;
    const auto rows = recount(r.archive, &problems);
    CHECK(problems.empty());
    std::vector<CensusRow> nonzero;
    for (const auto& row : r.rows) {
        if (row.total() > 0) {
            nonzero.push_back(row);
        }
    }
    CHECK(rows == nonzero);
}

TEST_CASE("tables and files") {
    const SweepResult r = run_sweep(small_logistic());
    const FigureTables t = aggregate_figures(r);
    CHECK(t.census.rfind("mu,period,n_stable,n_unstable,n_inconclusive\n", 0) == 0);
    CHECK(t.bifurcation.rfind("mu,period,stability,coordinate\n", 0) == 0);
    CHECK(t.counts.rfind("mu,n_stable,n_unstable,n_inconclusive,n_orbits,n_points\n", 0) == 0);
    CHECK(t.heatmap.empty());
    const auto dir = std::filesystem::temp_directory_path() / "periodica_sweep_test";
    std::filesystem::remove_all(dir);
    write_sweep_outputs(r, dir.string());
    for (const char* name : {"census.csv", "bifurcation.csv", "counts.csv", "archive.jsonl", "failures.txt",
                             "summary.json"}) {
        CHECK(std::filesystem::exists(dir / name));
    }
    std::ifstream f(dir / "archive.jsonl");
    std::string line;
    std::vector<Certificate> back;
    while (std::getline(f, line)) {
        back.push_back(certificate_from_json(json::parse(line)));
    }
    CHECK(back.size() == r.archive.size());
    CHECK(recount(back) == recount(r.archive));
    std::filesystem::remove_all(dir);
}

TEST_CASE("item seeds") {
    CHECK(item_seed(1, 0, 1) != item_seed(1, 0, 2));
    CHECK(item_seed(1, 3, 1) == item_seed(1, 3, 1));
    CHECK(item_seed(1, 3, 1) != item_seed(2, 3, 1));
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
}
