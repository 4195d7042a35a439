#pragma once

// Grid censuses over map parameters: seed, refine, certify and deduplicate
// periodic orbits per (cell, period), then aggregate into CSV tables.

#include <cstdint>
#include <string>
#include <vector>

#include "periodica/certify.hpp"
#include "periodica/maps.hpp"
#include "periodica/zerofind.hpp"

namespace periodica {

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    /// lo, lo + step, ... up to hi (inclusive within step/1e6); empty when hi < lo.
    std::vector<double> values() const;
};

struct SweepConfig {
    std::string map_id = "logistic";
    /// One range per map parameter, in the model's parameter order.
    std::vector<ParamRange> grid;
    int p_min = 1;
    int p_max = 8;
    /// Starts per cell and period for the iteration and random strategies.
    int budget = 256;
    int grid_points = 1 << 15;
    unsigned strategy = kSeedAll;
    std::uint64_t seed = 0x5eed;
    /// 0 selects PERIODICA_WORKERS, then the hardware concurrency.
    int workers = 0;
    /// Written by write_sweep_outputs when non-empty.
    std::string out_dir;

    void validate() const;

    static SweepConfig logistic_default();
    static SweepConfig predprey_default();
};

struct CensusRow {
    std::vector<double> params;
    int period = 1;
    int n_stable = 0;
    int n_unstable = 0;
    int n_inconclusive = 0;
    /// Largest period with at least one counted orbit at this parameter point.
    int max_period = 0;

    int total() const { return n_stable + n_unstable + n_inconclusive; }
    bool operator==(const CensusRow&) const = default;
};

struct CellFailure {
    std::vector<double> params;
    int period = 1;
    std::string message;
};

struct SweepResult {
    std::vector<std::string> param_names;
    /// Sorted by (params, period); one row per cell and period.
    std::vector<CensusRow> rows;
    /// Counted orbits in row order, each verified and distinct.
    std::vector<Certificate> archive;
    std::vector<CellFailure> failures;
    std::uint64_t seed = 0;

    /// Orbit-parameter pairs summed over the grid.
    long total_orbits() const;
    /// Periodic points, i.e. orbits weighted by their period.
    long total_points() const;
};

int resolve_workers(int requested);

/// Seeds for a work item depend only on the config seed, the cell index and
/// the period, so results do not depend on scheduling.
std::uint64_t item_seed(std::uint64_t base, std::size_t cell, int period);

/// Certified, distinct orbits of one map at one period, deduplicated.
std::vector<Certificate> census_cell(const MapDef& m, int p, const SeedOptions& opts);

SweepResult run_sweep(const SweepConfig& cfg);

/// Rows rebuilt from archived certificates after re-certifying each one.
/// Rows with zero orbits are not recoverable from an archive and are omitted.
std::vector<CensusRow> recount(const std::vector<Certificate>& archive, std::vector<std::string>* problems = nullptr);

struct FigureTables {
    std::string census;
    std::string bifurcation;
    std::string counts;
    /// Only for two-parameter maps; empty otherwise.
    std::string heatmap;
};

FigureTables aggregate_figures(const SweepResult& result);

/// census.csv, bifurcation.csv, counts.csv, heatmap.csv (two-parameter maps),
/// archive.jsonl and failures.txt.
void write_sweep_outputs(const SweepResult& result, const std::string& dir);

}  // namespace periodica
