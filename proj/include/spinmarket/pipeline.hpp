#pragma once

#include "spinmarket/config.hpp"
#include "spinmarket/finite_sample.hpp"
#include "spinmarket/moments.hpp"
#include "spinmarket/realized_volatility.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace spinmarket {

inline constexpr const char* software_version = "1.0.0";
inline constexpr const char* output_dir_env = "SPINMARKET_OUTPUT_DIR";

/// Run metadata. Wall-clock timings are kept out of it (see timings.json) so
/// that every manifest byte is a function of (config, seed, rng, version).
struct run_manifest {
    run_config config;
    std::string status = "incomplete";
    std::map<std::int64_t, std::size_t> zero_rv_excluded;
    std::map<std::string, std::string> digests;
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const;
    static run_manifest from_json(const nlohmann::json& j);
};

struct simulation_output {
    rv_table table;
    return_series returns;
    std::int32_t final_spin_sum = 0;
    double seconds = 0.0;
};

using progress_fn = std::function<void(std::int64_t sweeps_done, std::int64_t sweeps_total)>;

/// Ordered/random start, thermalization sweeps discarded, measurement sweeps
/// streamed through an rv_accumulator. If tick_out is given, every measured
/// tick is also passed to it.
simulation_output simulate(const run_config& config, const progress_fn& progress = {},
                           const std::function<void(std::int32_t)>& tick_out = {});

struct analysis_output {
    moment_grid moments;
    std::vector<fit_result> fits;
    std::optional<moment_estimate> variance_dt1;
    std::vector<table_row> table;
    std::vector<std::string> warnings;
};

/// Moments for k = 1..5 on every column, fits for k = 2..5, variance at delta_t = 1.
analysis_output analyze(const rv_table& table, const run_config& config);

/// {config, manifest, variance_dt1, fits, table}.
nlohmann::ordered_json summary_json(const analysis_output& analysis, const run_manifest& manifest);

/// simulate stage: writes returns.csv, rv.csv, manifest.json, timings.json (and ticks.bin when enabled).
run_manifest run_simulate(const run_config& config, const progress_fn& progress = {});

/// analyze stage from persisted files in dir: writes moments.csv, fit_curve.csv,
/// summary.json and updates manifest.json.
analysis_output run_analyze(const std::filesystem::path& dir);

/// Analysis outputs for an in-memory table; used by run_analyze and the oracle.
void write_analysis(const std::filesystem::path& dir, const analysis_output& analysis,
                    run_manifest& manifest);

/// Table-1 style comparison text from summary.json.
std::string format_report(const nlohmann::json& summary);

/// Theory curves: theory.csv (n,k,moment) and density.csv (n,x,density).
void emit_theory(const std::filesystem::path& dir, std::span<const std::int64_t> n_grid,
                 std::span<const int> k_set, int density_points = 201);

/// Synthetic-Gaussian table in the rv_table layout: one column per n in n_grid
/// (delta_t and n_eff both set to n, N = 0), each column drawn independently.
rv_table synthetic_table(std::span<const std::int64_t> n_grid, std::size_t days, double sigma,
                         std::uint64_t seed);

/// Sample moment vs closed form for one synthetic column.
struct oracle_check {
    std::int64_t n = 0;
    int k = 0;
    double moment = 0.0;
    double std_error = 0.0;
    double theory = 0.0;
    double z = 0.0;
};

/// One check per (column, k) of a moment grid built from synthetic_table.
std::vector<oracle_check> oracle_checks(const moment_grid& grid);

nlohmann::ordered_json oracle_json(std::span<const oracle_check> checks, std::size_t days, double sigma,
                                   std::uint64_t seed, std::size_t block_days);

std::string sha256_file(const std::filesystem::path& file);

/// Writes text to dir/name and records its digest in the manifest.
void write_tracked(const std::filesystem::path& dir, const std::string& name,
                   const std::string& content, run_manifest& manifest);

} // namespace spinmarket
