#pragma once

#include "spinmarket/realized_volatility.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinmarket {

/// Raw sample moment mean(x^(2k)). Throws insufficient_data for an empty sample.
double sample_even_moment(std::span<const double> sr_values, int k);

/// Per-block sums and counts for a delete-one-block jackknife of a mean.
struct block_sums {
    std::vector<double> sum;
    std::vector<std::size_t> count;

    std::size_t blocks() const noexcept { return sum.size(); }
};

/// Splits values into contiguous blocks of block_size; a trailing partial block
/// is merged into the last complete block.
block_sums make_blocks(std::span<const double> values, std::size_t block_size);

/// Same, with explicit block ids (ids in [0, blocks)).
block_sums make_blocks(std::span<const double> values, std::span<const std::size_t> block_id,
                       std::size_t blocks);

/// Delete-one-block jackknife standard error of the mean. Needs >= 2 blocks.
double jackknife_error(const block_sums& blocks);
double jackknife_error(std::span<const double> day_values, std::size_t block_days);

struct moment_estimate {
    std::int64_t delta_t = 0;
    std::int64_t n_eff = 0;
    int k = 0;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_days_used = 0;
};

struct sr_diagnostics {
    std::int64_t delta_t = 0;
    double mean = 0.0;
    double mean_stderr = 0.0;
    std::size_t excluded = 0;
};

/// Moments for k in k_set at every column of the table. Blocks are calendar-day
/// blocks of block_days (day T in block min(T / block_days, blocks-1)), shared by all columns.
struct moment_grid {
    std::size_t block_days = 0;
    std::size_t total_days = 0;
    std::vector<int> k_set;
    std::vector<moment_estimate> estimates;   // column-major: [col][k]
    std::vector<sr_diagnostics> diagnostics;  // one per column
    // Per-column per-k block sums, for jackknifing derived quantities.
    std::vector<block_sums> block_data;

    const moment_estimate* find(std::int64_t delta_t, int k) const noexcept;
    std::vector<moment_estimate> for_k(int k) const;
};

moment_grid estimate_moments(const rv_table& table, std::span<const int> k_set, std::size_t block_days);

struct fit_range {
    std::int64_t lo = 1;
    std::int64_t hi = 2000;

    bool contains(std::int64_t delta_t) const noexcept { return delta_t >= lo && delta_t <= hi; }
};

struct fit_result {
    int k = 0;
    double C = 0.0;
    double C_err = 0.0;
    /// Delete-one-block jackknife of the whole fit; accounts for correlation across delta_t.
    std::optional<double> C_err_jackknife;
    double chi2 = 0.0;
    std::size_t dof = 0;
    fit_range range;
    std::size_t points = 0;
    bool weighted = true;
    std::vector<std::string> warnings;
};

/// Weighted least squares for y = C g_k(n_eff) with w = 1/std_error^2 over points in range:
/// C = sum(w y g) / sum(w g^2), C_err = (sum w g^2)^(-1/2). Falls back to an
/// unweighted fit (recorded in warnings) when no point has a positive std_error.
/// Throws insufficient_data with fewer than 2 points in range.
fit_result fit_moment_curve(std::span<const moment_estimate> points, int k, fit_range range);

/// Fit plus the block jackknife of C using the grid's per-block sums.
fit_result fit_moment_curve(const moment_grid& grid, int k, fit_range range);

struct table_row {
    std::string name;
    int k = 0;
    double theory = 0.0;
    std::optional<double> measured;
    std::optional<double> error;
};

/// Variance row from the delta_t = 1 estimate, then one row per k = 2..5 from fits.
/// A missing fit or variance gives a row with no measured value.
std::vector<table_row> moment_table(std::span<const fit_result> fits,
                                    const moment_estimate* variance_at_dt1);

} // namespace spinmarket
