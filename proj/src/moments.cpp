#include "spinmarket/moments.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/finite_sample.hpp"

#include <cmath>
#include <string>

namespace spinmarket {

namespace {

double even_power(double x, int k) noexcept
{
    const double x2 = x * x;
    double p = x2;
    for (int j = 1; j < k; ++j) {
        p *= x2;
    }
    return p;
}

struct fit_core {
    double C = 0.0;
    double sum_wgg = 0.0;
};

// Weighted normal equation for the single linear parameter.
fit_core solve_weighted(std::span<const double> y, std::span<const double> g, std::span<const double> w)
{
    double sum_wyg = 0.0;
    double sum_wgg = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum_wyg += w[i] * y[i] * g[i];
        sum_wgg += w[i] * g[i] * g[i];
    }
    return {sum_wyg / sum_wgg, sum_wgg};
}

} // namespace

double sample_even_moment(std::span<const double> sr_values, int k)
{
    if (sr_values.empty()) {
        throw insufficient_data("sample_even_moment: empty sample");
    }
    if (k < 1) {
        throw unsupported_parameter("sample_even_moment: k must be >= 1");
    }
    double sum = 0.0;
    for (double x : sr_values) {
        sum += even_power(x, k);
    }
    return sum / static_cast<double>(sr_values.size());
}

block_sums make_blocks(std::span<const double> values, std::size_t block_size)
{
    if (block_size == 0) {
        throw invalid_configuration("jackknife block size must be >= 1");
    }
    const std::size_t nb = values.size() / block_size;
    if (nb < 2) {
        throw insufficient_data("jackknife needs at least 2 complete blocks of " + std::to_string(block_size) +
                                ", have " + std::to_string(values.size()) + " values");
    }
    block_sums b;
    b.sum.assign(nb, 0.0);
    b.count.assign(nb, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t id = std::min(i / block_size, nb - 1);
        b.sum[id] += values[i];
        ++b.count[id];
    }
    return b;
}

block_sums make_blocks(std::span<const double> values, std::span<const std::size_t> block_id, std::size_t blocks)
{
    if (blocks < 2) {
        throw insufficient_data("jackknife needs at least 2 blocks");
    }
    block_sums b;
    b.sum.assign(blocks, 0.0);
    b.count.assign(blocks, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        b.sum[block_id[i]] += values[i];
        ++b.count[block_id[i]];
    }
    return b;
}

double jackknife_error(const block_sums& blocks)
{
    const std::size_t nb = blocks.blocks();
    if (nb < 2) {
        throw insufficient_data("jackknife needs at least 2 blocks");
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < nb; ++b) {
        total += blocks.sum[b];
        count += blocks.count[b];
    }
    std::vector<double> partial(nb);
    double mean_partial = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t left = count - blocks.count[b];
        if (left == 0) {
            throw insufficient_data("jackknife: a single block holds every sample");
        }
        partial[b] = (total - blocks.sum[b]) / static_cast<double>(left);
        mean_partial += partial[b];
    }
    mean_partial /= static_cast<double>(nb);
    double ss = 0.0;
    for (double p : partial) {
        ss += (p - mean_partial) * (p - mean_partial);
    }
    return std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
}

double jackknife_error(std::span<const double> day_values, std::size_t block_days)
{
    return jackknife_error(make_blocks(day_values, block_days));
}

const moment_estimate* moment_grid::find(std::int64_t delta_t, int k) const noexcept
{
    for (const auto& e : estimates) {
        if (e.delta_t == delta_t && e.k == k) {
            return &e;
        }
    }
    return nullptr;
}

std::vector<moment_estimate> moment_grid::for_k(int k) const
{
    std::vector<moment_estimate> out;
    for (const auto& e : estimates) {
        if (e.k == k) {
            out.push_back(e);
        }
    }
    return out;
}

moment_grid estimate_moments(const rv_table& table, std::span<const int> k_set, std::size_t block_days)
{
    if (block_days == 0) {
        throw invalid_configuration("jackknife_block must be >= 1");
    }
    const std::size_t nb = table.days / block_days;
    if (nb < 2) {
        throw insufficient_data("moment estimation needs at least 2 jackknife blocks of " +
                                std::to_string(block_days) + " days, have " + std::to_string(table.days) +
                                " days");
    }
    moment_grid grid;
    grid.block_days = block_days;
    grid.total_days = table.days;
    grid.k_set.assign(k_set.begin(), k_set.end());

    std::vector<std::size_t> days;
    std::vector<std::size_t> ids;
    std::vector<double> powered;
    for (std::size_t c = 0; c < table.columns(); ++c) {
        const auto sr = table.valid_sr(c, &days);
        if (sr.empty()) {
            throw insufficient_data("no valid standardized returns at delta_t = " +
                                    std::to_string(table.delta_ts[c]));
        }
        ids.resize(days.size());
        for (std::size_t i = 0; i < days.size(); ++i) {
            ids[i] = std::min(days[i] / block_days, nb - 1);
        }

        const auto mean_blocks = make_blocks(sr, ids, nb);
        double mean = 0.0;
        for (double x : sr) {
            mean += x;
        }
        mean /= static_cast<double>(sr.size());
        grid.diagnostics.push_back({table.delta_ts[c], mean, jackknife_error(mean_blocks), table.excluded(c)});

        for (int k : k_set) {
            powered.resize(sr.size());
            for (std::size_t i = 0; i < sr.size(); ++i) {
                powered[i] = even_power(sr[i], k);
            }
            auto blocks = make_blocks(powered, ids, nb);
            moment_estimate e;
            e.delta_t = table.delta_ts[c];
            e.n_eff = table.n_eff[c];
            e.k = k;
            e.value = sample_even_moment(sr, k);
            e.std_error = jackknife_error(blocks);
            e.n_days_used = sr.size();
            grid.estimates.push_back(e);
            grid.block_data.push_back(std::move(blocks));
        }
    }
    return grid;
}

fit_result fit_moment_curve(std::span<const moment_estimate> points, int k, fit_range range)
{
    fit_result fit;
    fit.k = k;
    fit.range = range;

    std::vector<const moment_estimate*> used;
    for (const auto& p : points) {
        if (p.k == k && range.contains(p.delta_t)) {
            used.push_back(&p);
        }
    }
    if (used.size() < 2) {
        throw insufficient_data("fit for k = " + std::to_string(k) + " needs >= 2 points in delta_t range [" +
                                std::to_string(range.lo) + ", " + std::to_string(range.hi) + "], have " +
                                std::to_string(used.size()));
    }

    std::size_t positive = 0;
    for (const auto* p : used) {
        positive += (p->std_error > 0.0 && std::isfinite(p->std_error)) ? 1 : 0;
    }
    if (positive == 0) {
        fit.weighted = false;
        fit.warnings.push_back("k = " + std::to_string(k) + ": no point has a positive std_error; unweighted fit");
    } else if (positive < used.size()) {
        const std::size_t dropped = used.size() - positive;
        std::erase_if(used, [](const moment_estimate* p) { return !(p->std_error > 0.0 && std::isfinite(p->std_error)); });
        fit.warnings.push_back("k = " + std::to_string(k) + ": dropped " + std::to_string(dropped) +
                               " point(s) with zero std_error");
        if (used.size() < 2) {
            throw insufficient_data("fit for k = " + std::to_string(k) + " has < 2 points with positive std_error");
        }
    }

    std::vector<double> y, g, w;
    for (const auto* p : used) {
        y.push_back(p->value);
        g.push_back(moment_shape(p->n_eff, k));
        w.push_back(fit.weighted ? 1.0 / (p->std_error * p->std_error) : 1.0);
    }
    const auto core = solve_weighted(y, g, w);
    fit.C = core.C;
    fit.points = used.size();
    fit.dof = used.size() - 1;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fit.C * g[i];
        fit.chi2 += w[i] * r * r;
    }
    fit.C_err = 1.0 / std::sqrt(core.sum_wgg);
    if (!fit.weighted) {
        fit.C_err *= std::sqrt(fit.chi2 / static_cast<double>(fit.dof));
    }
    return fit;
}

fit_result fit_moment_curve(const moment_grid& grid, int k, fit_range range)
{
    auto fit = fit_moment_curve(grid.estimates, k, range);
    if (!fit.weighted) {
        return fit;
    }

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.estimates.size(); ++i) {
        const auto& e = grid.estimates[i];
        if (e.k == k && range.contains(e.delta_t) && e.std_error > 0.0 && std::isfinite(e.std_error)) {
            idx.push_back(i);
        }
    }
    const std::size_t nb = grid.block_data.at(idx.front()).blocks();
    std::vector<double> y(idx.size()), g(idx.size()), w(idx.size());
    std::vector<double> totals(idx.size());
    std::vector<std::size_t> counts(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto& e = grid.estimates[idx[j]];
        const auto& b = grid.block_data[idx[j]];
        g[j] = moment_shape(e.n_eff, k);
        w[j] = 1.0 / (e.std_error * e.std_error);
        for (std::size_t i = 0; i < nb; ++i) {
            totals[j] += b.sum[i];
            counts[j] += b.count[i];
        }
    }
    std::vector<double> partial(nb);
    double mean_partial = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const auto& b = grid.block_data[idx[j]];
            y[j] = (totals[j] - b.sum[i]) / static_cast<double>(counts[j] - b.count[i]);
        }
        partial[i] = solve_weighted(y, g, w).C;
        mean_partial += partial[i];
    }
    mean_partial /= static_cast<double>(nb);
    double ss = 0.0;
    for (double p : partial) {
        ss += (p - mean_partial) * (p - mean_partial);
    }
    fit.C_err_jackknife = std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
    return fit;
}

std::vector<table_row> moment_table(std::span<const fit_result> fits, const moment_estimate* variance_at_dt1)
{
    static const char* names[] = {"variance", "kurtosis", "6th", "8th", "10th"};
    std::vector<table_row> rows;
    table_row variance{names[0], 1, 1.0, std::nullopt, std::nullopt};
    if (variance_at_dt1) {
        variance.measured = variance_at_dt1->value;
        variance.error = variance_at_dt1->std_error;
    }
    rows.push_back(variance);
    for (int k = 2; k <= 5; ++k) {
        table_row row{names[k - 1], k, gaussian_even_moment(k), std::nullopt, std::nullopt};
        for (const auto& f : fits) {
            if (f.k == k) {
                row.measured = f.C;
                row.error = f.C_err;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace spinmarket
