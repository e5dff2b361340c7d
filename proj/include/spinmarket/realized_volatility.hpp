#pragma once

#include "spinmarket/price_series.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spinmarket {

/// Sum of squared integer spin-sum increments over the intervals of one day.
/// RV = sumsq / (4 N^2); keeping the integer form makes RV exact up to one division.
std::int64_t rv_day_sumsq(const day_view& day, std::int64_t delta_t);

/// RV_{T,dt} = sum_l ret_l^2 for one day.
double rv_day(const day_view& day, std::int64_t delta_t, std::int64_t N);

inline double rv_from_sumsq(std::int64_t sumsq, std::int64_t N) noexcept
{
    const double two_n = 2.0 * static_cast<double>(N);
    return static_cast<double>(sumsq) / (two_n * two_n);
}

/// R / sqrt(rv); empty when rv == 0. Throws internal_corruption for rv < 0.
std::optional<double> standardized_return(double R, double rv);

/// Same quantity from the integer numerators, R = D/(2N), RV = S/(4N^2) => SR = D/sqrt(S).
/// Exact for the degenerate single-interval case (S = D^2 gives +-1).
std::optional<double> standardized_return_exact(std::int64_t day_diff, std::int64_t sumsq);

/// Realized volatility and standardized returns on a (day x delta_t) grid.
struct rv_table {
    std::int32_t N = 0;
    std::vector<std::int64_t> delta_ts;
    std::vector<std::int64_t> n_eff;
    std::size_t days = 0;

    // Row-major [day][column].
    std::vector<std::int64_t> sumsq;
    std::vector<double> rv;
    std::vector<double> sr;
    std::vector<std::uint8_t> valid;

    std::size_t columns() const noexcept { return delta_ts.size(); }
    std::size_t at(std::size_t day, std::size_t col) const noexcept { return day * columns() + col; }
    std::optional<std::size_t> column_of(std::int64_t delta_t) const noexcept;

    /// Valid SR values of one column in day order, with their day indices.
    std::vector<double> valid_sr(std::size_t col, std::vector<std::size_t>* day_index = nullptr) const;
    std::size_t excluded(std::size_t col) const noexcept;
};

/// Throws invalid_configuration unless every delta_t is in [1, N] and the list is nonempty.
void validate_grid(std::span<const std::int64_t> delta_ts, std::int64_t N);

/// Streaming RV accumulator: consumes ticks one at a time and keeps, per delta_t,
/// only a countdown, the last boundary sum and the running integer sum of squares.
class rv_accumulator {
public:
    rv_accumulator(std::int32_t N, std::vector<std::int64_t> delta_ts, std::int32_t initial_sum);

    void push(std::int32_t spin_sum_after)
    {
        ++tick_in_day_;
        for (auto& s : slots_) {
            if (--s.countdown == 0 || tick_in_day_ == N_) {
                const std::int64_t d = spin_sum_after - s.last_sum;
                s.sumsq += d * d;
                s.last_sum = spin_sum_after;
                s.countdown = s.delta_t;
            }
        }
        if (tick_in_day_ == N_) {
            close_day(spin_sum_after);
        }
    }

    /// Throws insufficient_data naming the day when the stream stopped mid-day.
    void finish() const;

    std::size_t days() const noexcept { return returns_.days.size(); }
    const return_series& returns() const noexcept { return returns_; }
    rv_table table() const;

private:
    struct slot {
        std::int64_t delta_t;
        std::int64_t countdown;
        std::int32_t last_sum;
        std::int64_t sumsq;
    };

    void close_day(std::int32_t close_sum);

    std::int32_t N_;
    std::vector<std::int64_t> delta_ts_;
    std::vector<slot> slots_;
    std::int32_t open_sum_;
    std::int32_t tick_in_day_ = 0;
    std::vector<std::int64_t> sumsq_rows_;
    return_series returns_;
};

/// Single streaming pass over a buffered stream. Throws insufficient_data on a truncated final day.
rv_table rv_grid(const tick_stream& stream, std::span<const std::int64_t> delta_ts);

/// Reference path: per-day rv_day_sumsq over partition_day. Used to cross-check rv_grid.
rv_table rv_grid_buffered(const tick_stream& stream, std::span<const std::int64_t> delta_ts);

/// Fills rv, sr and valid from sumsq and the daily returns.
void finalize_table(rv_table& table, const return_series& returns);

/// CSV with header "day,delta_t,n_eff,rv,sr,valid_flag".
void write_rv_csv(std::ostream& out, const rv_table& table);
rv_table read_rv_csv(std::istream& in, std::int32_t N);

} // namespace spinmarket
