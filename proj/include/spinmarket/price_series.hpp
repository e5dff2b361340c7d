#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace spinmarket {

/// ln p = ln p* + lambda * spin_sum / N.
inline double log_price(std::int64_t spin_sum, std::int64_t N, double lambda,
                        double log_fundamental = 0.0) noexcept
{
    return log_fundamental + lambda * static_cast<double>(spin_sum) / static_cast<double>(N);
}

/// R(T) = (M(T+1) - M(T)) / 2 = (close - open) / (2N).
inline double daily_return(std::int64_t open_sum, std::int64_t close_sum, std::int64_t N) noexcept
{
    return static_cast<double>(close_sum - open_sum) / (2.0 * static_cast<double>(N));
}

/// Return between two tick spin sums, (b - a) / (2N).
inline double intraday_return(std::int64_t sum_a, std::int64_t sum_b, std::int64_t N) noexcept
{
    return static_cast<double>(sum_b - sum_a) / (2.0 * static_cast<double>(N));
}

/// Number of intraday returns for a day of N ticks sampled every delta_t ticks.
inline std::int64_t intervals_per_day(std::int64_t N, std::int64_t delta_t) noexcept
{
    return (N + delta_t - 1) / delta_t;
}

/// One day of the tick stream: the opening spin sum and the N post-update sums.
struct day_view {
    std::int64_t index = 0;
    std::int32_t open_sum = 0;
    std::span<const std::int32_t> ticks;

    std::int32_t close_sum() const noexcept { return ticks.empty() ? open_sum : ticks.back(); }
};

/// Interval boundary sums for one day at sampling interval delta_t: open_sum,
/// then the sums after ticks delta_t, 2 delta_t, ..., and finally after tick N
/// (a shorter last interval closes the day when delta_t does not divide N).
/// Throws invalid_configuration unless 1 <= delta_t <= N.
std::vector<std::int32_t> partition_day(const day_view& day, std::int64_t delta_t);

/// Per-update spin sums of a contiguous run, split into days of N updates.
struct tick_stream {
    std::int32_t N = 0;
    std::int32_t initial_sum = 0;
    std::vector<std::int32_t> ticks;

    std::size_t complete_days() const noexcept { return N > 0 ? ticks.size() / static_cast<std::size_t>(N) : 0; }
    day_view day(std::size_t T) const;
};

struct day_record {
    std::int64_t day = 0;
    std::int32_t open_sum = 0;
    std::int32_t close_sum = 0;
};

/// Daily returns with the spin sums they were built from.
struct return_series {
    std::int32_t N = 0;
    std::vector<day_record> days;

    double at(std::size_t T) const noexcept { return daily_return(days[T].open_sum, days[T].close_sum, N); }
    std::size_t size() const noexcept { return days.size(); }
};

return_series daily_returns(const tick_stream& stream);

/// CSV with header "day,open_sum,close_sum,return".
void write_returns_csv(std::ostream& out, const return_series& returns);
return_series read_returns_csv(std::istream& in, std::int32_t N);

} // namespace spinmarket
