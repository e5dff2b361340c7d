#include "spinmarket/price_series.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/text.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace spinmarket {

std::vector<std::int32_t> partition_day(const day_view& day, std::int64_t delta_t)
{
    const auto N = static_cast<std::int64_t>(day.ticks.size());
    if (delta_t < 1 || delta_t > N) {
        throw invalid_configuration("delta_t must be in [1, " + std::to_string(N) + "], got " +
                                    std::to_string(delta_t));
    }
    std::vector<std::int32_t> bounds;
    bounds.reserve(static_cast<std::size_t>(intervals_per_day(N, delta_t) + 1));
    bounds.push_back(day.open_sum);
    for (std::int64_t i = delta_t; i < N; i += delta_t) {
        bounds.push_back(day.ticks[static_cast<std::size_t>(i - 1)]);
    }
    bounds.push_back(day.ticks.back());
    return bounds;
}

day_view tick_stream::day(std::size_t T) const
{
    const auto n = static_cast<std::size_t>(N);
    if (T >= complete_days()) {
        throw invalid_configuration("day " + std::to_string(T) + " is not a complete day of the stream");
    }
    const std::int32_t open = T == 0 ? initial_sum : ticks[T * n - 1];
    return {static_cast<std::int64_t>(T), open, std::span<const std::int32_t>(ticks).subspan(T * n, n)};
}

return_series daily_returns(const tick_stream& stream)
{
    return_series out;
    out.N = stream.N;
    const std::size_t days = stream.complete_days();
    out.days.reserve(days);
    for (std::size_t T = 0; T < days; ++T) {
        const auto d = stream.day(T);
        out.days.push_back({d.index, d.open_sum, d.close_sum()});
    }
    return out;
}

void write_returns_csv(std::ostream& out, const return_series& returns)
{
    out << "day,open_sum,close_sum,return\n";
    for (std::size_t T = 0; T < returns.size(); ++T) {
        const auto& d = returns.days[T];
        out << d.day << ',' << d.open_sum << ',' << d.close_sum << ',' << format_double(returns.at(T)) << '\n';
    }
}

return_series read_returns_csv(std::istream& in, std::int32_t N)
{
    return_series out;
    out.N = N;
    std::string line;
    if (!std::getline(in, line) || line != "day,open_sum,close_sum,return") {
        throw io_error("returns csv: missing or unexpected header");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        day_record d;
        char c1 = 0, c2 = 0;
        if (!(row >> d.day >> c1 >> d.open_sum >> c2 >> d.close_sum) || c1 != ',' || c2 != ',') {
            throw io_error("returns csv: malformed line " + std::to_string(lineno));
        }
        if (d.day != static_cast<std::int64_t>(out.days.size())) {
            throw io_error("returns csv: day index out of sequence at line " + std::to_string(lineno));
        }
        if (!out.days.empty() && out.days.back().close_sum != d.open_sum) {
            throw io_error("returns csv: day " + std::to_string(d.day) + " does not open at the previous close");
        }
        out.days.push_back(d);
    }
    return out;
}

} // namespace spinmarket
