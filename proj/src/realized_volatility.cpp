#include "spinmarket/realized_volatility.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/text.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace spinmarket {

std::int64_t rv_day_sumsq(const day_view& day, std::int64_t delta_t)
{
    const auto bounds = partition_day(day, delta_t);
    std::int64_t sumsq = 0;
    for (std::size_t l = 1; l < bounds.size(); ++l) {
        const std::int64_t d = bounds[l] - bounds[l - 1];
        sumsq += d * d;
    }
    return sumsq;
}

double rv_day(const day_view& day, std::int64_t delta_t, std::int64_t N)
{
    return rv_from_sumsq(rv_day_sumsq(day, delta_t), N);
}

std::optional<double> standardized_return(double R, double rv)
{
    if (rv < 0.0 || std::isnan(rv)) {
        throw internal_corruption("standardized_return: negative realized volatility");
    }
    if (rv == 0.0) {
        return std::nullopt;
    }
    return R / std::sqrt(rv);
}

std::optional<double> standardized_return_exact(std::int64_t day_diff, std::int64_t sumsq)
{
    if (sumsq < 0) {
        throw internal_corruption("standardized_return: negative sum of squares");
    }
    if (sumsq == 0) {
        return std::nullopt;
    }
    return static_cast<double>(day_diff) / std::sqrt(static_cast<double>(sumsq));
}

std::optional<std::size_t> rv_table::column_of(std::int64_t delta_t) const noexcept
{
    for (std::size_t c = 0; c < delta_ts.size(); ++c) {
        if (delta_ts[c] == delta_t) {
            return c;
        }
    }
    return std::nullopt;
}

std::vector<double> rv_table::valid_sr(std::size_t col, std::vector<std::size_t>* day_index) const
{
    std::vector<double> out;
    out.reserve(days);
    if (day_index) {
        day_index->clear();
    }
    for (std::size_t T = 0; T < days; ++T) {
        if (valid[at(T, col)]) {
            out.push_back(sr[at(T, col)]);
            if (day_index) {
                day_index->push_back(T);
            }
        }
    }
    return out;
}

std::size_t rv_table::excluded(std::size_t col) const noexcept
{
    std::size_t n = 0;
    for (std::size_t T = 0; T < days; ++T) {
        n += valid[at(T, col)] ? 0 : 1;
    }
    return n;
}

void validate_grid(std::span<const std::int64_t> delta_ts, std::int64_t N)
{
    if (delta_ts.empty()) {
        throw invalid_configuration("delta_t_grid must not be empty");
    }
    for (auto dt : delta_ts) {
        if (dt < 1 || dt > N) {
            throw invalid_configuration("delta_t_grid: " + std::to_string(dt) + " outside [1, N=" +
                                        std::to_string(N) + "]");
        }
    }
}

rv_accumulator::rv_accumulator(std::int32_t N, std::vector<std::int64_t> delta_ts, std::int32_t initial_sum)
    : N_(N)
    , delta_ts_(std::move(delta_ts))
    , open_sum_(initial_sum)
{
    validate_grid(delta_ts_, N_);
    slots_.reserve(delta_ts_.size());
    for (auto dt : delta_ts_) {
        slots_.push_back({dt, dt, initial_sum, 0});
    }
    returns_.N = N_;
}

void rv_accumulator::close_day(std::int32_t close_sum)
{
    const auto T = static_cast<std::int64_t>(returns_.days.size());
    returns_.days.push_back({T, open_sum_, close_sum});
    for (auto& s : slots_) {
        sumsq_rows_.push_back(s.sumsq);
        s.sumsq = 0;
        s.countdown = s.delta_t;
        s.last_sum = close_sum;
    }
    open_sum_ = close_sum;
    tick_in_day_ = 0;
}

void rv_accumulator::finish() const
{
    if (tick_in_day_ != 0) {
        throw insufficient_data("tick stream truncated: day " + std::to_string(returns_.days.size()) +
                                " has " + std::to_string(tick_in_day_) + " of " + std::to_string(N_) +
                                " ticks");
    }
}

rv_table rv_accumulator::table() const
{
    finish();
    rv_table t;
    t.N = N_;
    t.delta_ts = delta_ts_;
    for (auto dt : delta_ts_) {
        t.n_eff.push_back(intervals_per_day(N_, dt));
    }
    t.days = returns_.days.size();
    t.sumsq = sumsq_rows_;
    finalize_table(t, returns_);
    return t;
}

void finalize_table(rv_table& table, const return_series& returns)
{
    if (returns.days.size() != table.days) {
        throw internal_corruption("rv table and return series disagree on the number of days");
    }
    const std::size_t cells = table.days * table.columns();
    table.rv.assign(cells, 0.0);
    table.sr.assign(cells, 0.0);
    table.valid.assign(cells, 0);
    for (std::size_t T = 0; T < table.days; ++T) {
        const auto& d = returns.days[T];
        const std::int64_t diff = std::int64_t{d.close_sum} - d.open_sum;
        for (std::size_t c = 0; c < table.columns(); ++c) {
            const auto i = table.at(T, c);
            table.rv[i] = rv_from_sumsq(table.sumsq[i], table.N);
            if (auto sr = standardized_return_exact(diff, table.sumsq[i])) {
                table.sr[i] = *sr;
                table.valid[i] = 1;
            }
        }
    }
}

rv_table rv_grid(const tick_stream& stream, std::span<const std::int64_t> delta_ts)
{
    rv_accumulator acc(stream.N, {delta_ts.begin(), delta_ts.end()}, stream.initial_sum);
    for (auto s : stream.ticks) {
        acc.push(s);
    }
    return acc.table();
}

rv_table rv_grid_buffered(const tick_stream& stream, std::span<const std::int64_t> delta_ts)
{
    validate_grid(delta_ts, stream.N);
    if (stream.ticks.size() % static_cast<std::size_t>(stream.N) != 0) {
        throw insufficient_data("tick stream truncated: day " + std::to_string(stream.complete_days()) +
                                " is incomplete");
    }
    rv_table t;
    t.N = stream.N;
    t.delta_ts.assign(delta_ts.begin(), delta_ts.end());
    for (auto dt : delta_ts) {
        t.n_eff.push_back(intervals_per_day(stream.N, dt));
    }
    t.days = stream.complete_days();
    t.sumsq.reserve(t.days * t.columns());
    for (std::size_t T = 0; T < t.days; ++T) {
        const auto day = stream.day(T);
        for (auto dt : delta_ts) {
            t.sumsq.push_back(rv_day_sumsq(day, dt));
        }
    }
    finalize_table(t, daily_returns(stream));
    return t;
}

void write_rv_csv(std::ostream& out, const rv_table& table)
{
    out << "day,delta_t,n_eff,rv,sr,valid_flag\n";
    for (std::size_t T = 0; T < table.days; ++T) {
        for (std::size_t c = 0; c < table.columns(); ++c) {
            const auto i = table.at(T, c);
            out << T << ',' << table.delta_ts[c] << ',' << table.n_eff[c] << ',' << format_double(table.rv[i])
                << ',' << (table.valid[i] ? format_double(table.sr[i]) : std::string("nan")) << ','
                << int{table.valid[i]} << '\n';
        }
    }
}

rv_table read_rv_csv(std::istream& in, std::int32_t N)
{
    std::string line;
    if (!std::getline(in, line) || line != "day,delta_t,n_eff,rv,sr,valid_flag") {
        throw io_error("rv csv: missing or unexpected header");
    }
    rv_table t;
    t.N = N;
    std::size_t lineno = 1;
    std::size_t col = 0;
    std::size_t day = 0;
    bool first_day = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        const std::string where = "rv csv line " + std::to_string(lineno);
        if (f.size() != 6) {
            throw io_error(where + ": expected 6 fields");
        }
        const auto T = static_cast<std::size_t>(parse_int(f[0], where));
        const auto dt = parse_int(f[1], where);
        const auto n_eff = parse_int(f[2], where);
        const double rv = parse_double(f[3], where);
        const auto flag = parse_int(f[5], where);
        if (T != day) {
            if (T != day + 1 || (!first_day && col != t.columns()) || (first_day && col == 0)) {
                throw io_error(where + ": rows out of order");
            }
            if (first_day) {
                first_day = false;
            }
            day = T;
            col = 0;
        }
        if (first_day) {
            t.delta_ts.push_back(dt);
            t.n_eff.push_back(n_eff);
        } else if (col >= t.columns() || t.delta_ts[col] != dt || t.n_eff[col] != n_eff) {
            throw io_error(where + ": delta_t column layout differs from day 0");
        }
        if (rv < 0.0 || (flag != 0 && flag != 1)) {
            throw io_error(where + ": invalid rv or valid_flag");
        }
        t.rv.push_back(rv);
        t.sumsq.push_back(N > 0 ? std::llround(rv * 4.0 * double(N) * double(N)) : 0);
        t.valid.push_back(static_cast<std::uint8_t>(flag));
        t.sr.push_back(flag ? parse_double(f[4], where) : 0.0);
        ++col;
    }
    if (t.rv.empty()) {
        t.days = 0;
        return t;
    }
    if (col != t.columns()) {
        throw io_error("rv csv: last day is incomplete");
    }
    t.days = day + 1;
    return t;
}

} // namespace spinmarket
