#include "spinmarket/price_series.hpp"

#include "spinmarket/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <numeric>
#include <sstream>

using namespace spinmarket;

TEST_CASE("log price")
{
    CHECK(log_price(0, 15625, 0.5) == 0.0);
    CHECK(log_price(15625, 15625, 0.5) == 0.5);
    CHECK(log_price(-8, 16, 0.5, 1.0) == 0.75);
}

TEST_CASE("daily and intraday returns")
{
    CHECK(daily_return(10, 10, 16) == 0.0);
    CHECK(daily_return(-16, 16, 16) == 1.0);
    CHECK(intraday_return(4, 4, 16) == 0.0);
    CHECK(intraday_return(4, 6, 16) == 1.0 / 16);
    CHECK(intraday_return(6, 4, 16) == -1.0 / 16);
    // R(T) matches ln p(T+1) - ln p(T) at lambda = 0.5
    CHECK(daily_return(-6, 10, 16) == doctest::Approx(log_price(10, 16, 0.5) - log_price(-6, 16, 0.5)));
}

TEST_CASE("partition_day boundaries")
{
    std::vector<std::int32_t> ticks(16);
    std::iota(ticks.begin(), ticks.end(), 100);  // tick i (1-based) has sum 99 + i
    const day_view day{0, 7, ticks};

    const auto four = partition_day(day, 4);
    CHECK(four == std::vector<std::int32_t>{7, 103, 107, 111, 115});
    CHECK(intervals_per_day(16, 4) == 4);

    const auto five = partition_day(day, 5);
    CHECK(five == std::vector<std::int32_t>{7, 104, 109, 114, 115});
    CHECK(intervals_per_day(16, 5) == 4);

    CHECK(partition_day(day, 16) == std::vector<std::int32_t>{7, 115});
    CHECK(partition_day(day, 1).size() == 17);

    CHECK_THROWS_AS(partition_day(day, 0), invalid_configuration);
    CHECK_THROWS_AS(partition_day(day, 17), invalid_configuration);
}

TEST_CASE("intraday returns telescope to the daily return on seeded runs")
{
    const auto stream = testing::make_stream(16, 20, 11);
    const auto N = stream.N;
    for (std::size_t T = 0; T < stream.complete_days(); ++T) {
        const auto day = stream.day(T);
        const std::int64_t daily_num = day.close_sum() - day.open_sum;
        for (std::int64_t dt = 1; dt <= N; ++dt) {
            const auto b = partition_day(day, dt);
            REQUIRE(static_cast<std::int64_t>(b.size()) == intervals_per_day(N, dt) + 1);
            CHECK(b.front() == day.open_sum);
            CHECK(b.back() == day.close_sum());
            std::int64_t num = 0;
            for (std::size_t l = 1; l < b.size(); ++l) {
                const std::int64_t d = b[l] - b[l - 1];
                num += d;
                // |ret| <= dt / N
                CHECK(std::abs(d) <= 2 * dt);
            }
            CHECK(num == daily_num);
        }
        // the single Δt = N interval is the day itself
        const auto whole = partition_day(day, N);
        CHECK(intraday_return(whole[0], whole[1], N) == daily_return(day.open_sum, day.close_sum(), N));
    }
}

TEST_CASE("daily return series chains days and round-trips through CSV")
{
    const auto stream = testing::make_stream(8, 30, 4);
    const auto r = daily_returns(stream);
    REQUIRE(r.size() == 30);
    CHECK(r.days.front().open_sum == stream.initial_sum);
    for (std::size_t T = 1; T < r.size(); ++T) {
        CHECK(r.days[T].open_sum == r.days[T - 1].close_sum);
    }
    for (std::size_t T = 0; T < r.size(); ++T) {
        CHECK(std::abs(r.at(T)) <= 1.0);
    }

    std::stringstream csv;
    write_returns_csv(csv, r);
    const auto back = read_returns_csv(csv, stream.N);
    REQUIRE(back.size() == r.size());
    for (std::size_t T = 0; T < r.size(); ++T) {
        CHECK(back.days[T].open_sum == r.days[T].open_sum);
        CHECK(back.days[T].close_sum == r.days[T].close_sum);
    }

    std::stringstream broken("day,open_sum,close_sum,return\n0,1,3,0.1\n1,5,7,0.1\n");
    CHECK_THROWS_AS(read_returns_csv(broken, 8), io_error);
}

TEST_CASE("tick_stream rejects incomplete days")
{
    const auto stream = testing::make_stream(4, 2, 1, 5);
    CHECK(stream.complete_days() == 2);
    CHECK_NOTHROW(stream.day(1));
    CHECK_THROWS_AS(stream.day(2), invalid_configuration);
}
