#include "spinmarket/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace spinmarket;

TEST_CASE("ordered lattice starts fully magnetized")
{
    spin_lattice big(125, init_mode::ordered);
    CHECK(big.sites() == 15625);
    CHECK(big.spin_sum() == 15625);
    CHECK(big.magnetization() == 1.0);

    spin_lattice tiny(2, init_mode::ordered);
    CHECK(tiny.spin_sum() == 4);
    for (auto s : tiny.spins()) {
        CHECK(s == 1);
    }
}

TEST_CASE("lattice side below 2 is rejected")
{
    CHECK_THROWS_AS(spin_lattice(1, init_mode::ordered), invalid_configuration);
    CHECK_THROWS_AS(spin_lattice(0, init_mode::random), invalid_configuration);
}

TEST_CASE("random lattice is near zero magnetization")
{
    // |M| > 0.05 at L = 100 is a 5 sigma binomial event (sd of M is 1/L); 200 seeds.
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        spin_lattice lat(100, init_mode::random, seed);
        CHECK(std::abs(lat.magnetization()) < 0.05);
        CHECK(lat.recount() == lat.spin_sum());
    }
}

TEST_CASE("local field")
{
    model_params p{1.8, 22.0, 1.0, 0.5};
    spin_lattice lat(6, init_mode::ordered);
    for (std::int32_t i = 0; i < lat.sites(); ++i) {
        CHECK(lat.local_field(i, p) == doctest::Approx(-18.0).epsilon(1e-15));
    }

    model_params ising{1.8, 0.0, 1.0, 0.5};
    CHECK(lat.local_field(7, ising) == 4.0);

    SUBCASE("checkerboard has M = 0 so only the neighbour term remains")
    {
        std::vector<std::int8_t> board(36);
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) {
                board[r * 6 + c] = (r + c) % 2 == 0 ? 1 : -1;
            }
        }
        lat.assign(board);
        CHECK(lat.spin_sum() == 0);
        CHECK(lat.local_field(0, p) == -4.0);
        CHECK(lat.local_field(1, p) == 4.0);
    }

    SUBCASE("periodic neighbours wrap around the edges")
    {
        std::vector<std::int8_t> spins(36, 1);
        spins[5] = -1;   // left of site 0 across the boundary
        spins[30] = -1;  // above site 0 across the boundary
        lat.assign(spins);
        CHECK(lat.neighbor_sum(0) == 0);
    }
}

TEST_CASE("heat-bath probability")
{
    CHECK(heat_bath_prob(1.8, 0.0) == 0.5);
    CHECK(heat_bath_prob(1.8, 1.0) == doctest::Approx(0.973403006423134).epsilon(1e-13));

    const double tiny = heat_bath_prob(1.8, -18.0);
    CHECK(tiny > 0.0);
    CHECK(tiny == doctest::Approx(7.206386860901402e-29).epsilon(1e-12));

    SUBCASE("saturation without overflow")
    {
        CHECK(heat_bath_prob(1e6, -18.0) == 0.0);
        CHECK(heat_bath_prob(1e6, 18.0) == 1.0);
        CHECK(heat_bath_prob(1e300, -26.0) == 0.0);
        CHECK(heat_bath_prob(1e300, 26.0) == 1.0);
    }

    SUBCASE("complement and monotonicity")
    {
        const double eps = std::numeric_limits<double>::epsilon();
        double prev = -1.0;
        for (int i = -500; i <= 500; ++i) {
            const double h = i * 0.01;
            const double p = heat_bath_prob(1.8, h);
            CHECK(std::abs(p + heat_bath_prob(1.8, -h) - 1.0) <= eps);
            CHECK(p > prev);
            prev = p;
        }
    }
}

TEST_CASE("update_site draws the new spin from the heat-bath law")
{
    model_params p{1.8, 22.0, 1.0, 0.5};

    SUBCASE("u below p gives +1, above gives -1")
    {
        spin_lattice lat(4, init_mode::ordered);
        const double prob = heat_bath_prob(p.beta, lat.local_field(3, p));
        const auto before = lat.spin_sum();
        CHECK(lat.set_from_draw(3, p, prob * 2.0) == before - 2);
        CHECK(lat.spin(3) == -1);
        const auto mid = lat.spin_sum();
        CHECK(lat.set_from_draw(3, p, 0.0) == mid + 2);
        CHECK(lat.spin(3) == 1);
    }

    SUBCASE("saturated field flips to -1 with certainty")
    {
        model_params hot{1e6, 22.0, 1.0, 0.5};
        spin_lattice lat(4, init_mode::ordered);
        rng_engine rng(5);
        for (int i = 0; i < 1000; ++i) {
            lat.assign(std::vector<std::int8_t>(16, 1));
            update_site(lat, 0, hot, rng);
            CHECK(lat.spin(0) == -1);
        }
    }

    SUBCASE("empirical +1 frequency matches p")
    {
        // alpha = 0 makes h independent of the updated spin: h = 0.05 * 4 = 0.2.
        model_params fixed{1.8, 0.0, 0.05, 0.5};
        spin_lattice lat(4, init_mode::ordered);
        const double prob = 0.6726070170677605;
        REQUIRE(heat_bath_prob(fixed.beta, lat.local_field(5, fixed)) == doctest::Approx(prob).epsilon(1e-14));
        rng_engine rng(99);
        const int draws = 100000;
        int plus = 0;
        for (int i = 0; i < draws; ++i) {
            update_site(lat, 5, fixed, rng);
            plus += lat.spin(5) == 1 ? 1 : 0;
        }
        const double sigma = std::sqrt(prob * (1 - prob) / draws);
        CHECK(std::abs(plus / double(draws) - prob) < 3 * sigma);
    }
}

TEST_CASE("sweep emits N ticks and keeps the spin sum exact")
{
    model_params p{1.8, 22.0, 1.0, 0.5};
    rng_engine rng(1);

    spin_lattice two(2, init_mode::ordered);
    std::vector<tick_event> ticks;
    sweep(two, p, rng, [&](const tick_event& t) { ticks.push_back(t); }, 40);
    REQUIRE(ticks.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(ticks[i].global_update_index == 40 + i);
    }

    spin_lattice lat(20, init_mode::random, 3);
    std::int32_t prev = lat.spin_sum();
    bool steps_ok = true;
    for (int s = 0; s < 50; ++s) {
        sweep(lat, p, rng, [&](const tick_event& t) {
            const auto d = std::abs(t.spin_sum_after - prev);
            steps_ok = steps_ok && (d == 0 || d == 2);
            prev = t.spin_sum_after;
        });
        CHECK(lat.recount() == lat.spin_sum());
    }
    CHECK(steps_ok);
}

TEST_CASE("identical seeds give identical tick streams")
{
    model_params p{1.8, 22.0, 1.0, 0.5};
    auto run = [&](std::uint64_t seed) {
        rng_engine rng(seed);
        spin_lattice lat(10, init_mode::ordered);
        std::vector<std::int32_t> out;
        for (int s = 0; s < 20; ++s) {
            sweep(lat, p, rng, [&](const tick_event& t) { out.push_back(t.spin_sum_after); });
        }
        return out;
    };
    CHECK(run(17) == run(17));
    CHECK(run(17) != run(18));
}

TEST_CASE("sink exceptions propagate and leave a consistent lattice")
{
    model_params p{1.8, 22.0, 1.0, 0.5};
    rng_engine rng(2);
    spin_lattice lat(8, init_mode::ordered);
    int seen = 0;
    CHECK_THROWS_AS(sweep(lat, p, rng,
                          [&](const tick_event&) {
                              if (++seen == 10) {
                                  throw std::runtime_error("sink full");
                              }
                          }),
                    std::runtime_error);
    CHECK(seen == 10);
    CHECK(lat.recount() == lat.spin_sum());
}

TEST_CASE("Ising limit stays ordered below the critical temperature")
{
    model_params ising{1.8, 0.0, 1.0, 0.5};
    rng_engine rng(2024);
    spin_lattice lat(32, init_mode::ordered);
    double min_abs_m = 1.0;
    for (int s = 0; s < 1000; ++s) {
        sweep(lat, ising, rng, [&](const tick_event& t) {
            min_abs_m = std::min(min_abs_m, std::abs(t.spin_sum_after / 1024.0));
        });
    }
    CHECK(min_abs_m > 0.9);
}

TEST_CASE("model parameter validation")
{
    CHECK_NOTHROW(model_params{}.validate());
    CHECK_THROWS_AS((model_params{0.0, 22, 1, 0.5}.validate()), invalid_configuration);
    CHECK_THROWS_AS((model_params{1.8, NAN, 1, 0.5}.validate()), invalid_configuration);
    CHECK_THROWS_AS((model_params{1.8, 22, INFINITY, 0.5}.validate()), invalid_configuration);
    CHECK_THROWS_AS((model_params{1.8, 22, 1, -0.5}.validate()), invalid_configuration);
}
