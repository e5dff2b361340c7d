#include "spinmarket/finite_sample.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/moments.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace spinmarket;

TEST_CASE("n = 3 density is uniform on [-sqrt 3, sqrt 3]")
{
    // Gamma(3/2) / (sqrt(3 pi) Gamma(1)) = (sqrt(pi)/2) / sqrt(3 pi) = 1 / (2 sqrt 3)
    const double expected = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(expected == doctest::Approx(0.288675).epsilon(1e-6));
    for (double x : {-1.7, -1.0, 0.0, 0.3, 1.2, std::sqrt(3.0)}) {
        CHECK(sr_density(x, 3) == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(sr_density(1.7321, 3) == 0.0);
    CHECK(sr_density(-5.0, 3) == 0.0);
}

TEST_CASE("density is symmetric and vanishes outside the support")
{
    for (std::int64_t n : {2, 4, 7, 25, 400, 15625}) {
        const finite_sample_law law(n);
        for (int i = 1; i < 40; ++i) {
            const double x = law.support() * i / 40.0;
            CHECK(law.density(x) == law.density(-x));
            CHECK(law.density(x) >= 0.0);
        }
        CHECK(law.density(law.support() * 1.0001) == 0.0);
        CHECK(law.density(-law.support() * 1.5) == 0.0);
    }
    // large n stays finite and close to the standard normal peak
    CHECK(sr_density(0.0, 100000) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-4));
}

TEST_CASE("n < 2 is unsupported for the density")
{
    CHECK_THROWS_AS(sr_density(0.0, 1), unsupported_parameter);
    CHECK_THROWS_AS(finite_sample_law(0), unsupported_parameter);
}

TEST_CASE("quadrature normalizes the density")
{
    CHECK(std::abs(finite_sample_law(100).quadrature_moment(0) - 1.0) < 1e-10);
    for (std::int64_t n : {2, 3, 5, 10, 100, 1000}) {
        CHECK(std::abs(finite_sample_law(n).quadrature_moment(0) - 1.0) < 1e-8);
    }
}

TEST_CASE("closed-form even moments match quadrature; odd moments vanish")
{
    for (std::int64_t n : {2, 3, 5, 10, 100, 1000}) {
        const finite_sample_law law(n);
        for (int k = 1; k <= 5; ++k) {
            const double q = law.quadrature_moment(2 * k);
            const double closed = theoretical_moment(n, k);
            CHECK(std::abs(q - closed) / closed < 1e-6);
            CHECK(std::abs(law.quadrature_moment(2 * k - 1)) < 1e-10);
        }
    }
    CHECK(theoretical_moment(2, 2) == 1.5);
    CHECK(finite_sample_law(2).quadrature_moment(4) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("theoretical moments")
{
    for (std::int64_t n = 1; n <= 1000; ++n) {
        CHECK(theoretical_moment(n, 1) == 1.0);
    }
    CHECK(theoretical_moment(25, 2) == doctest::Approx(3.0 * 25 / 27));
    CHECK(theoretical_moment(15625, 2) == doctest::Approx(2.9996160491457093).epsilon(1e-14));
    const double limits[] = {3.0, 15.0, 105.0, 945.0};
    for (int k = 2; k <= 5; ++k) {
        CHECK(gaussian_even_moment(k) == limits[k - 2]);
        CHECK(theoretical_moment(1000000000, k) == doctest::Approx(limits[k - 2]).epsilon(1e-7));
        double prev = 0.0;
        for (std::int64_t n = 1; n < 5000; n += 7) {
            const double m = theoretical_moment(n, k);
            CHECK(m > prev);
            CHECK(m < limits[k - 2]);
            prev = m;
        }
        CHECK(theoretical_moment(77, k) == doctest::Approx(gaussian_even_moment(k) * moment_shape(77, k)));
    }
    // n = 1 is the two-point law: every even moment is 1
    for (int k = 1; k <= 5; ++k) {
        CHECK(theoretical_moment(1, k) == 1.0);
    }
    CHECK_THROWS_AS(theoretical_moment(0, 2), unsupported_parameter);
    CHECK_THROWS_AS(theoretical_moment(5, 0), unsupported_parameter);
}

TEST_CASE("synthetic Gaussian SR")
{
    SUBCASE("volatility scale cancels")
    {
        rng_engine a(42), b(42);
        const auto one = synthetic_gaussian_sr(30, 500, 1.0, a);
        const auto seven = synthetic_gaussian_sr(30, 500, 7.0, b);
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK(seven[i] == doctest::Approx(one[i]).epsilon(1e-13));
        }
    }

    SUBCASE("n = 1 gives +-1")
    {
        rng_engine rng(1);
        for (double x : synthetic_gaussian_sr(1, 2000, 3.0, rng)) {
            CHECK(std::abs(x) == 1.0);
        }
    }

    SUBCASE("support bound")
    {
        rng_engine rng(2);
        for (double x : synthetic_gaussian_sr(4, 5000, 1.0, rng)) {
            CHECK(x * x <= 4.0 * (1 + 1e-12));
        }
    }

    SUBCASE("n = 25 kurtosis agrees with the closed form")
    {
        rng_engine rng(2718);
        const auto sr = synthetic_gaussian_sr(25, 1000000, 1.0, rng);
        std::vector<double> x4(sr.size());
        for (std::size_t i = 0; i < sr.size(); ++i) {
            x4[i] = std::pow(sr[i], 4);
        }
        const double m = sample_even_moment(sr, 2);
        const double err = jackknife_error(x4, 1000);
        CHECK(std::abs(m - theoretical_moment(25, 2)) < 3 * err);
    }
}

TEST_CASE("theory CSV")
{
    std::ostringstream out;
    const std::vector<std::int64_t> n{2, 1000000};
    const std::vector<int> k{1, 2};
    write_theory_csv(out, n, k);
    CHECK(out.str().rfind("n,k,moment\n2,1,1\n2,2,1.5\n1000000,1,1\n1000000,2,2.99999", 0) == 0);

    std::ostringstream dens;
    write_density_csv(dens, std::vector<std::int64_t>{3}, 3);
    CHECK(dens.str().find("n,x,density\n3,-1.7320508075688772,0.2886751345948") == 0);
}
