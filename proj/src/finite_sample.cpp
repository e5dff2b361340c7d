#include "spinmarket/finite_sample.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/text.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace spinmarket {

finite_sample_law::finite_sample_law(std::int64_t n)
    : n_(n)
{
    if (n < 2) {
        throw unsupported_parameter("finite-sample SR density needs n >= 2, got " + std::to_string(n));
    }
    const double nd = static_cast<double>(n);
    support_ = std::sqrt(nd);
    log_norm_ = std::lgamma(nd / 2.0) - 0.5 * std::log(std::numbers::pi * nd) - std::lgamma((nd - 1.0) / 2.0);
    exponent_ = (nd - 3.0) / 2.0;
}

double finite_sample_law::density(double x) const noexcept
{
    if (!(std::abs(x) <= support_)) {
        return 0.0;
    }
    const double base = std::max(0.0, 1.0 - x * x / static_cast<double>(n_));
    if (exponent_ == 0.0) {
        return std::exp(log_norm_);
    }
    if (base == 0.0) {
        return exponent_ > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return std::exp(log_norm_ + exponent_ * std::log(base));
}

double finite_sample_law::quadrature_moment(int order, double tol) const
{
    if (order < 0) {
        throw unsupported_parameter("moment order must be >= 0");
    }
    const double r = support_;
    auto integrand = [&](double theta) {
        const double c = std::cos(theta);
        if (c <= 0.0) {
            return 0.0;
        }
        // f(x) dx = norm * cos^(n-2)(theta) * r dtheta
        const double x = r * std::sin(theta);
        return std::exp(log_norm_ + (2.0 * exponent_ + 1.0) * std::log(c)) * std::pow(x, order) * r;
    };
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double half_pi = std::numbers::pi / 2.0;
    // Two halves so the peak at theta = 0 sits on a panel edge for large n.
    return gk::integrate(integrand, -half_pi, 0.0, 20, tol) + gk::integrate(integrand, 0.0, half_pi, 20, tol);
}

double sr_density(double x, std::int64_t n)
{
    return finite_sample_law(n).density(x);
}

double moment_shape(std::int64_t n, int k)
{
    if (n < 1 || k < 1) {
        throw unsupported_parameter("moment_shape needs n >= 1 and k >= 1");
    }
    const double nd = static_cast<double>(n);
    double g = 1.0;
    for (int j = 0; j < k; ++j) {
        g *= nd / (nd + 2.0 * j);
    }
    return g;
}

double gaussian_even_moment(int k)
{
    double m = 1.0;
    for (int j = 1; j < 2 * k; j += 2) {
        m *= j;
    }
    return m;
}

double theoretical_moment(std::int64_t n, int k)
{
    if (n < 1 || k < 1) {
        throw unsupported_parameter("theoretical_moment needs n >= 1 and k >= 1");
    }
    const double nd = static_cast<double>(n);
    double m = 1.0;
    for (int j = 0; j < k; ++j) {
        m *= nd * (2.0 * j + 1.0) / (nd + 2.0 * j);
    }
    return m;
}

std::vector<double> synthetic_gaussian_sr(std::int64_t n, std::size_t days, double sigma, rng_engine& rng)
{
    if (n < 1) {
        throw unsupported_parameter("synthetic_gaussian_sr needs n >= 1");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = sigma / std::sqrt(static_cast<double>(n));
    std::vector<double> out;
    out.reserve(days);
    for (std::size_t d = 0; d < days; ++d) {
        double R = 0.0;
        double rv = 0.0;
        for (std::int64_t l = 0; l < n; ++l) {
            const double r = scale * normal(rng);
            R += r;
            rv += r * r;
        }
        out.push_back(R / std::sqrt(rv));
    }
    return out;
}

void write_theory_csv(std::ostream& out, std::span<const std::int64_t> n_grid, std::span<const int> k_set)
{
    out << "n,k,moment\n";
    for (auto n : n_grid) {
        for (auto k : k_set) {
            out << n << ',' << k << ',' << format_double(theoretical_moment(n, k)) << '\n';
        }
    }
}

void write_density_csv(std::ostream& out, std::span<const std::int64_t> n_grid, int points)
{
    if (points < 2) {
        throw invalid_configuration("density_points must be >= 2");
    }
    out << "n,x,density\n";
    for (auto n : n_grid) {
        const finite_sample_law law(n);
        for (int i = 0; i < points; ++i) {
            const double x = -law.support() + 2.0 * law.support() * i / (points - 1);
            out << n << ',' << format_double(x) << ',' << format_double(law.density(x)) << '\n';
        }
    }
}

} // namespace spinmarket
