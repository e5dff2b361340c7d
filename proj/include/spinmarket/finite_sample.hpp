#pragma once

#include "spinmarket/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace spinmarket {

/// Exact law of R/sqrt(RV) when RV is built from n iid Gaussian intraday returns:
///
///   f(x) = Gamma(n/2) / (sqrt(pi n) Gamma((n-1)/2)) (1 - x^2/n)^((n-3)/2),  |x| <= sqrt(n)
///
/// and zero outside. Requires n >= 2 (n = 1 is the two-point law {-1, +1}).
class finite_sample_law {
public:
    explicit finite_sample_law(std::int64_t n);

    std::int64_t n() const noexcept { return n_; }
    double support() const noexcept { return support_; }

    /// Evaluated in log space; the base is clamped at 0 near the edge of the support.
    /// For n = 2 the density diverges (integrably) at +-sqrt(2) and returns +inf there.
    double density(double x) const noexcept;

    /// Integral of x^order f(x) over the support by adaptive Gauss-Kronrod on
    /// x = sqrt(n) sin(theta), which removes the endpoint singularity for n = 2.
    double quadrature_moment(int order, double tol = 1e-13) const;

private:
    std::int64_t n_;
    double support_;
    double log_norm_;
    double exponent_;
};

/// Free-function form of finite_sample_law::density. Throws unsupported_parameter for n < 2.
double sr_density(double x, std::int64_t n);

/// Closed-form even moment m^{2k}(n) = n^k (2k-1)!! / ((n+2k-2)(n+2k-4)...n).
/// Equals 1 for k = 1 and tends to (2k-1)!! as n grows. Valid for n >= 1, k >= 1.
double theoretical_moment(std::int64_t n, int k);

/// g_k(n) = n^k / ((n+2k-2)...n), so m^{2k}(n) = (2k-1)!! g_k(n).
double moment_shape(std::int64_t n, int k);

/// (2k-1)!!, the 2k-th raw moment of N(0,1).
double gaussian_even_moment(int k);

/// Standardized returns from the constant-volatility Gaussian model: per day, n
/// intraday returns drawn iid N(0, sigma^2/n), SR = (sum r) / sqrt(sum r^2).
/// The sample follows finite_sample_law(n) exactly. n = 1 gives +-1.
std::vector<double> synthetic_gaussian_sr(std::int64_t n, std::size_t days, double sigma,
                                          rng_engine& rng);

/// CSV "n,k,moment" of closed-form moments for every (n, k) pair.
void write_theory_csv(std::ostream& out, std::span<const std::int64_t> n_grid,
                      std::span<const int> k_set);

/// CSV "n,x,density" sampling the density on `points` evenly spaced values over the support.
void write_density_csv(std::ostream& out, std::span<const std::int64_t> n_grid, int points);

} // namespace spinmarket
