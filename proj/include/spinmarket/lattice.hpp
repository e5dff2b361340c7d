#pragma once

#include "spinmarket/errors.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace spinmarket {

/// Random stream used by every stochastic component. The identifier is
/// written into run metadata.
using rng_engine = std::mt19937_64;
inline constexpr const char* rng_id = "mt19937_64";

struct model_params {
    double beta = 1.8;
    double alpha = 22.0;
    double J = 1.0;
    double lambda = 0.5;

    /// Throws invalid_configuration when beta <= 0, lambda <= 0 or a coupling is not finite.
    void validate() const;
};

enum class init_mode { ordered, random };

/// Emitted once per spin update.
struct tick_event {
    std::uint64_t global_update_index = 0;
    std::int32_t spin_sum_after = 0;
};

/// Logistic heat-bath probability 1/(1+exp(-2*beta*h)); saturates to 0 or 1
/// for extreme arguments without overflow.
inline double heat_bath_prob(double beta, double h) noexcept
{
    const double x = 2.0 * beta * h;
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// L x L periodic lattice of +-1 agents with an exact running spin sum.
class spin_lattice {
public:
    spin_lattice(int L, init_mode mode, std::uint64_t seed = 0);

    int side() const noexcept { return L_; }
    std::int32_t sites() const noexcept { return N_; }
    std::int32_t spin_sum() const noexcept { return spin_sum_; }
    double magnetization() const noexcept { return static_cast<double>(spin_sum_) / N_; }

    int spin(std::int32_t site) const noexcept { return spins_[static_cast<std::size_t>(site)]; }
    std::span<const std::int8_t> spins() const noexcept { return spins_; }

    /// Overwrites the configuration (used by tests to build patterns) and recounts.
    void assign(std::span<const std::int8_t> spins);

    /// Full recount of the spins; must always equal spin_sum().
    std::int64_t recount() const noexcept;

    /// Sum of the four periodic nearest neighbours of site.
    int neighbor_sum(std::int32_t site) const noexcept
    {
        const int r = site / L_;
        const int c = site - r * L_;
        const int up = (r == 0 ? L_ - 1 : r - 1) * L_ + c;
        const int down = (r == L_ - 1 ? 0 : r + 1) * L_ + c;
        const int left = r * L_ + (c == 0 ? L_ - 1 : c - 1);
        const int right = r * L_ + (c == L_ - 1 ? 0 : c + 1);
        return spins_[up] + spins_[down] + spins_[left] + spins_[right];
    }

    /// h_i = J * (neighbour sum) - alpha * s_i * |M|, with M taken from the current spin sum.
    double local_field(std::int32_t site, const model_params& p) const noexcept
    {
        const double abs_m = std::abs(static_cast<double>(spin_sum_)) / N_;
        return p.J * neighbor_sum(site) - p.alpha * spins_[site] * abs_m;
    }

    /// Heat-bath update of one site; u is a uniform draw in [0,1).
    /// The new spin is +1 iff u < heat_bath_prob(beta, h), independent of the old value.
    std::int32_t set_from_draw(std::int32_t site, const model_params& p, double u) noexcept
    {
        const double prob = heat_bath_prob(p.beta, local_field(site, p));
        const std::int8_t next = u < prob ? 1 : -1;
        spin_sum_ += next - spins_[site];
        spins_[site] = next;
        return spin_sum_;
    }

private:
    int L_;
    std::int32_t N_;
    std::int32_t spin_sum_ = 0;
    std::vector<std::int8_t> spins_;
};

inline double uniform01(rng_engine& rng) noexcept
{
    // 53 high bits -> [0,1); fixed conversion keeps streams identical across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::int32_t uniform_site(rng_engine& rng, std::int32_t n) noexcept
{
    // Lemire multiply-shift on the high 32 bits, with rejection; unbiased.
    const auto range = static_cast<std::uint32_t>(n);
    std::uint64_t m = (rng() >> 32) * range;
    auto low = static_cast<std::uint32_t>(m);
    if (low < range) {
        const std::uint32_t threshold = (0u - range) % range;
        while (low < threshold) {
            m = (rng() >> 32) * range;
            low = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::int32_t>(m >> 32);
}

/// One heat-bath update at site using rng for the acceptance draw.
inline tick_event update_site(spin_lattice& lattice, std::int32_t site, const model_params& p,
                              rng_engine& rng, std::uint64_t index = 0) noexcept
{
    const double u = uniform01(rng);
    return {index, lattice.set_from_draw(site, p, u)};
}

/// N random-sequential updates (sites drawn uniformly with replacement).
/// sink(tick_event) is called once per update, in order. Exceptions thrown by
/// the sink propagate and leave the lattice in the state reached so far.
template <class Sink>
void sweep(spin_lattice& lattice, const model_params& p, rng_engine& rng, Sink&& sink,
           std::uint64_t first_index = 0)
{
    const std::int32_t n = lattice.sites();
    for (std::int32_t i = 0; i < n; ++i) {
        const std::int32_t site = uniform_site(rng, n);
        sink(update_site(lattice, site, p, rng, first_index + static_cast<std::uint64_t>(i)));
    }
}

/// Sweep without observers (thermalization).
inline void sweep(spin_lattice& lattice, const model_params& p, rng_engine& rng)
{
    sweep(lattice, p, rng, [](const tick_event&) noexcept {});
}

} // namespace spinmarket
