#include "spinmarket/lattice.hpp"

#include <numeric>
#include <string>

namespace spinmarket {

void model_params::validate() const
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw invalid_configuration("beta must be a finite positive number, got " + std::to_string(beta));
    }
    if (!std::isfinite(alpha)) {
        throw invalid_configuration("alpha must be finite");
    }
    if (!std::isfinite(J)) {
        throw invalid_configuration("J must be finite");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw invalid_configuration("lambda must be a finite positive number, got " + std::to_string(lambda));
    }
}

spin_lattice::spin_lattice(int L, init_mode mode, std::uint64_t seed)
    : L_(L)
    , N_(0)
{
    if (L < 2) {
        throw invalid_configuration("L must be >= 2, got " + std::to_string(L));
    }
    N_ = L * L;
    spins_.assign(static_cast<std::size_t>(N_), 1);
    if (mode == init_mode::random) {
        rng_engine rng(seed);
        for (auto& s : spins_) {
            s = (rng() >> 63) != 0 ? 1 : -1;
        }
    }
    spin_sum_ = static_cast<std::int32_t>(recount());
}

void spin_lattice::assign(std::span<const std::int8_t> spins)
{
    if (spins.size() != spins_.size()) {
        throw invalid_configuration("assign: expected " + std::to_string(spins_.size()) + " spins, got " +
                                    std::to_string(spins.size()));
    }
    for (auto s : spins) {
        if (s != 1 && s != -1) {
            throw invalid_configuration("assign: spins must be -1 or +1");
        }
    }
    spins_.assign(spins.begin(), spins.end());
    spin_sum_ = static_cast<std::int32_t>(recount());
}

std::int64_t spin_lattice::recount() const noexcept
{
    return std::accumulate(spins_.begin(), spins_.end(), std::int64_t{0});
}

} // namespace spinmarket
