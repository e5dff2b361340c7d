#pragma once

#include "spinmarket/lattice.hpp"
#include "spinmarket/moments.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinmarket {

/// Default sampling grid, log-spaced over [1, 4000].
inline const std::vector<std::int64_t> default_delta_t_grid{1,   2,   5,    10,   25,   50,   125,
                                                            250, 625, 1000, 1563, 2000, 3125, 4000};

struct run_config {
    int L = 125;
    double beta = 1.8;
    double alpha = 22.0;
    double J = 1.0;
    double lambda = 0.5;
    init_mode init = init_mode::ordered;
    std::uint64_t seed = 20140101;
    std::string rng = spinmarket::rng_id;
    std::int64_t thermalization_sweeps = 5000;
    std::int64_t measurement_sweeps = 30000;
    /// Empty means the default grid restricted to delta_t <= L^2.
    std::vector<std::int64_t> delta_t_grid;
    fit_range fit{1, 2000};
    std::int64_t jackknife_block = 100;
    std::filesystem::path output_dir = "spinmarket_out";
    bool tick_dump = false;

    std::int32_t sites() const noexcept { return static_cast<std::int32_t>(L) * L; }
    model_params params() const noexcept { return {beta, alpha, J, lambda}; }
    std::vector<std::int64_t> effective_grid() const;

    /// Throws invalid_configuration naming the offending key.
    void validate() const;
};

/// Keys accepted in config documents and as CLI flags, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws invalid_configuration on unknown keys or unparsable values.
void set_config_value(run_config& config, const std::string& key, const std::string& value);

/// Flat "key = value" document; '#' starts a comment, blank lines ignored.
/// Omitted keys keep their defaults. The result is validated.
run_config parse_config(std::istream& in);
run_config parse_config_file(const std::filesystem::path& file);

/// Canonical text form of every key, one "key = value" per line.
std::string format_config(const run_config& config);

std::string to_string(init_mode mode);

} // namespace spinmarket
