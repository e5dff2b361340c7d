#include "spinmarket/config.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/realized_volatility.hpp"
#include "spinmarket/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace spinmarket {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class F>
auto with_key(const std::string& key, F&& parse)
{
    try {
        return parse();
    } catch (const io_error& e) {
        throw invalid_configuration("config key '" + key + "': " + e.what());
    }
}

std::vector<std::int64_t> parse_list(const std::string& key, const std::string& value)
{
    std::vector<std::int64_t> out;
    for (auto part : split(value, ',')) {
        const auto t = trim(part);
        if (t.empty()) {
            continue;
        }
        out.push_back(with_key(key, [&] { return parse_int(t, key); }));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "on" || value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "off" || value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw invalid_configuration("config key '" + key + "': expected on/off, got '" + value + "'");
}

std::string join(const std::vector<std::int64_t>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

} // namespace

std::string to_string(init_mode mode)
{
    return mode == init_mode::ordered ? "ordered" : "random";
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "L",           "beta",         "alpha",       "J",          "lambda",
        "init_mode",   "seed",         "rng_id",      "thermalization_sweeps",
        "measurement_sweeps",          "delta_t_grid", "fit_range", "jackknife_block",
        "output_dir",  "tick_dump"};
    return keys;
}

void set_config_value(run_config& c, const std::string& key, const std::string& raw)
{
    const std::string value = trim(raw);
    auto num = [&] { return with_key(key, [&] { return parse_double(value, key); }); };
    auto integer = [&] { return with_key(key, [&] { return parse_int(value, key); }); };

    if (key == "L") {
        const auto L = integer();
        if (L < 2 || L > 46340) {
            throw invalid_configuration("config key 'L': must be >= 2, got " + value);
        }
        c.L = static_cast<int>(L);
    } else if (key == "beta") {
        c.beta = num();
    } else if (key == "alpha") {
        c.alpha = num();
    } else if (key == "J") {
        c.J = num();
    } else if (key == "lambda") {
        c.lambda = num();
    } else if (key == "init_mode") {
        if (value == "ordered") {
            c.init = init_mode::ordered;
        } else if (value == "random") {
            c.init = init_mode::random;
        } else {
            throw invalid_configuration("config key 'init_mode': expected ordered or random, got '" + value + "'");
        }
    } else if (key == "seed") {
        const auto s = integer();
        if (s < 0) {
            throw invalid_configuration("config key 'seed': must be >= 0");
        }
        c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "rng_id") {
        c.rng = value;
    } else if (key == "thermalization_sweeps") {
        c.thermalization_sweeps = integer();
    } else if (key == "measurement_sweeps") {
        c.measurement_sweeps = integer();
    } else if (key == "delta_t_grid") {
        c.delta_t_grid = parse_list(key, value);
        if (c.delta_t_grid.empty()) {
            throw invalid_configuration("config key 'delta_t_grid': empty list");
        }
    } else if (key == "fit_range") {
        const auto r = parse_list(key, value);
        if (r.size() != 2) {
            throw invalid_configuration("config key 'fit_range': expected 'lo,hi'");
        }
        c.fit = {r[0], r[1]};
    } else if (key == "jackknife_block") {
        c.jackknife_block = integer();
    } else if (key == "output_dir") {
        if (value.empty()) {
            throw invalid_configuration("config key 'output_dir': empty path");
        }
        c.output_dir = value;
    } else if (key == "tick_dump") {
        c.tick_dump = parse_bool(key, value);
    } else {
        throw invalid_configuration("unknown config key '" + key + "'");
    }
}

std::vector<std::int64_t> run_config::effective_grid() const
{
    if (!delta_t_grid.empty()) {
        return delta_t_grid;
    }
    std::vector<std::int64_t> grid;
    for (auto dt : default_delta_t_grid) {
        if (dt <= sites()) {
            grid.push_back(dt);
        }
    }
    return grid;
}

void run_config::validate() const
{
    if (L < 2) {
        throw invalid_configuration("L: must be >= 2, got " + std::to_string(L));
    }
    try {
        params().validate();
    } catch (const invalid_configuration& e) {
        throw invalid_configuration(std::string("model parameters: ") + e.what());
    }
    if (rng != spinmarket::rng_id) {
        throw invalid_configuration("rng_id: only '" + std::string(spinmarket::rng_id) + "' is available, got '" +
                                    rng + "'");
    }
    if (thermalization_sweeps < 0) {
        throw invalid_configuration("thermalization_sweeps: must be >= 0");
    }
    if (measurement_sweeps < 1) {
        throw invalid_configuration("measurement_sweeps: must be >= 1, got " + std::to_string(measurement_sweeps));
    }
    const auto grid = effective_grid();
    try {
        validate_grid(grid, sites());
    } catch (const invalid_configuration& e) {
        throw invalid_configuration(std::string(e.what()) + " (L = " + std::to_string(L) + ")");
    }
    if (std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) != grid.end()) {
        throw invalid_configuration("delta_t_grid: values must be strictly increasing");
    }
    if (fit.lo < 1 || fit.lo > fit.hi) {
        throw invalid_configuration("fit_range: need 1 <= lo <= hi");
    }
    const auto inside = std::count_if(grid.begin(), grid.end(), [&](auto dt) { return fit.contains(dt); });
    if (inside < 2) {
        throw invalid_configuration("fit_range: must contain at least 2 delta_t_grid values");
    }
    if (jackknife_block < 1) {
        throw invalid_configuration("jackknife_block: must be >= 1");
    }
    if (tick_dump && sites() > 32767) {
        throw invalid_configuration("tick_dump: 16-bit tick format needs L*L <= 32767");
    }
}

run_config parse_config(std::istream& in)
{
    run_config c;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto t = trim(line);
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw invalid_configuration("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const auto key = trim(std::string_view(t).substr(0, eq));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw invalid_configuration("config key '" + key + "' given twice");
        }
        seen.push_back(key);
        set_config_value(c, key, t.substr(eq + 1));
    }
    c.validate();
    return c;
}

run_config parse_config_file(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw io_error("cannot read config file " + file.string());
    }
    return parse_config(in);
}

std::string format_config(const run_config& c)
{
    std::ostringstream out;
    out << "L = " << c.L << '\n'
        << "beta = " << format_double(c.beta) << '\n'
        << "alpha = " << format_double(c.alpha) << '\n'
        << "J = " << format_double(c.J) << '\n'
        << "lambda = " << format_double(c.lambda) << '\n'
        << "init_mode = " << to_string(c.init) << '\n'
        << "seed = " << c.seed << '\n'
        << "rng_id = " << c.rng << '\n'
        << "thermalization_sweeps = " << c.thermalization_sweeps << '\n'
        << "measurement_sweeps = " << c.measurement_sweeps << '\n'
        << "delta_t_grid = " << join(c.effective_grid()) << '\n'
        << "fit_range = " << c.fit.lo << ',' << c.fit.hi << '\n'
        << "jackknife_block = " << c.jackknife_block << '\n'
        << "output_dir = " << c.output_dir.string() << '\n'
        << "tick_dump = " << (c.tick_dump ? "on" : "off") << '\n';
    return out.str();
}

} // namespace spinmarket
