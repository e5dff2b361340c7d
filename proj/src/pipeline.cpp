#include "spinmarket/pipeline.hpp"

#include "spinmarket/errors.hpp"
#include "spinmarket/text.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace spinmarket {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<int, 5> all_k{1, 2, 3, 4, 5};

ordered_json config_json(const run_config& c)
{
    // output_dir is where the run lives, not what it computes; it stays out of
    // the snapshot so relocated or repeated runs produce identical bytes.
    ordered_json j;
    j["L"] = c.L;
    j["beta"] = c.beta;
    j["alpha"] = c.alpha;
    j["J"] = c.J;
    j["lambda"] = c.lambda;
    j["init_mode"] = to_string(c.init);
    j["seed"] = c.seed;
    j["rng_id"] = c.rng;
    j["thermalization_sweeps"] = c.thermalization_sweeps;
    j["measurement_sweeps"] = c.measurement_sweeps;
    j["delta_t_grid"] = c.effective_grid();
    j["fit_range"] = {c.fit.lo, c.fit.hi};
    j["jackknife_block"] = c.jackknife_block;
    j["tick_dump"] = c.tick_dump;
    return j;
}

run_config config_from_json(const json& j)
{
    run_config c;
    c.L = j.at("L").get<int>();
    c.beta = j.at("beta").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.J = j.at("J").get<double>();
    c.lambda = j.at("lambda").get<double>();
    set_config_value(c, "init_mode", j.at("init_mode").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.rng = j.at("rng_id").get<std::string>();
    c.thermalization_sweeps = j.at("thermalization_sweeps").get<std::int64_t>();
    c.measurement_sweeps = j.at("measurement_sweeps").get<std::int64_t>();
    c.delta_t_grid = j.at("delta_t_grid").get<std::vector<std::int64_t>>();
    const auto r = j.at("fit_range").get<std::vector<std::int64_t>>();
    if (r.size() != 2) {
        throw io_error("manifest: fit_range must have two entries");
    }
    c.fit = {r[0], r[1]};
    c.jackknife_block = j.at("jackknife_block").get<std::int64_t>();
    c.tick_dump = j.at("tick_dump").get<bool>();
    c.validate();
    return c;
}

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw io_error("cannot read " + file.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex(const unsigned char* data, unsigned len)
{
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(data[i]);
    }
    return out.str();
}

std::string sha256_bytes(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw internal_corruption("sha256 failed");
    }
    return hex(md, len);
}

void write_manifest(const std::filesystem::path& dir, const run_manifest& manifest)
{
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.to_json().dump(2) << '\n';
    if (!out) {
        throw io_error("cannot write " + (dir / "manifest.json").string());
    }
}

std::filesystem::path resolve_output_dir(const run_config& config)
{
    if (const char* env = std::getenv(output_dir_env); env && *env) {
        return env;
    }
    return config.output_dir;
}

std::vector<std::int64_t> dense_n_grid(std::int64_t lo, std::int64_t hi, int points)
{
    std::set<std::int64_t> grid;
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (int i = 0; i < points; ++i) {
        grid.insert(std::llround(std::exp(a + (b - a) * i / (points - 1))));
    }
    return {grid.begin(), grid.end()};
}

ordered_json optional_json(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

} // namespace

ordered_json run_manifest::to_json() const
{
    ordered_json j;
    j["software"] = "spinmarket";
    j["version"] = software_version;
    j["status"] = status;
    j["config"] = config_json(config);
    ordered_json excl = ordered_json::object();
    for (const auto& [dt, n] : zero_rv_excluded) {
        excl[std::to_string(dt)] = n;
    }
    j["zero_rv_excluded"] = excl;
    j["warnings"] = warnings;
    ordered_json dig = ordered_json::object();
    for (const auto& [name, d] : digests) {
        dig[name] = d;
    }
    j["digests"] = dig;
    return j;
}

run_manifest run_manifest::from_json(const json& j)
{
    run_manifest m;
    try {
        m.config = config_from_json(j.at("config"));
        m.status = j.at("status").get<std::string>();
        for (const auto& [dt, n] : j.at("zero_rv_excluded").items()) {
            m.zero_rv_excluded[std::stoll(dt)] = n.get<std::size_t>();
        }
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& [name, d] : j.at("digests").items()) {
            m.digests[name] = d.get<std::string>();
        }
    } catch (const json::exception& e) {
        throw io_error(std::string("manifest: ") + e.what());
    }
    return m;
}

simulation_output simulate(const run_config& config, const progress_fn& progress,
                           const std::function<void(std::int32_t)>& tick_out)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto params = config.params();
    rng_engine rng(config.seed);
    spin_lattice lattice(config.L, config.init, config.seed ^ 0x9e3779b97f4a7c15ULL);

    const std::int64_t total = config.thermalization_sweeps + config.measurement_sweeps;
    std::int64_t done = 0;
    for (; done < config.thermalization_sweeps; ++done) {
        sweep(lattice, params, rng);
        if (progress && (done + 1) % 1000 == 0) {
            progress(done + 1, total);
        }
    }

    rv_accumulator acc(lattice.sites(), config.effective_grid(), lattice.spin_sum());
    std::uint64_t index = 0;
    for (std::int64_t s = 0; s < config.measurement_sweeps; ++s, ++done) {
        if (tick_out) {
            sweep(lattice, params, rng, [&](const tick_event& t) {
                acc.push(t.spin_sum_after);
                tick_out(t.spin_sum_after);
            }, index);
        } else {
            sweep(lattice, params, rng, [&](const tick_event& t) { acc.push(t.spin_sum_after); }, index);
        }
        index += static_cast<std::uint64_t>(lattice.sites());
        if (progress && (done + 1) % 1000 == 0) {
            progress(done + 1, total);
        }
    }
    if (lattice.recount() != lattice.spin_sum()) {
        throw internal_corruption("spin_sum drifted from the lattice recount");
    }

    simulation_output out;
    out.table = acc.table();
    out.returns = acc.returns();
    out.final_spin_sum = lattice.spin_sum();
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

analysis_output analyze(const rv_table& table, const run_config& config)
{
    analysis_output out;
    out.moments = estimate_moments(table, all_k, static_cast<std::size_t>(config.jackknife_block));

    for (const auto& d : out.moments.diagnostics) {
        const double rate = static_cast<double>(d.excluded) / static_cast<double>(table.days);
        if (rate > 0.10) {
            std::ostringstream w;
            w << "delta_t = " << d.delta_t << ": " << d.excluded << " of " << table.days
              << " days have zero RV (excluded)";
            out.warnings.push_back(w.str());
        }
        if (d.mean_stderr > 0.0 && std::abs(d.mean) >= 5.0 * d.mean_stderr) {
            std::ostringstream w;
            w << "delta_t = " << d.delta_t << ": SR sample mean " << d.mean << " is " << std::abs(d.mean) / d.mean_stderr
              << " standard errors from 0";
            out.warnings.push_back(w.str());
        }
    }
    for (int k = 2; k <= 5; ++k) {
        try {
            auto fit = fit_moment_curve(out.moments, k, config.fit);
            for (const auto& w : fit.warnings) {
                out.warnings.push_back(w);
            }
            out.fits.push_back(std::move(fit));
        } catch (const insufficient_data& e) {
            out.warnings.push_back(e.what());
        }
    }
    if (const auto* v = out.moments.find(1, 1)) {
        out.variance_dt1 = *v;
    } else {
        out.warnings.push_back("delta_t = 1 is not on the grid; variance row left empty");
    }
    out.table = moment_table(out.fits, out.variance_dt1 ? &*out.variance_dt1 : nullptr);
    return out;
}

ordered_json summary_json(const analysis_output& a, const run_manifest& manifest)
{
    ordered_json j;
    j["config"] = config_json(manifest.config);
    j["manifest"] = manifest.to_json();
    if (a.variance_dt1) {
        j["variance_dt1"] = {{"value", a.variance_dt1->value}, {"stderr", a.variance_dt1->std_error}};
    } else {
        j["variance_dt1"] = nullptr;
    }
    ordered_json fits = ordered_json::array();
    for (const auto& f : a.fits) {
        ordered_json fj;
        fj["k"] = f.k;
        fj["C"] = f.C;
        fj["C_err"] = f.C_err;
        fj["C_err_jackknife"] = optional_json(f.C_err_jackknife);
        fj["chi2"] = f.chi2;
        fj["dof"] = f.dof;
        fj["points"] = f.points;
        fj["weighted"] = f.weighted;
        fj["fit_range"] = {f.range.lo, f.range.hi};
        fits.push_back(fj);
    }
    j["fits"] = fits;
    ordered_json names = ordered_json::array(), theory = ordered_json::array(), measured = ordered_json::array(),
                 errors = ordered_json::array();
    for (const auto& row : a.table) {
        names.push_back(row.name);
        theory.push_back(row.theory);
        measured.push_back(optional_json(row.measured));
        errors.push_back(optional_json(row.error));
    }
    j["table"] = {{"columns", names}, {"theory", theory}, {"measured", measured}, {"errors", errors}};
    ordered_json diag = ordered_json::array();
    for (const auto& d : a.moments.diagnostics) {
        diag.push_back({{"delta_t", d.delta_t}, {"sr_mean", d.mean}, {"sr_mean_stderr", d.mean_stderr},
                        {"zero_rv_excluded", d.excluded}});
    }
    j["diagnostics"] = diag;
    j["warnings"] = a.warnings;
    return j;
}

std::string sha256_file(const std::filesystem::path& file)
{
    return sha256_bytes(read_file(file));
}

void write_tracked(const std::filesystem::path& dir, const std::string& name, const std::string& content,
                   run_manifest& manifest)
{
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) {
        throw io_error("cannot write " + path.string());
    }
    manifest.digests[name] = sha256_bytes(content);
}

run_manifest run_simulate(const run_config& config, const progress_fn& progress)
{
    config.validate();
    const auto dir = resolve_output_dir(config);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw io_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }

    run_manifest manifest;
    manifest.config = config;
    manifest.status = "running";
    write_manifest(dir, manifest);

    try {
        std::ofstream ticks;
        std::vector<char> buffer;
        std::function<void(std::int32_t)> tick_out;
        if (config.tick_dump) {
            ticks.open(dir / "ticks.bin", std::ios::binary | std::ios::trunc);
            if (!ticks) {
                throw io_error("cannot write " + (dir / "ticks.bin").string());
            }
            buffer.reserve(1 << 16);
            tick_out = [&](std::int32_t s) {
                const auto v = static_cast<std::uint16_t>(static_cast<std::int16_t>(s));
                buffer.push_back(static_cast<char>(v & 0xff));
                buffer.push_back(static_cast<char>(v >> 8));
                if (buffer.size() >= (1 << 16)) {
                    ticks.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
                    buffer.clear();
                }
            };
        }

        const auto sim = simulate(config, progress, tick_out);

        if (config.tick_dump) {
            ticks.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
            ticks.close();
            if (!ticks) {
                throw io_error("cannot write " + (dir / "ticks.bin").string());
            }
            manifest.digests["ticks.bin"] = sha256_file(dir / "ticks.bin");
        }

        std::ostringstream returns_csv, rv_csv;
        write_returns_csv(returns_csv, sim.returns);
        write_rv_csv(rv_csv, sim.table);
        write_tracked(dir, "returns.csv", returns_csv.str(), manifest);
        write_tracked(dir, "rv.csv", rv_csv.str(), manifest);
        for (std::size_t c = 0; c < sim.table.columns(); ++c) {
            manifest.zero_rv_excluded[sim.table.delta_ts[c]] = sim.table.excluded(c);
        }
        manifest.status = "simulated";
        write_manifest(dir, manifest);

        ordered_json timings;
        timings["simulate_seconds"] = sim.seconds;
        timings["spin_updates"] = (config.thermalization_sweeps + config.measurement_sweeps) *
                                  static_cast<std::int64_t>(config.sites());
        std::ofstream(dir / "timings.json") << timings.dump(2) << '\n';
    } catch (...) {
        manifest.status = "invalid";
        try {
            write_manifest(dir, manifest);
        } catch (...) {
        }
        throw;
    }
    return manifest;
}

void write_analysis(const std::filesystem::path& dir, const analysis_output& a, run_manifest& manifest)
{
    std::ostringstream moments;
    moments << "delta_t,n_eff,k,moment,stderr,n_days_used\n";
    for (const auto& e : a.moments.estimates) {
        moments << e.delta_t << ',' << e.n_eff << ',' << e.k << ',' << format_double(e.value) << ','
                << format_double(e.std_error) << ',' << e.n_days_used << '\n';
    }

    std::ostringstream curve;
    curve << "series,k,n,delta_t,value,stderr\n";
    std::int64_t n_max = 1;
    for (const auto& e : a.moments.estimates) {
        n_max = std::max(n_max, e.n_eff);
        curve << "measured," << e.k << ',' << e.n_eff << ',' << e.delta_t << ',' << format_double(e.value) << ','
              << format_double(e.std_error) << '\n';
    }
    const auto dense = dense_n_grid(1, std::max<std::int64_t>(n_max, 2), 200);
    for (const auto& f : a.fits) {
        for (auto n : dense) {
            curve << "fit," << f.k << ',' << n << ",," << format_double(f.C * moment_shape(n, f.k)) << ",\n";
        }
    }
    for (int k = 1; k <= 5; ++k) {
        for (auto n : dense) {
            curve << "theory," << k << ',' << n << ",," << format_double(theoretical_moment(n, k)) << ",\n";
        }
    }

    write_tracked(dir, "moments.csv", moments.str(), manifest);
    write_tracked(dir, "fit_curve.csv", curve.str(), manifest);
    for (const auto& w : a.warnings) {
        if (std::find(manifest.warnings.begin(), manifest.warnings.end(), w) == manifest.warnings.end()) {
            manifest.warnings.push_back(w);
        }
    }
    manifest.status = "analyzed";
    manifest.digests.erase("summary.json");
    write_manifest(dir, manifest);
    write_tracked(dir, "summary.json", summary_json(a, manifest).dump(2) + "\n", manifest);
    write_manifest(dir, manifest);
}

analysis_output run_analyze(const std::filesystem::path& dir)
{
    json mj;
    try {
        mj = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw io_error("manifest.json: " + std::string(e.what()));
    }
    auto manifest = run_manifest::from_json(mj);
    if (manifest.status != "simulated" && manifest.status != "analyzed") {
        throw io_error("run in " + dir.string() + " has status '" + manifest.status + "'; simulate did not complete");
    }
    for (const char* name : {"returns.csv", "rv.csv"}) {
        const auto it = manifest.digests.find(name);
        if (it == manifest.digests.end()) {
            throw io_error(std::string("manifest lists no digest for ") + name);
        }
        if (sha256_file(dir / name) != it->second) {
            throw io_error(std::string(name) + " does not match its manifest digest");
        }
    }
    const auto& config = manifest.config;
    std::ifstream returns_in(dir / "returns.csv");
    std::ifstream rv_in(dir / "rv.csv");
    const auto returns = read_returns_csv(returns_in, config.sites());
    const auto table = read_rv_csv(rv_in, config.sites());
    if (returns.size() != static_cast<std::size_t>(config.measurement_sweeps) || table.days != returns.size()) {
        throw io_error("persisted day counts disagree with measurement_sweeps");
    }
    if (table.delta_ts != config.effective_grid()) {
        throw io_error("rv.csv delta_t columns disagree with the configured grid");
    }

    const auto a = analyze(table, config);
    write_analysis(dir, a, manifest);
    return a;
}

std::string format_report(const json& summary)
{
    std::ostringstream out;
    const auto& t = summary.at("table");
    const auto& cols = t.at("columns");
    out << std::left << std::setw(12) << "" ;
    for (const auto& c : cols) {
        out << std::right << std::setw(18) << c.get<std::string>();
    }
    out << '\n' << std::left << std::setw(12) << "theory";
    for (const auto& v : t.at("theory")) {
        out << std::right << std::setw(18) << v.get<double>();
    }
    out << '\n' << std::left << std::setw(12) << "measured";
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto& m = t.at("measured")[i];
        const auto& e = t.at("errors")[i];
        std::ostringstream cell;
        if (m.is_null()) {
            cell << "-";
        } else {
            cell << std::setprecision(5) << m.get<double>();
            if (!e.is_null()) {
                cell << " +- " << std::setprecision(2) << e.get<double>();
            }
        }
        out << std::right << std::setw(18) << cell.str();
    }
    out << '\n';
    for (const auto& f : summary.at("fits")) {
        out << "k=" << f.at("k").get<int>() << "  C=" << std::setprecision(6) << f.at("C").get<double>()
            << "  C_err=" << std::setprecision(2) << f.at("C_err").get<double>();
        if (!f.at("C_err_jackknife").is_null()) {
            out << "  C_err(jackknife)=" << f.at("C_err_jackknife").get<double>();
        }
        out << "  chi2/dof=" << std::setprecision(3) << f.at("chi2").get<double>() << '/' << f.at("dof").get<int>()
            << '\n';
    }
    for (const auto& w : summary.at("warnings")) {
        out << "warning: " << w.get<std::string>() << '\n';
    }
    return out.str();
}

void emit_theory(const std::filesystem::path& dir, std::span<const std::int64_t> n_grid, std::span<const int> k_set,
                 int density_points)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw io_error("cannot create output directory " + dir.string());
    }
    std::ofstream theory(dir / "theory.csv", std::ios::binary);
    write_theory_csv(theory, n_grid, k_set);
    std::vector<std::int64_t> density_n;
    for (auto n : n_grid) {
        if (n >= 2) {
            density_n.push_back(n);
        }
    }
    std::ofstream density(dir / "density.csv", std::ios::binary);
    write_density_csv(density, density_n, density_points);
    if (!theory || !density) {
        throw io_error("cannot write theory output in " + dir.string());
    }
}

rv_table synthetic_table(std::span<const std::int64_t> n_grid, std::size_t days, double sigma, std::uint64_t seed)
{
    rv_table t;
    t.N = 0;
    t.days = days;
    t.delta_ts.assign(n_grid.begin(), n_grid.end());
    t.n_eff.assign(n_grid.begin(), n_grid.end());
    const std::size_t cells = days * t.columns();
    t.sumsq.assign(cells, 0);
    t.rv.assign(cells, 0.0);
    t.sr.assign(cells, 0.0);
    t.valid.assign(cells, 0);
    for (std::size_t c = 0; c < t.columns(); ++c) {
        rng_engine rng(seed + 7919 * c);
        const auto sr = synthetic_gaussian_sr(n_grid[c], days, sigma, rng);
        for (std::size_t T = 0; T < days; ++T) {
            t.sr[t.at(T, c)] = sr[T];
            t.valid[t.at(T, c)] = std::isfinite(sr[T]) ? 1 : 0;
        }
    }
    return t;
}

std::vector<oracle_check> oracle_checks(const moment_grid& grid)
{
    std::vector<oracle_check> out;
    for (const auto& e : grid.estimates) {
        oracle_check c;
        c.n = e.n_eff;
        c.k = e.k;
        c.moment = e.value;
        c.std_error = e.std_error;
        c.theory = theoretical_moment(e.n_eff, e.k);
        c.z = e.std_error > 0.0 ? (e.value - c.theory) / e.std_error : (e.value == c.theory ? 0.0 : INFINITY);
        out.push_back(c);
    }
    return out;
}

ordered_json oracle_json(std::span<const oracle_check> checks, std::size_t days, double sigma, std::uint64_t seed,
                         std::size_t block_days)
{
    ordered_json j;
    j["days"] = days;
    j["sigma"] = sigma;
    j["seed"] = seed;
    j["rng_id"] = rng_id;
    j["jackknife_block"] = block_days;
    ordered_json rows = ordered_json::array();
    bool all = true;
    for (const auto& c : checks) {
        const bool ok = std::abs(c.z) <= 3.0;
        all = all && ok;
        rows.push_back({{"n", c.n}, {"k", c.k}, {"moment", c.moment}, {"stderr", c.std_error},
                        {"theory", c.theory}, {"z", c.z}, {"within_3_sigma", ok}});
    }
    j["checks"] = rows;
    j["all_within_3_sigma"] = all;
    return j;
}

} // namespace spinmarket
