// spinmarket: simulate the spin market, compute realized volatility and check
// standardized-return moments against the finite-sample law.
#include "spinmarket/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

using namespace spinmarket;

namespace {

constexpr int exit_validation = 1;
constexpr int exit_runtime = 2;

std::filesystem::path default_dir()
{
    if (const char* env = std::getenv(output_dir_env); env && *env) {
        return env;
    }
    return run_config{}.output_dir;
}

nlohmann::json load_json(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) {
        throw io_error("cannot read " + file.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(file.string() + ": " + e.what());
    }
}

std::vector<int> to_ints(const std::vector<std::int64_t>& v)
{
    return {v.begin(), v.end()};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spin financial market: realized volatility and standardized-return moments"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run the lattice and write returns.csv, rv.csv, manifest.json");
    std::string config_file;
    sim->add_option("--config", config_file, "Flat key = value config document");
    std::map<std::string, std::string> overrides;
    for (const auto& key : config_keys()) {
        sim->add_option_function<std::string>(
            "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
            "Overrides config key " + key);
    }
    bool quiet = false;
    sim->add_flag("-q,--quiet", quiet, "No progress output");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Moments, fits and the comparison table from a simulate run");
    std::string analyze_dir;
    ana->add_option("--dir", analyze_dir, "Run directory (default: $" + std::string(output_dir_env) + " or " +
                                              run_config{}.output_dir.string() + ")");

    // report
    auto* rep = app.add_subcommand("report", "Print the comparison table from summary.json");
    std::string report_dir;
    rep->add_option("--dir", report_dir, "Run directory");

    // theory
    auto* th = app.add_subcommand("theory", "Closed-form moments and densities of the finite-sample SR law");
    std::vector<std::int64_t> theory_n{2, 3, 5, 10, 25, 100, 1000, 15625};
    std::vector<std::int64_t> theory_k{1, 2, 3, 4, 5};
    int density_points = 201;
    std::string theory_dir = "theory_out";
    th->add_option("--n", theory_n, "Sample counts")->delimiter(',');
    th->add_option("--k", theory_k, "Half orders")->delimiter(',');
    th->add_option("--points", density_points, "Density samples per n");
    th->add_option("--output_dir", theory_dir, "Output directory");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Synthetic-Gaussian pipeline checked against the closed form");
    std::vector<std::int64_t> oracle_n{125};
    std::size_t oracle_days = 100000;
    double oracle_sigma = 1.0;
    std::uint64_t oracle_seed = 12345;
    std::size_t oracle_block = 100;
    std::string oracle_dir = "oracle_out";
    orc->add_option("--n", oracle_n, "Intraday returns per day")->delimiter(',');
    orc->add_option("--days", oracle_days, "Days per n");
    orc->add_option("--sigma", oracle_sigma, "Daily volatility");
    orc->add_option("--seed", oracle_seed, "Seed");
    orc->add_option("--jackknife_block", oracle_block, "Jackknife block in days");
    orc->add_option("--output_dir", oracle_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_validation;
    }

    try {
        if (*sim) {
            run_config config = config_file.empty() ? run_config{} : parse_config_file(config_file);
            for (const auto& [key, value] : overrides) {
                set_config_value(config, key, value);
            }
            config.validate();
            progress_fn progress;
            if (!quiet) {
                progress = [](std::int64_t done, std::int64_t total) {
                    std::cerr << "\rsweep " << done << " / " << total << std::flush;
                };
            }
            const auto manifest = run_simulate(config, progress);
            if (!quiet) {
                std::cerr << '\n';
            }
            std::cout << "simulate: " << manifest.config.measurement_sweeps << " days written, status "
                      << manifest.status << '\n';
        } else if (*ana) {
            const std::filesystem::path dir = analyze_dir.empty() ? default_dir() : std::filesystem::path(analyze_dir);
            run_analyze(dir);
            std::cout << format_report(load_json(dir / "summary.json"));
        } else if (*rep) {
            const std::filesystem::path dir = report_dir.empty() ? default_dir() : std::filesystem::path(report_dir);
            std::cout << format_report(load_json(dir / "summary.json"));
        } else if (*th) {
            for (auto n : theory_n) {
                if (n < 1) {
                    throw invalid_configuration("theory: n must be >= 1");
                }
            }
            for (auto k : theory_k) {
                if (k < 1) {
                    throw invalid_configuration("theory: k must be >= 1");
                }
            }
            const auto ks = to_ints(theory_k);
            emit_theory(theory_dir, theory_n, ks, density_points);
            std::cout << "theory: wrote " << (std::filesystem::path(theory_dir) / "theory.csv").string() << " and "
                      << (std::filesystem::path(theory_dir) / "density.csv").string() << '\n';
        } else if (*orc) {
            for (auto n : oracle_n) {
                if (n < 1) {
                    throw invalid_configuration("oracle: n must be >= 1");
                }
            }
            if (oracle_block < 1 || oracle_days < 2 * oracle_block) {
                throw invalid_configuration("oracle: need days >= 2 * jackknife_block");
            }
            const auto table = synthetic_table(oracle_n, oracle_days, oracle_sigma, oracle_seed);
            static constexpr int ks[] = {1, 2, 3, 4, 5};
            const auto grid = estimate_moments(table, ks, oracle_block);
            const auto checks = oracle_checks(grid);
            const auto j = oracle_json(checks, oracle_days, oracle_sigma, oracle_seed, oracle_block);
            std::filesystem::create_directories(oracle_dir);
            std::ofstream(std::filesystem::path(oracle_dir) / "oracle.json") << j.dump(2) << '\n';
            for (const auto& c : checks) {
                std::cout << "n=" << c.n << " k=" << c.k << " moment=" << c.moment << " +- " << c.std_error
                          << " theory=" << c.theory << " z=" << c.z << '\n';
            }
            std::cout << (j["all_within_3_sigma"].get<bool>() ? "all within 3 sigma" : "some checks outside 3 sigma")
                      << '\n';
        }
    } catch (const invalid_configuration& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return 0;
}
