// provol: prospect-demand market models, calibration, and option pricing.
//
// Subcommands: simulate | calibrate | price | ivsurface | vegamap | convergence.
// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.
// Every run logs its fully resolved configuration (including defaults) to
// stderr so any output can be reproduced from the log line alone.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "provol/calibration.hpp"
#include "provol/data.hpp"
#include "provol/demand.hpp"
#include "provol/errors.hpp"
#include "provol/market.hpp"
#include "provol/pricing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

using provol::data::format_double;

struct OutputTarget {
    std::ofstream file;
    bool to_stdout = true;
    std::ostream& stream() { return to_stdout ? std::cout : file; }
};

OutputTarget open_output(const std::string& path) {
    OutputTarget target;
    if (path.empty() || path == "-") return target;
    target.file.open(path);
    if (!target.file) throw std::runtime_error("cannot open output file: " + path);
    target.to_stdout = false;
    return target;
}

std::string preset_or_file(const std::string& preset, const std::string& curve_file) {
    return curve_file.empty() ? preset : ("file:" + curve_file);
}

struct SurrogateChoice {
    provol::Poly f_tilde;
    provol::Poly g_tilde;
};

SurrogateChoice surrogates_for(const std::string& preset) {
    const auto pair = preset == "fx" ? provol::calibration::fx_surrogates()
                                     : provol::calibration::equity_surrogates();
    return {pair.first, pair.second};
}

void default_spots(const std::string& preset, double& p0, double& p1, bool p0_set, bool p1_set) {
    if (!p0_set) p0 = preset == "fx" ? 0.6493 : 1462.42;
    if (!p1_set) p1 = preset == "fx" ? 0.6492 : 1459.37;
}

std::vector<std::uint64_t> parse_uint_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        std::size_t used = 0;
        const unsigned long long v = std::stoull(token, &used);
        if (used != token.size()) throw std::invalid_argument("bad path count: " + token);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty path-count list");
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"prospect-demand market models, calibration, and option pricing"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "simulate a price path and write it as CSV");
    std::string sim_preset = "equity", sim_model = "surrogate", sim_curve_file, sim_output;
    double sim_p0 = 0.0, sim_p1 = 0.0, sim_dt = 1.0 / 252.0, sim_vol_floor = 1e-4;
    double sim_xi = 0.0, sim_nu = 0.0;
    std::uint64_t sim_n = 1500, sim_seed = 0;
    sim->add_option("--preset", sim_preset, "coefficient preset: equity|fx")
        ->check(CLI::IsMember({"equity", "fx"}));
    sim->add_option("--model", sim_model, "dynamics: surrogate|derived")
        ->check(CLI::IsMember({"surrogate", "derived"}));
    sim->add_option("--curve-file", sim_curve_file, "demand-curve file for --model derived");
    auto* sim_p0_opt = sim->add_option("--p0", sim_p0, "first starting price");
    auto* sim_p1_opt = sim->add_option("--p1", sim_p1, "second starting price");
    sim->add_option("--n", sim_n, "path length in samples (>= 2)");
    sim->add_option("--seed", sim_seed, "master RNG seed");
    auto* sim_xi_opt = sim->add_option("--xi", sim_xi, "trend-chasing weight (derived model)");
    auto* sim_nu_opt = sim->add_option("--nu", sim_nu, "noise weight, negative (derived model)");
    sim->add_option("--dt", sim_dt, "step length in years")->check(CLI::PositiveNumber);
    sim->add_option("--vol-floor", sim_vol_floor, "per-step volatility floor (surrogate model)");
    sim->add_option("--output", sim_output, "output CSV path (default: stdout)");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "estimate drift/variance curves from a price CSV");
    std::string cal_input, cal_output;
    std::uint64_t cal_S = 0;
    double cal_gamma = 3.5, cal_trim = 0.01;
    std::size_t cal_points = 101;
    cal->add_option("--input", cal_input, "price CSV (date,price)")->required();
    cal->add_option("--S", cal_S, "use only the most recent S prices (0 = all)");
    cal->add_option("--gamma", cal_gamma, "bandwidth divisor: h = yield range / gamma");
    cal->add_option("--grid-points", cal_points, "evaluation grid size");
    cal->add_option("--trim", cal_trim, "fraction of the yield range trimmed per side");
    cal->add_option("--output", cal_output, "output CSV path (default: stdout)");

    // ---- shared pricing options ----
    std::string price_preset = "equity", price_output;
    double price_K = 800.0, price_r = 0.03, price_p0 = 0.0, price_p1 = 0.0, price_vol_floor = 1e-4;
    int price_T_months = 60;
    std::uint64_t price_paths = 200000, price_seed = 0;
    int price_threads = 1;
    bool price_antithetic = false;

    auto* price = app.add_subcommand("price", "Monte Carlo price of one European call");
    price->add_option("--K", price_K, "strike");
    price->add_option("--T-months", price_T_months, "maturity in months")->check(CLI::PositiveNumber);
    price->add_option("--r", price_r, "annual rate, continuous compounding");
    price->add_option("--paths", price_paths, "Monte Carlo paths");
    price->add_option("--seed", price_seed, "master RNG seed");
    auto* price_p0_opt = price->add_option("--p0", price_p0, "first starting price");
    auto* price_p1_opt = price->add_option("--p1", price_p1, "second starting price (spot)");
    price->add_option("--preset", price_preset, "surrogate preset: equity|fx")
        ->check(CLI::IsMember({"equity", "fx"}));
    price->add_option("--vol-floor", price_vol_floor, "per-step volatility floor");
    price->add_option("--threads", price_threads, "worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    price->add_flag("--antithetic", price_antithetic, "antithetic variates");

    // ---- ivsurface ----
    auto* surf = app.add_subcommand("ivsurface", "implied-volatility surface as CSV");
    std::string surf_preset = "equity", surf_output;
    double surf_K_min = 1100.0, surf_K_max = 2000.0, surf_r = 0.03, surf_p0 = 0.0, surf_p1 = 0.0;
    double surf_guard = provol::pricing::default_vega_guard, surf_vol_floor = 1e-4;
    std::size_t surf_K_count = 10;
    int surf_T_min = 6, surf_T_max = 60, surf_T_step = 6, surf_threads = 1;
    std::uint64_t surf_paths = 200000, surf_seed = 0;
    surf->add_option("--K-min", surf_K_min, "lowest strike");
    surf->add_option("--K-max", surf_K_max, "highest strike");
    surf->add_option("--K-count", surf_K_count, "number of strikes");
    surf->add_option("--T-min", surf_T_min, "shortest maturity (months)")->check(CLI::PositiveNumber);
    surf->add_option("--T-max", surf_T_max, "longest maturity (months)")->check(CLI::PositiveNumber);
    surf->add_option("--T-step", surf_T_step, "maturity step (months)")->check(CLI::PositiveNumber);
    surf->add_option("--paths", surf_paths, "Monte Carlo paths per maturity");
    surf->add_option("--seed", surf_seed, "master RNG seed");
    surf->add_option("--guard", surf_guard, "Vega guard threshold");
    surf->add_option("--r", surf_r, "annual rate");
    auto* surf_p0_opt = surf->add_option("--p0", surf_p0, "first starting price");
    auto* surf_p1_opt = surf->add_option("--p1", surf_p1, "second starting price (spot)");
    surf->add_option("--preset", surf_preset, "surrogate preset: equity|fx")
        ->check(CLI::IsMember({"equity", "fx"}));
    surf->add_option("--vol-floor", surf_vol_floor, "per-step volatility floor");
    surf->add_option("--threads", surf_threads, "worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    surf->add_option("--output", surf_output, "output CSV path (default: stdout)");

    // ---- vegamap ----
    auto* vega = app.add_subcommand("vegamap", "Black-Scholes Vega over a strike/maturity grid");
    std::string vega_output;
    double vega_sigma = 0.15, vega_P = 1459.37, vega_r = 0.03;
    double vega_K_min = 200.0, vega_K_max = 2000.0, vega_K_step = 50.0;
    int vega_T_min = 1, vega_T_max = 60, vega_T_step = 1;
    vega->add_option("--sigma", vega_sigma, "volatility")->check(CLI::PositiveNumber);
    vega->add_option("--P", vega_P, "spot price")->check(CLI::PositiveNumber);
    vega->add_option("--r", vega_r, "annual rate");
    vega->add_option("--K-min", vega_K_min, "lowest strike")->check(CLI::PositiveNumber);
    vega->add_option("--K-max", vega_K_max, "highest strike")->check(CLI::PositiveNumber);
    vega->add_option("--K-step", vega_K_step, "strike step")->check(CLI::PositiveNumber);
    vega->add_option("--T-min", vega_T_min, "shortest maturity (months)")->check(CLI::PositiveNumber);
    vega->add_option("--T-max", vega_T_max, "longest maturity (months)")->check(CLI::PositiveNumber);
    vega->add_option("--T-step", vega_T_step, "maturity step (months)")->check(CLI::PositiveNumber);
    vega->add_option("--output", vega_output, "output CSV path (default: stdout)");

    // ---- convergence ----
    auto* conv = app.add_subcommand("convergence", "price std-dev across seeded trials per path count");
    std::string conv_preset = "equity", conv_output;
    std::string conv_paths_list = "10000,20000,50000,100000,200000,500000,1000000";
    double conv_K = 800.0, conv_r = 0.03, conv_p0 = 0.0, conv_p1 = 0.0, conv_vol_floor = 1e-4;
    int conv_T_months = 60, conv_threads = 1;
    std::size_t conv_trials = 20;
    std::uint64_t conv_seed = 0;
    conv->add_option("--K", conv_K, "strike");
    conv->add_option("--T-months", conv_T_months, "maturity in months")->check(CLI::PositiveNumber);
    conv->add_option("--paths-list", conv_paths_list, "comma-separated path counts");
    conv->add_option("--trials", conv_trials, "trials per path count (>= 2)");
    conv->add_option("--seed", conv_seed, "base seed; trial t uses seed+t");
    conv->add_option("--r", conv_r, "annual rate");
    auto* conv_p0_opt = conv->add_option("--p0", conv_p0, "first starting price");
    auto* conv_p1_opt = conv->add_option("--p1", conv_p1, "second starting price (spot)");
    conv->add_option("--preset", conv_preset, "surrogate preset: equity|fx")
        ->check(CLI::IsMember({"equity", "fx"}));
    conv->add_option("--vol-floor", conv_vol_floor, "per-step volatility floor");
    conv->add_option("--threads", conv_threads, "worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    conv->add_option("--output", conv_output, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sim->parsed()) {
            default_spots(sim_preset, sim_p0, sim_p1, sim_p0_opt->count() > 0,
                          sim_p1_opt->count() > 0);
            if (sim_n < 2) {
                std::cerr << "error: --n must be at least 2\n";
                return kExitConfig;
            }
            if (!(sim_p0 > 0.0) || !(sim_p1 > 0.0)) {
                std::cerr << "error: starting prices must be positive\n";
                return kExitConfig;
            }
            if (sim_xi_opt->count() == 0) sim_xi = sim_preset == "fx" ? 60.0 : 40.0;
            if (sim_nu_opt->count() == 0) sim_nu = sim_preset == "fx" ? -20.0 : -27.0;
            if (!sim_curve_file.empty() && !std::ifstream(sim_curve_file)) {
                std::cerr << "error: cannot open input file: " << sim_curve_file << '\n';
                return kExitConfig;
            }

            std::cerr << "config: simulate preset=" << preset_or_file(sim_preset, sim_curve_file)
                      << " model=" << sim_model << " p0=" << format_double(sim_p0)
                      << " p1=" << format_double(sim_p1) << " n=" << sim_n << " seed=" << sim_seed
                      << " xi=" << format_double(sim_xi) << " nu=" << format_double(sim_nu)
                      << " dt=" << format_double(sim_dt)
                      << " vol_floor=" << format_double(sim_vol_floor)
                      << " output=" << (sim_output.empty() ? "-" : sim_output) << '\n';

            provol::market::ArchModel model = [&] {
                if (sim_model == "derived") {
                    const provol::market::MarketParams params(sim_xi, sim_nu, sim_dt);
                    if (!sim_curve_file.empty())
                        return provol::market::ArchModel::derived(
                            provol::demand::read_curve_file(sim_curve_file), params);
                    return provol::market::ArchModel::derived(sim_preset == "fx"
                                                                  ? provol::demand::fx_preset()
                                                                  : provol::demand::equity_preset(),
                                                              params);
                }
                auto coeffs = surrogates_for(sim_preset);
                return provol::market::ArchModel::surrogate(std::move(coeffs.f_tilde),
                                                            std::move(coeffs.g_tilde), sim_dt,
                                                            sim_vol_floor);
            }();

            const auto path =
                provol::market::simulate_prices(model, sim_p0, sim_p1, sim_n, sim_seed);
            OutputTarget out = open_output(sim_output);
            provol::data::write_series_csv(out.stream(), path);

            double lo = path[0], hi = path[0];
            for (const double p : path) {
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
            std::ostream& summary = out.to_stdout ? std::cerr : std::cout;
            summary << "summary: min=" << format_double(lo) << " max=" << format_double(hi)
                    << " final=" << format_double(path.back()) << '\n';
            return kExitOk;
        }

        if (cal->parsed()) {
            if (!(cal_gamma > 0.0)) {
                std::cerr << "error: --gamma must be positive\n";
                return kExitConfig;
            }
            if (cal_points < 1) {
                std::cerr << "error: --grid-points must be at least 1\n";
                return kExitConfig;
            }
            std::ifstream input(cal_input);
            if (!input) {
                std::cerr << "error: cannot open input file: " << cal_input << '\n';
                return kExitConfig;
            }
            std::cerr << "config: calibrate input=" << cal_input << " S=" << cal_S
                      << " gamma=" << format_double(cal_gamma) << " grid_points=" << cal_points
                      << " trim=" << format_double(cal_trim)
                      << " output=" << (cal_output.empty() ? "-" : cal_output) << '\n';

            auto table = provol::data::read_price_csv(input);
            if (cal_S > 0) table = provol::data::tail(table, cal_S);
            const auto yields = provol::calibration::log_returns(table.prices());
            const auto grid = provol::calibration::default_grid(yields, cal_points, cal_trim);
            const auto est = provol::calibration::estimate_curves(yields, grid, cal_gamma);
            OutputTarget out = open_output(cal_output);
            provol::data::write_regression_csv(out.stream(), est);
            return kExitOk;
        }

        if (price->parsed()) {
            default_spots(price_preset, price_p0, price_p1, price_p0_opt->count() > 0,
                          price_p1_opt->count() > 0);
            std::cerr << "config: price preset=" << price_preset
                      << " K=" << format_double(price_K) << " T_months=" << price_T_months
                      << " r=" << format_double(price_r) << " p0=" << format_double(price_p0)
                      << " p1=" << format_double(price_p1) << " paths=" << price_paths
                      << " seed=" << price_seed << " vol_floor=" << format_double(price_vol_floor)
                      << " antithetic=" << int(price_antithetic) << " threads=" << price_threads
                      << '\n';
            const auto coeffs = surrogates_for(price_preset);
            const provol::pricing::OptionSpec spec{price_K, price_T_months / 12.0, price_r,
                                                   price_p0, price_p1};
            provol::pricing::McConfig config;
            config.paths = price_paths;
            config.seed = price_seed;
            config.threads = price_threads;
            config.vol_floor = price_vol_floor;
            config.antithetic = price_antithetic;
            const auto result =
                provol::pricing::mc_euro_call(coeffs.f_tilde, coeffs.g_tilde, spec, config);
            std::cout << "price=" << format_double(result.price)
                      << " std_error=" << format_double(result.std_error)
                      << " paths=" << result.paths << " clamps=" << result.clamp_count << '\n';
            return kExitOk;
        }

        if (surf->parsed()) {
            default_spots(surf_preset, surf_p0, surf_p1, surf_p0_opt->count() > 0,
                          surf_p1_opt->count() > 0);
            if (surf_K_count < 1 || !(surf_K_min > 0.0) || surf_K_max < surf_K_min) {
                std::cerr << "error: bad strike grid\n";
                return kExitConfig;
            }
            if (surf_T_max < surf_T_min) {
                std::cerr << "error: bad maturity grid\n";
                return kExitConfig;
            }
            std::cerr << "config: ivsurface preset=" << surf_preset
                      << " K=[" << format_double(surf_K_min) << ',' << format_double(surf_K_max)
                      << "]x" << surf_K_count << " T_months=[" << surf_T_min << ':' << surf_T_max
                      << ':' << surf_T_step << "] paths=" << surf_paths << " seed=" << surf_seed
                      << " guard=" << format_double(surf_guard) << " r=" << format_double(surf_r)
                      << " p0=" << format_double(surf_p0) << " p1=" << format_double(surf_p1)
                      << " vol_floor=" << format_double(surf_vol_floor)
                      << " threads=" << surf_threads
                      << " output=" << (surf_output.empty() ? "-" : surf_output) << '\n';

            const auto strikes = linspace(surf_K_min, surf_K_max, surf_K_count);
            std::vector<int> months;
            for (int m = surf_T_min; m <= surf_T_max; m += surf_T_step) months.push_back(m);
            const auto coeffs = surrogates_for(surf_preset);
            const provol::pricing::OptionSpec base{strikes.front(), months.front() / 12.0, surf_r,
                                                   surf_p0, surf_p1};
            provol::pricing::McConfig config;
            config.paths = surf_paths;
            config.seed = surf_seed;
            config.threads = surf_threads;
            config.vol_floor = surf_vol_floor;
            const auto surface = provol::pricing::iv_surface(coeffs.f_tilde, coeffs.g_tilde, base,
                                                             strikes, months, config, surf_guard);
            OutputTarget out = open_output(surf_output);
            provol::data::write_surface_csv(out.stream(), surface);
            return kExitOk;
        }

        if (vega->parsed()) {
            if (vega_K_max < vega_K_min || vega_T_max < vega_T_min) {
                std::cerr << "error: bad grid bounds\n";
                return kExitConfig;
            }
            std::cerr << "config: vegamap sigma=" << format_double(vega_sigma)
                      << " P=" << format_double(vega_P) << " r=" << format_double(vega_r)
                      << " K=[" << format_double(vega_K_min) << ':' << format_double(vega_K_max)
                      << ':' << format_double(vega_K_step) << "] T_months=[" << vega_T_min << ':'
                      << vega_T_max << ':' << vega_T_step
                      << "] output=" << (vega_output.empty() ? "-" : vega_output) << '\n';
            std::vector<double> strikes;
            for (double k = vega_K_min; k <= vega_K_max + 1e-9; k += vega_K_step)
                strikes.push_back(k);
            std::vector<int> months;
            for (int m = vega_T_min; m <= vega_T_max; m += vega_T_step) months.push_back(m);
            const auto map = provol::pricing::vega_map(vega_P, vega_r, vega_sigma, strikes, months);
            OutputTarget out = open_output(vega_output);
            provol::data::write_vega_csv(out.stream(), map);
            return kExitOk;
        }

        if (conv->parsed()) {
            default_spots(conv_preset, conv_p0, conv_p1, conv_p0_opt->count() > 0,
                          conv_p1_opt->count() > 0);
            if (conv_trials < 2) {
                std::cerr << "error: --trials must be at least 2\n";
                return kExitConfig;
            }
            std::vector<std::uint64_t> path_counts;
            try {
                path_counts = parse_uint_list(conv_paths_list);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitConfig;
            }
            std::cerr << "config: convergence preset=" << conv_preset
                      << " K=" << format_double(conv_K) << " T_months=" << conv_T_months
                      << " paths_list=" << conv_paths_list << " trials=" << conv_trials
                      << " seed=" << conv_seed << " r=" << format_double(conv_r)
                      << " p0=" << format_double(conv_p0) << " p1=" << format_double(conv_p1)
                      << " vol_floor=" << format_double(conv_vol_floor)
                      << " threads=" << conv_threads
                      << " output=" << (conv_output.empty() ? "-" : conv_output) << '\n';
            const auto coeffs = surrogates_for(conv_preset);
            const provol::pricing::OptionSpec spec{conv_K, conv_T_months / 12.0, conv_r, conv_p0,
                                                   conv_p1};
            provol::pricing::McConfig config;
            config.threads = conv_threads;
            config.vol_floor = conv_vol_floor;
            const auto rows = provol::pricing::convergence_study(
                coeffs.f_tilde, coeffs.g_tilde, spec, path_counts, conv_trials, conv_seed, config);
            OutputTarget out = open_output(conv_output);
            provol::data::write_convergence_csv(out.stream(), rows);
            return kExitOk;
        }
    } catch (const provol::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
