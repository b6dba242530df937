#include "provol/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "provol/rng.hpp"

namespace provol::pricing {

namespace {

constexpr double kDt = 1.0 / 252.0;
constexpr int kStepsPerMonth = 21;
constexpr std::uint64_t kBlock = 4096; // fixed reduction unit; independent of worker count
const double kSqrt2 = std::sqrt(2.0);
const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double d1_of(double P, double K, double r, double T, double sigma) {
    const double st = sigma * std::sqrt(T);
    return (std::log(P / K) + (r + 0.5 * sigma * sigma) * T) / st;
}

void validate_bs_inputs(double P, double K, double r, double T, double sigma) {
    (void)r;
    if (!(P > 0.0) || !(K > 0.0) || !(T > 0.0) || !(sigma > 0.0))
        throw std::domain_error("Black-Scholes inputs P, K, T, sigma must be positive");
}

// Compensated (Kahan) accumulator.
struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct PathParams {
    const Poly* g_tilde;
    double r_dt;
    double vol_floor;
    int steps;
    double y0;
    double log_p1;
    std::uint64_t seed;
    bool antithetic;
};

// Terminal price of path p: iterate the risk-neutral log increment
// r*dt - g^2/2 + g*eps with the state equal to the previous increment.
double terminal_price(const PathParams& pp, std::uint64_t p, std::uint64_t& clamps) {
    const std::uint64_t stream = pp.antithetic ? (p >> 1) : p;
    const bool negate = pp.antithetic && (p & 1u);
    rng::NormalStream draws(pp.seed, stream);
    double y = pp.y0;
    double logp = pp.log_p1;
    for (int j = 0; j < pp.steps; ++j) {
        double gt = (*pp.g_tilde)(y);
        if (gt < pp.vol_floor) {
            gt = pp.vol_floor;
            ++clamps;
        }
        const double eps = negate ? -draws.next() : draws.next();
        const double inc = pp.r_dt - 0.5 * gt * gt + gt * eps;
        logp += inc;
        y = inc;
    }
    return std::exp(logp);
}

// Fill `terminals[p]` for p in [0, paths); workers split the index range but
// every path's draws depend only on (seed, p), so the layout cannot matter.
std::uint64_t simulate_terminals(const PathParams& pp, std::uint64_t paths, int threads,
                                 std::vector<double>& terminals) {
    terminals.resize(paths);
    if (threads <= 1 || paths < 2 * kBlock) {
        std::uint64_t clamps = 0;
        for (std::uint64_t p = 0; p < paths; ++p) terminals[p] = terminal_price(pp, p, clamps);
        return clamps;
    }
    const int workers = std::min<int>(threads, 64);
    std::vector<std::uint64_t> clamp_parts(static_cast<std::size_t>(workers), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::uint64_t clamps = 0;
            const std::uint64_t n_blocks = (paths + kBlock - 1) / kBlock;
            for (std::uint64_t b = static_cast<std::uint64_t>(w); b < n_blocks;
                 b += static_cast<std::uint64_t>(workers)) {
                const std::uint64_t lo = b * kBlock;
                const std::uint64_t hi = std::min(paths, lo + kBlock);
                for (std::uint64_t p = lo; p < hi; ++p)
                    terminals[p] = terminal_price(pp, p, clamps);
            }
            clamp_parts[static_cast<std::size_t>(w)] = clamps;
        });
    }
    for (auto& t : pool) t.join();
    std::uint64_t total = 0;
    for (const std::uint64_t c : clamp_parts) total += c;
    return total;
}

// Payoff mean and standard error, accumulated per fixed-size block with
// compensated sums and merged in block order: bit-identical results for any
// worker count.
template <typename Payoff>
void reduce_payoffs(const std::vector<double>& terminals, Payoff payoff, double discount,
                    double& price, double& std_error) {
    const std::uint64_t paths = terminals.size();
    Kahan total, total_sq;
    for (std::uint64_t lo = 0; lo < paths; lo += kBlock) {
        const std::uint64_t hi = std::min<std::uint64_t>(paths, lo + kBlock);
        Kahan block, block_sq;
        for (std::uint64_t p = lo; p < hi; ++p) {
            const double x = payoff(terminals[p]);
            block.add(x);
            block_sq.add(x * x);
        }
        total.add(block.sum);
        total_sq.add(block_sq.sum);
    }
    const double n = static_cast<double>(paths);
    const double mean = total.sum / n;
    price = discount * mean;
    if (paths > 1) {
        const double var = std::max(0.0, (total_sq.sum - n * mean * mean) / (n - 1.0));
        std_error = discount * std::sqrt(var / n);
    } else {
        std_error = 0.0;
    }
}

int maturity_steps(double maturity_years) {
    const double exact = maturity_years * 252.0;
    const long steps = std::lround(exact);
    if (steps < 1 || std::fabs(exact - static_cast<double>(steps)) > 1e-6)
        throw std::domain_error(
            "maturity must be a whole number of 1/252 steps (whole months map to 21 steps each)");
    return static_cast<int>(steps);
}

void validate_mc_spec(const OptionSpec& spec, const McConfig& config) {
    if (!(spec.p0 > 0.0) || !(spec.p1 > 0.0))
        throw std::domain_error("mc pricing: spot pair must be positive");
    if (!(spec.strike >= 0.0)) throw std::domain_error("mc pricing: strike must be >= 0");
    if (!(spec.maturity_years > 0.0)) throw std::domain_error("mc pricing: maturity must be positive");
    if (config.paths < 1) throw std::domain_error("mc pricing: need at least one path");
    if (config.vol_floor < 0.0) throw std::domain_error("mc pricing: vol_floor must be >= 0");
}

PathParams make_path_params(const Poly& g_tilde, const OptionSpec& spec, const McConfig& config,
                            int steps) {
    return PathParams{&g_tilde,
                      spec.rate * kDt,
                      config.vol_floor,
                      steps,
                      std::log(spec.p1 / spec.p0),
                      std::log(spec.p1),
                      config.seed,
                      config.antithetic};
}

McResult mc_euro_option(const Poly& g_tilde, const OptionSpec& spec, const McConfig& config,
                        bool call) {
    validate_mc_spec(spec, config);
    const int steps = maturity_steps(spec.maturity_years);
    const PathParams pp = make_path_params(g_tilde, spec, config, steps);

    std::vector<double> terminals;
    const std::uint64_t clamps = simulate_terminals(pp, config.paths, config.threads, terminals);

    const double discount = std::exp(-spec.rate * spec.maturity_years);
    const double K = spec.strike;
    McResult result;
    result.paths = config.paths;
    result.clamp_count = clamps;
    if (call) {
        reduce_payoffs(
            terminals, [K](double s) { return s > K ? s - K : 0.0; }, discount, result.price,
            result.std_error);
    } else {
        reduce_payoffs(
            terminals, [K](double s) { return K > s ? K - s : 0.0; }, discount, result.price,
            result.std_error);
    }
    return result;
}

} // namespace

double bs_call(double P, double K, double r, double T, double sigma) {
    validate_bs_inputs(P, K, r, T, sigma);
    const double d1 = d1_of(P, K, r, T, sigma);
    const double d2 = d1 - sigma * std::sqrt(T);
    return P * norm_cdf(d1) - K * std::exp(-r * T) * norm_cdf(d2);
}

double bs_vega(double P, double K, double r, double T, double sigma) {
    validate_bs_inputs(P, K, r, T, sigma);
    const double d1 = d1_of(P, K, r, T, sigma);
    // log Vega = log P - d1^2/2 - log(2*pi)/2 + log(T)/2 keeps the far tail
    // positive where phi(d1) alone would underflow.
    return std::exp(std::log(P) - 0.5 * d1 * d1 - kHalfLog2Pi + 0.5 * std::log(T));
}

const char* to_string(IvFailure reason) {
    switch (reason) {
        case IvFailure::none: return "";
        case IvFailure::arbitrage_bound: return "arbitrage-bound";
        case IvFailure::no_bracket: return "no-bracket";
        case IvFailure::vega_guard: return "vega-guard";
    }
    return "";
}

IvResult implied_vol(double price, double P, double K, double r, double T, double guard) {
    if (!(P > 0.0) || !(K > 0.0) || !(T > 0.0))
        throw std::domain_error("implied_vol: P, K, T must be positive");
    if (!std::isfinite(price)) throw std::domain_error("implied_vol: price must be finite");
    if (guard < 0.0) throw std::domain_error("implied_vol: guard must be >= 0");

    IvResult out;
    const double intrinsic = std::max(P - K * std::exp(-r * T), 0.0);
    if (price <= intrinsic || price >= P) {
        out.reason = IvFailure::arbitrage_bound;
        return out;
    }
    double lo = iv_bracket_lo, hi = iv_bracket_hi;
    if (bs_call(P, K, r, T, lo) > price || bs_call(P, K, r, T, hi) < price) {
        out.reason = IvFailure::no_bracket;
        return out;
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (bs_call(P, K, r, T, mid) < price)
            lo = mid;
        else
            hi = mid;
    }
    out.sigma = 0.5 * (lo + hi);
    out.vega = bs_vega(P, K, r, T, out.sigma);
    if (out.vega < guard) {
        out.reason = IvFailure::vega_guard;
        return out;
    }
    out.valid = true;
    out.reason = IvFailure::none;
    return out;
}

McResult mc_euro_call(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& spec,
                      const McConfig& config) {
    (void)f_tilde; // the physical drift plays no part under the risk-neutral measure
    return mc_euro_option(g_tilde, spec, config, /*call=*/true);
}

McResult mc_euro_put(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& spec,
                     const McConfig& config) {
    (void)f_tilde;
    return mc_euro_option(g_tilde, spec, config, /*call=*/false);
}

IvSurface iv_surface(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& base,
                     const std::vector<double>& strikes, const std::vector<int>& maturities_months,
                     const McConfig& config, double guard) {
    (void)f_tilde;
    if (strikes.empty() || maturities_months.empty())
        throw std::invalid_argument("iv_surface: grids must be nonempty");
    for (const double K : strikes)
        if (!(K > 0.0)) throw std::domain_error("iv_surface: strikes must be positive");
    for (const int m : maturities_months)
        if (m < 1) throw std::domain_error("iv_surface: maturities must be >= 1 month");

    IvSurface surface;
    surface.strikes = strikes;
    surface.maturities_months = maturities_months;
    surface.cells.resize(strikes.size() * maturities_months.size());
    surface.mc_prices.resize(surface.cells.size());
    surface.mc_std_errors.resize(surface.cells.size());

    std::vector<double> terminals;
    for (std::size_t t_idx = 0; t_idx < maturities_months.size(); ++t_idx) {
        const int months = maturities_months[t_idx];
        const double T = static_cast<double>(months) / 12.0;
        OptionSpec spec = base;
        spec.maturity_years = T;
        spec.strike = strikes.front();
        validate_mc_spec(spec, config);

        // One simulation per maturity: every strike in the row reads the same
        // terminal prices, which is exactly what per-cell pricing would do
        // anyway (path p's draws depend only on the seed and p).
        const PathParams pp = make_path_params(g_tilde, spec, config, months * kStepsPerMonth);
        simulate_terminals(pp, config.paths, config.threads, terminals);
        const double discount = std::exp(-spec.rate * T);

        for (std::size_t k_idx = 0; k_idx < strikes.size(); ++k_idx) {
            const double K = strikes[k_idx];
            double price, std_error;
            reduce_payoffs(
                terminals, [K](double s) { return s > K ? s - K : 0.0; }, discount, price,
                std_error);
            const std::size_t cell = t_idx * strikes.size() + k_idx;
            surface.mc_prices[cell] = price;
            surface.mc_std_errors[cell] = std_error;
            surface.cells[cell] = implied_vol(price, base.p1, K, base.rate, T, guard);
        }
    }
    return surface;
}

VegaMap vega_map(double P, double r, double sigma, const std::vector<double>& strikes,
                 const std::vector<int>& maturities_months) {
    if (strikes.empty() || maturities_months.empty())
        throw std::invalid_argument("vega_map: grids must be nonempty");
    VegaMap map;
    map.strikes = strikes;
    map.maturities_months = maturities_months;
    map.values.resize(strikes.size() * maturities_months.size());
    for (std::size_t t_idx = 0; t_idx < maturities_months.size(); ++t_idx) {
        const double T = static_cast<double>(maturities_months[t_idx]) / 12.0;
        for (std::size_t k_idx = 0; k_idx < strikes.size(); ++k_idx)
            map.values[t_idx * strikes.size() + k_idx] = bs_vega(P, strikes[k_idx], r, T, sigma);
    }
    return map;
}

std::vector<ConvergenceRow> convergence_study(const Poly& f_tilde, const Poly& g_tilde,
                                              const OptionSpec& spec,
                                              const std::vector<std::uint64_t>& path_counts,
                                              std::size_t trials, std::uint64_t seed,
                                              const McConfig& base_config) {
    std::vector<std::uint64_t> trial_seeds(trials);
    for (std::size_t t = 0; t < trials; ++t) trial_seeds[t] = seed + t;
    return convergence_study(f_tilde, g_tilde, spec, path_counts, trial_seeds, base_config);
}

std::vector<ConvergenceRow> convergence_study(const Poly& f_tilde, const Poly& g_tilde,
                                              const OptionSpec& spec,
                                              const std::vector<std::uint64_t>& path_counts,
                                              const std::vector<std::uint64_t>& trial_seeds,
                                              const McConfig& base_config) {
    if (trial_seeds.size() < 2)
        throw std::invalid_argument("convergence_study: need at least two trials");
    std::vector<ConvergenceRow> rows;
    rows.reserve(path_counts.size());
    for (const std::uint64_t paths : path_counts) {
        std::vector<double> prices;
        prices.reserve(trial_seeds.size());
        for (const std::uint64_t trial_seed : trial_seeds) {
            McConfig config = base_config;
            config.paths = paths;
            config.seed = trial_seed;
            prices.push_back(mc_euro_call(f_tilde, g_tilde, spec, config).price);
        }
        double mean = 0.0;
        for (const double p : prices) mean += p;
        mean /= static_cast<double>(prices.size());
        double ss = 0.0;
        for (const double p : prices) ss += (p - mean) * (p - mean);
        rows.push_back({paths, std::sqrt(ss / static_cast<double>(prices.size() - 1))});
    }
    return rows;
}

} // namespace provol::pricing
