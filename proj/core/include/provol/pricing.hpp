#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "provol/poly.hpp"

namespace provol::pricing {

// One European call: strike, maturity in years, continuously compounded rate,
// and the spot pair (p0, p1) that fixes both the pricing spot (p1) and the
// initial yield state log(p1/p0) of the simulated dynamics.
struct OptionSpec {
    double strike;
    double maturity_years;
    double rate;
    double p0;
    double p1;
};

// Closed-form Black-Scholes call, C = P*Phi(d1) - K*exp(-rT)*Phi(d2), with the
// normal CDF evaluated through erfc so deep tails keep full relative accuracy.
double bs_call(double P, double K, double r, double T, double sigma);

// Black-Scholes Vega = P * phi(d1) * sqrt(T), evaluated in log space
// (log Vega = log P - d1^2/2 - log(2*pi)/2 + log(T)/2) so it stays positive
// and finite far into the tails where phi(d1) underflows when formed directly.
double bs_vega(double P, double K, double r, double T, double sigma);

enum class IvFailure {
    none,
    arbitrage_bound, // price at or below intrinsic, or at or above spot
    no_bracket,      // no sigma in [1e-4, 5] matches the price
    vega_guard,      // root found but Vega there is below the guard threshold
};

const char* to_string(IvFailure reason);

struct IvResult {
    double sigma = 0.0; // root when one was found (also for vega_guard failures)
    bool valid = false;
    IvFailure reason = IvFailure::none;
    double vega = 0.0; // bs_vega at sigma when a root was found
};

inline constexpr double iv_bracket_lo = 1e-4;
inline constexpr double iv_bracket_hi = 5.0;
inline constexpr double default_vega_guard = 1e-4;

// Implied volatility by bisection on [iv_bracket_lo, iv_bracket_hi] to bracket
// width 1e-10. A root whose Vega is below `guard` is reported as invalid:
// price errors divide by Vega when mapped to volatility errors, so a
// tiny-Vega root is numerically meaningless.
IvResult implied_vol(double price, double P, double K, double r, double T,
                     double guard = default_vega_guard);

struct McConfig {
    std::uint64_t paths = 200000;
    std::uint64_t seed = 0;
    int threads = 1;          // worker count; never changes results
    double vol_floor = 1e-4;  // per-step clamp on the surrogate volatility
    bool antithetic = false;  // pair path 2k+1 with the sign-flipped draws of 2k
};

struct McResult {
    double price = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
    std::uint64_t clamp_count = 0; // per-step vol_floor activations over all paths
};

// Risk-neutral Monte Carlo under the surrogate dynamics
//   log P_{i+1} - log P_i = r*dt - g~(Y_i)^2/2 + g~(Y_i)*eps_i,
// where Y_i is the previous log increment, dt = 1/252, and the per-step
// volatility is max(g~(Y_i), vol_floor). The physical drift f~ does not enter
// the risk-neutral dynamics; it is accepted for interface symmetry only.
// Maturity must be a whole number of steps (months map to 21 steps each).
// Path p uses draw stream p, so results are independent of the worker count,
// and payoff sums are compensated per fixed-size block and combined in block
// order, making the result bit-reproducible for a given (paths, seed).
McResult mc_euro_call(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& spec,
                      const McConfig& config);
McResult mc_euro_put(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& spec,
                     const McConfig& config);

struct IvSurface {
    std::vector<double> strikes;
    std::vector<int> maturities_months;
    std::vector<IvResult> cells;     // row-major: [maturity][strike]
    std::vector<double> mc_prices;   // the per-cell Monte Carlo prices
    std::vector<double> mc_std_errors;

    const IvResult& at(std::size_t t_idx, std::size_t k_idx) const {
        return cells[t_idx * strikes.size() + k_idx];
    }
};

// Monte Carlo price -> implied volatility per (strike, maturity) cell. Cells
// in one maturity row share terminal prices (the per-path streams depend only
// on the seed, so this equals pricing each cell independently, bit for bit).
// Cells failing any implied-vol check are marked invalid with their reason.
IvSurface iv_surface(const Poly& f_tilde, const Poly& g_tilde, const OptionSpec& base,
                     const std::vector<double>& strikes, const std::vector<int>& maturities_months,
                     const McConfig& config, double guard = default_vega_guard);

struct VegaMap {
    std::vector<double> strikes;
    std::vector<int> maturities_months;
    std::vector<double> values; // row-major: [maturity][strike]
};

// bs_vega evaluated on a strike x maturity grid at a fixed volatility.
VegaMap vega_map(double P, double r, double sigma, const std::vector<double>& strikes,
                 const std::vector<int>& maturities_months);

struct ConvergenceRow {
    std::uint64_t paths;
    double std_dev;
};

// Standard deviation of the Monte Carlo price across `trials` independently
// seeded runs, per path count. Trial t runs with master seed `seed + t`;
// the overload taking explicit seeds supports replaying any seed set.
std::vector<ConvergenceRow> convergence_study(const Poly& f_tilde, const Poly& g_tilde,
                                              const OptionSpec& spec,
                                              const std::vector<std::uint64_t>& path_counts,
                                              std::size_t trials, std::uint64_t seed,
                                              const McConfig& base_config = {});
std::vector<ConvergenceRow> convergence_study(const Poly& f_tilde, const Poly& g_tilde,
                                              const OptionSpec& spec,
                                              const std::vector<std::uint64_t>& path_counts,
                                              const std::vector<std::uint64_t>& trial_seeds,
                                              const McConfig& base_config = {});

} // namespace provol::pricing
