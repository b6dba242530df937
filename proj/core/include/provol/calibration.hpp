#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "provol/market.hpp"
#include "provol/poly.hpp"

namespace provol::calibration {

// Variance estimates below this are clamped (and flagged); a kernel-weighted
// difference of two fits can go slightly negative in sparse regions.
inline constexpr double g2_floor = 1e-10;

// A grid point's local fit is marked invalid when the total kernel weight at
// that point is below this fraction of the sample size (boundary effect).
inline constexpr double min_weight_fraction = 1e-6;

// Y_i = log(P_i) - log(P_{i-1}); length is len(prices) - 1.
market::YieldSeries log_returns(const market::PriceSeries& prices);

// Kernel bandwidth h = (max(Y) - min(Y)) / gamma.
double bandwidth(const market::YieldSeries& yields, double gamma);

struct LocalFit {
    double alpha1; // weighted local quadratic intercept fitted to Y_i^2
    double beta1;  // weighted local quadratic intercept fitted to Y_i
    double weight_sum;
};

// Kernel-weighted local quadratic fit at x over the lagged pairs
// (Y_{i-1}, Y_i): with u = (Y_{i-1} - x)/h and standard normal pdf weights
// K(u), both targets are regressed on the basis [1, u, u^2/2] by a pivoted
// orthogonal factorization. The drift estimate is beta1, the conditional
// second moment alpha1, and g2 = alpha1 - beta1^2.
LocalFit local_fit(const market::YieldSeries& yields, double x, double h);

struct RegressionEstimate {
    std::vector<double> grid;
    std::vector<double> f_hat;        // beta1 per grid point
    std::vector<double> g2_hat;       // alpha1 - beta1^2, clamped at g2_floor
    std::vector<unsigned char> clamped; // 1 where the floor was applied
    std::vector<unsigned char> valid;   // 0 where the local fit was refused
    double h = 0.0;
    double gamma = 0.0;
    std::size_t sample_size = 0;
};

// Default evaluation grid: `points` equispaced values over the yield range
// trimmed by `trim` (fraction of the range) on each side.
std::vector<double> default_grid(const market::YieldSeries& yields, std::size_t points = 101,
                                 double trim = 0.01);

// local_fit on every grid point; per-point failures mark the point invalid
// instead of aborting the sweep.
RegressionEstimate estimate_curves(const market::YieldSeries& yields,
                                   const std::vector<double>& grid, double gamma);

// Ordinary least-squares polynomial fit (constant-first), solved by a
// rank-revealing orthogonal factorization. Throws singular_fit_error when the
// design cannot determine degree+1 coefficients.
Poly fit_poly(const std::vector<double>& xs, const std::vector<double>& ys, int degree);

// Published surrogate coefficient sets for the two preset markets:
// { f_tilde, g_tilde }, quartic/quartic for equity and linear/quintic for FX.
std::pair<Poly, Poly> equity_surrogates();
std::pair<Poly, Poly> fx_surrogates();

} // namespace provol::calibration
