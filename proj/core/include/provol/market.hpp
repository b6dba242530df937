#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "provol/demand.hpp"
#include "provol/poly.hpp"

namespace provol::market {

using YieldSeries = std::vector<double>;
using PriceSeries = std::vector<double>;

// Market-clearing weights: xi > 0 is the trend-chasing weight, nu < 0 the
// noise-trader weight, dt the step length in years. clearing_const is the
// constant level of the clearing condition; it cancels when the condition is
// differenced and is recorded for documentation only.
struct MarketParams {
    double xi;
    double nu;
    double dt = 1.0 / 252.0;
    double clearing_const = 0.0;

    MarketParams(double xi_, double nu_, double dt_ = 1.0 / 252.0, double clearing_const_ = 0.0);
};

// The yield recursion Y_{i+1} = f(Y_i) + g(Y_i) * eps_i, with eps_i ~ N(0,1).
//
// Two variants share the interface:
//  - derived: f and g come from a demand curve through the cleared market,
//      f(y) = (D2'(y)*y - D1(y)*dt) / (xi + D2'(y))
//      g(y) = -nu / (sqrt(252) * (xi + D2'(y)))   (> 0 since nu < 0, D2' > 0)
//  - surrogate: f and g are polynomial stand-ins; g is clamped below at
//    vol_floor per step because a fitted polynomial can go negative in the
//    tails. Clamp events in simulations are counted by the pricing engine.
class ArchModel {
public:
    static ArchModel derived(const demand::DemandCurve& curve, const MarketParams& params);
    static ArchModel surrogate(Poly f_tilde, Poly g_tilde, double dt = 1.0 / 252.0,
                               double vol_floor = 1e-4);

    double f(double y) const;
    double g(double y) const; // floored for surrogates; positive by construction when derived

    bool is_derived() const { return curve_ != nullptr; }
    double dt() const { return dt_; }
    double vol_floor() const { return vol_floor_; }
    const Poly& f_tilde() const { return f_tilde_; }
    const Poly& g_tilde() const { return g_tilde_; }
    const demand::DemandCurve& curve() const { return *curve_; }
    const MarketParams& params() const { return params_; }

private:
    ArchModel() : params_(1.0, -1.0) {}

    std::shared_ptr<const demand::DemandCurve> curve_; // null for surrogate models
    MarketParams params_;
    Poly f_tilde_, g_tilde_;
    double dt_ = 1.0 / 252.0;
    double vol_floor_ = 0.0;
};

// One transition: f(y) + g(y) * eps.
double step(const ArchModel& model, double y, double eps);

// Iterates the recursion n-1 times from y0. Sample k (k >= 1) consumes normal
// draw k-1 of stream 0 under `seed`, so equal seeds give bit-identical series.
YieldSeries simulate_yields(const ArchModel& model, double y0, std::size_t n, std::uint64_t seed);

// Price path seeded by two starting prices: the initial yield state is
// log(p1/p0) and P_{i+1} = P_i * exp(Y_{i+1}). First two entries are p0, p1.
PriceSeries simulate_prices(const ArchModel& model, double p0, double p1, std::size_t n,
                            std::uint64_t seed);

// Left-hand side of the differenced clearing condition,
//   nu*dW + xi*y_next + D1(y_i)*dt + D2'(y_i)*(y_next - y_i),
// which is zero (to rounding) whenever y_next came from `step` with
// eps = sqrt(252)*dW.
double clearing_residual(const demand::DemandCurve& curve, const MarketParams& params,
                         double y_i, double y_next, double dW);

} // namespace provol::market
