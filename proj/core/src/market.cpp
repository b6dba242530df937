#include "provol/market.hpp"

#include <cmath>
#include <stdexcept>

#include "provol/rng.hpp"

namespace provol::market {

namespace {
const double kSqrt252 = std::sqrt(252.0);
}

MarketParams::MarketParams(double xi_, double nu_, double dt_, double clearing_const_)
    : xi(xi_), nu(nu_), dt(dt_), clearing_const(clearing_const_) {
    if (!(xi > 0.0)) throw std::invalid_argument("MarketParams: xi must be positive");
    if (!(nu < 0.0)) throw std::invalid_argument("MarketParams: nu must be negative");
    if (!(dt > 0.0)) throw std::invalid_argument("MarketParams: dt must be positive");
}

ArchModel ArchModel::derived(const demand::DemandCurve& curve, const MarketParams& params) {
    ArchModel model;
    model.curve_ = std::make_shared<const demand::DemandCurve>(curve);
    model.params_ = params;
    model.dt_ = params.dt;
    model.vol_floor_ = 0.0; // g > 0 holds structurally; no clamp needed
    return model;
}

ArchModel ArchModel::surrogate(Poly f_tilde, Poly g_tilde, double dt, double vol_floor) {
    if (!(dt > 0.0)) throw std::invalid_argument("ArchModel: dt must be positive");
    if (vol_floor < 0.0) throw std::invalid_argument("ArchModel: vol_floor must be >= 0");
    ArchModel model;
    model.f_tilde_ = std::move(f_tilde);
    model.g_tilde_ = std::move(g_tilde);
    model.dt_ = dt;
    model.vol_floor_ = vol_floor;
    return model;
}

double ArchModel::f(double y) const {
    if (curve_) {
        const double slope = curve_->eval_d2_slope(y);
        return (slope * y - curve_->eval_d1(y) * params_.dt) / (params_.xi + slope);
    }
    return f_tilde_(y);
}

double ArchModel::g(double y) const {
    if (curve_) {
        const double slope = curve_->eval_d2_slope(y);
        return -params_.nu / (kSqrt252 * (params_.xi + slope));
    }
    const double value = g_tilde_(y);
    return value < vol_floor_ ? vol_floor_ : value;
}

double step(const ArchModel& model, double y, double eps) {
    return model.f(y) + model.g(y) * eps;
}

YieldSeries simulate_yields(const ArchModel& model, double y0, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_yields: need n >= 1");
    YieldSeries ys(n);
    ys[0] = y0;
    rng::NormalStream draws(seed, /*stream=*/0);
    for (std::size_t i = 1; i < n; ++i) ys[i] = step(model, ys[i - 1], draws.next());
    return ys;
}

PriceSeries simulate_prices(const ArchModel& model, double p0, double p1, std::size_t n,
                            std::uint64_t seed) {
    if (!(p0 > 0.0) || !(p1 > 0.0))
        throw std::domain_error("simulate_prices: starting prices must be positive");
    if (n < 2) throw std::invalid_argument("simulate_prices: need n >= 2");
    PriceSeries ps(n);
    ps[0] = p0;
    ps[1] = p1;
    double y = std::log(p1 / p0);
    rng::NormalStream draws(seed, /*stream=*/0);
    for (std::size_t i = 2; i < n; ++i) {
        y = step(model, y, draws.next());
        ps[i] = ps[i - 1] * std::exp(y);
    }
    return ps;
}

double clearing_residual(const demand::DemandCurve& curve, const MarketParams& params, double y_i,
                         double y_next, double dW) {
    return params.nu * dW + params.xi * y_next + curve.eval_d1(y_i) * params.dt +
           curve.eval_d2_slope(y_i) * (y_next - y_i);
}

} // namespace provol::market
