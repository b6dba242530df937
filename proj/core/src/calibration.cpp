#include "provol/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "provol/errors.hpp"

namespace provol::calibration {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);

// Weighted least squares on the leading `cols` columns of the scaled design,
// solving both targets with one factorization. Returns the intercepts.
struct RestrictedFit {
    double alpha1;
    double beta1;
    double rel_residual; // worst of the two targets, relative to target norm
};

RestrictedFit solve_leading(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::Index cols) {
    const Eigen::MatrixXd Asub = A.leftCols(cols);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Asub);
    const Eigen::MatrixXd sol = qr.solve(B);
    const Eigen::MatrixXd resid = Asub * sol - B;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        const double scale = B.col(j).norm() + std::numeric_limits<double>::min();
        worst = std::max(worst, resid.col(j).norm() / scale);
    }
    return {sol(0, 1), sol(0, 0), worst};
}

} // namespace

market::YieldSeries log_returns(const market::PriceSeries& prices) {
    if (prices.size() < 2) throw std::invalid_argument("log_returns: need at least two prices");
    market::YieldSeries ys(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        if (!(prices[i - 1] > 0.0) || !(prices[i] > 0.0))
            throw std::domain_error("log_returns: prices must be positive");
        ys[i - 1] = std::log(prices[i]) - std::log(prices[i - 1]);
    }
    return ys;
}

double bandwidth(const market::YieldSeries& yields, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("bandwidth: gamma must be positive");
    if (yields.empty()) throw std::invalid_argument("bandwidth: empty series");
    const auto [lo, hi] = std::minmax_element(yields.begin(), yields.end());
    if (!(*hi > *lo))
        throw degenerate_data_error("bandwidth: series spans no range (max == min)");
    return (*hi - *lo) / gamma;
}

LocalFit local_fit(const market::YieldSeries& yields, double x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("local_fit: bandwidth must be positive");
    if (yields.size() < 2) throw std::invalid_argument("local_fit: need at least one lagged pair");
    const std::size_t n = yields.size() - 1;

    // Rows sqrt(w)*[1, u, u^2/2] against targets sqrt(w)*Y and sqrt(w)*Y^2,
    // with u = (Y_{i-1} - x)/h and standard normal pdf weights.
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 3);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(n), 2);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (yields[i] - x) / h;
        const double w = kInvSqrt2Pi * std::exp(-0.5 * u * u);
        weight_sum += w;
        const double sw = std::sqrt(w);
        const double target = yields[i + 1];
        const auto row = static_cast<Eigen::Index>(i);
        A(row, 0) = sw;
        A(row, 1) = sw * u;
        A(row, 2) = sw * (0.5 * u * u);
        B(row, 0) = sw * target;
        B(row, 1) = sw * target * target;
    }
    if (!(weight_sum > 0.0))
        throw singular_fit_error("local_fit: all kernel weights underflowed to zero");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() == 3) {
        const Eigen::MatrixXd sol = qr.solve(B);
        return {sol(0, 1), sol(0, 0), weight_sum};
    }

    // Rank-deficient design (e.g. every predictor coincides). Retry on the
    // leading basis columns: if a constant or linear fit already explains the
    // data exactly (constant series being the canonical case), its intercept
    // is the answer; otherwise no local curve is identifiable here.
    for (Eigen::Index cols = std::max<Eigen::Index>(qr.rank(), 1); cols >= 1; --cols) {
        const RestrictedFit fit = solve_leading(A, B, cols);
        if (fit.rel_residual <= 1e-8) return {fit.alpha1, fit.beta1, weight_sum};
    }
    throw singular_fit_error("local_fit: design is rank-deficient and no restricted fit is exact");
}

std::vector<double> default_grid(const market::YieldSeries& yields, std::size_t points,
                                 double trim) {
    if (points < 1) throw std::invalid_argument("default_grid: need at least one point");
    if (yields.empty()) throw std::invalid_argument("default_grid: empty series");
    const auto [lo_it, hi_it] = std::minmax_element(yields.begin(), yields.end());
    const double range = *hi_it - *lo_it;
    if (!(range > 0.0))
        throw degenerate_data_error("default_grid: series spans no range (max == min)");
    const double lo = *lo_it + trim * range;
    const double hi = *hi_it - trim * range;
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = 0.5 * (lo + hi);
        return grid;
    }
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) grid[k] = lo + step * static_cast<double>(k);
    return grid;
}

RegressionEstimate estimate_curves(const market::YieldSeries& yields,
                                   const std::vector<double>& grid, double gamma) {
    if (grid.empty()) throw std::invalid_argument("estimate_curves: empty grid");
    RegressionEstimate est;
    est.grid = grid;
    est.gamma = gamma;
    est.sample_size = yields.size();
    est.h = bandwidth(yields, gamma);
    est.f_hat.resize(grid.size());
    est.g2_hat.resize(grid.size());
    est.clamped.assign(grid.size(), 0);
    est.valid.assign(grid.size(), 1);

    const double min_weight = min_weight_fraction * static_cast<double>(yields.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        try {
            const LocalFit fit = local_fit(yields, grid[k], est.h);
            if (fit.weight_sum < min_weight) {
                est.valid[k] = 0;
                est.f_hat[k] = nan;
                est.g2_hat[k] = nan;
                continue;
            }
            est.f_hat[k] = fit.beta1;
            const double g2 = fit.alpha1 - fit.beta1 * fit.beta1;
            if (g2 < g2_floor) {
                est.g2_hat[k] = g2_floor;
                est.clamped[k] = 1;
            } else {
                est.g2_hat[k] = g2;
            }
        } catch (const singular_fit_error&) {
            est.valid[k] = 0;
            est.f_hat[k] = nan;
            est.g2_hat[k] = nan;
        }
    }
    return est;
}

Poly fit_poly(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
    if (degree < 0) throw std::invalid_argument("fit_poly: degree must be >= 0");
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_poly: size mismatch");
    const auto cols = static_cast<Eigen::Index>(degree) + 1;
    if (static_cast<Eigen::Index>(xs.size()) < cols)
        throw singular_fit_error("fit_poly: fewer points than coefficients");

    Eigen::MatrixXd A(static_cast<Eigen::Index>(xs.size()), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double pow = 1.0;
        const auto row = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < cols; ++j) {
            A(row, j) = pow;
            pow *= xs[i];
        }
        b(row) = ys[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < cols)
        throw singular_fit_error("fit_poly: design is rank-deficient (coincident points?)");
    const Eigen::VectorXd sol = qr.solve(b);
    return Poly{std::vector<double>(sol.data(), sol.data() + sol.size())};
}

std::pair<Poly, Poly> equity_surrogates() {
    return {Poly{{-8.948e-5, -7.557e-2, 0.8305, -13.60, 52.84}},
            Poly{{1.288e-2, -0.1138, 5.503, 6.492, -3.306e2}}};
}

std::pair<Poly, Poly> fx_surrogates() {
    return {Poly{{0.0, 0.33}},
            Poly{{4.328e-3, 6.422e-2, 15.73, -2.934e2, -6.987e3, 1.542e5}}};
}

} // namespace provol::calibration
