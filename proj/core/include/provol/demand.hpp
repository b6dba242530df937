#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "provol/poly.hpp"

namespace provol::demand {

// Piecewise polynomial over half-open intervals: segment k applies on
// [breakpoints[k-1], breakpoints[k]), the first segment on (-inf, breakpoints[0]),
// the last on [breakpoints.back(), +inf). At a breakpoint the right segment wins.
struct PiecewisePoly {
    std::vector<double> breakpoints; // strictly ascending
    std::vector<Poly> segments;      // size = breakpoints.size() + 1

    std::size_t segment_index(double y) const;
    double operator()(double y) const; // throws std::domain_error on non-finite y
};

// Two-sided stretched exponential around a center:
//   s(y) = amp * exp(-left_rate  * (center - y)^left_pow)   for y <  center
//   s(y) = amp * exp(-right_rate * (y - center)^right_pow)  for y >= center
// Continuous at the center (both branches equal amp), strictly positive,
// strictly decreasing in |y - center| on each side.
struct StretchedExpPair {
    double center = 0.0;
    double amp = 1.0;
    double left_rate = 1.0, left_pow = 1.0;
    double right_rate = 1.0, right_pow = 1.0;

    double operator()(double y) const; // throws std::domain_error on non-finite y
};

// Discontinuity found at a piecewise breakpoint: limit from the left vs the
// value of the segment that owns the point.
struct ContinuityGap {
    double y;
    double left;
    double right;
    double jump() const { return right - left; }
};

// One market's demand description: the excess-demand rate D1, the
// cumulative-demand slope D2', and the cumulative demand D2 obtained by
// integrating D2' from an anchor where D2 = 0. D2 is cached at construction as
// a cumulative Simpson table on a uniform grid and evaluated by linear
// interpolation; queries outside the table range are refused (no extrapolation).
class DemandCurve {
public:
    // Builds the D2 table over [lo, hi] with `points` nodes (composite Simpson
    // per cell), shifted so the interpolated value at `anchor` is zero.
    DemandCurve(PiecewisePoly d1, StretchedExpPair d2_slope, double anchor,
                double lo = -0.2, double hi = 0.2, std::size_t points = 320001);

    double eval_d1(double y) const { return d1_(y); }
    double eval_d2_slope(double y) const { return d2_slope_(y); }
    double eval_d2(double y) const; // throws std::out_of_range outside the table

    const PiecewisePoly& d1() const { return d1_; }
    const StretchedExpPair& d2_slope() const { return d2_slope_; }
    double d2_anchor() const { return anchor_; }
    double table_lo() const { return lo_; }
    double table_hi() const { return hi_; }
    std::size_t table_points() const { return table_->size(); }

    // Left/right values of D1 at each breakpoint where they disagree beyond
    // 1e-12 relative; the published coefficient sets are not all continuous and
    // are evaluated verbatim rather than repaired.
    std::vector<ContinuityGap> continuity_report() const;

private:
    PiecewisePoly d1_;
    StretchedExpPair d2_slope_;
    double anchor_;
    double lo_, hi_, step_;
    std::shared_ptr<const std::vector<double>> table_; // cumulative integral values
};

// Equity-market preset: cubic/quadratic excess-demand segments with
// breakpoints [-0.0286, 0, 0.0648]; D2' centered at 0.008 with amplitude 110,
// decay (150, 1.5) on the left and (40, 1.3) on the right; D2(0.008) = 0.
const DemandCurve& equity_preset();

// FX preset: two cubic excess-demand branches split at 0 (the published
// branches jump there; see continuity_report); D2' centered at -0.002 with
// amplitude 220, decay (250, 1.36) left and (100, 1.35) right; D2(-0.002) = 0.
const DemandCurve& fx_preset();

// Plain-text curve file with [d1] and [d2slope] sections; see the README for
// the grammar. Reading rebuilds the D2 table.
DemandCurve read_curve_file(std::istream& in);
DemandCurve read_curve_file(const std::string& path);
void write_curve_file(const DemandCurve& curve, std::ostream& out);
void write_curve_file(const DemandCurve& curve, const std::string& path);

} // namespace provol::demand
