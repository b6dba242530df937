#include "provol/demand.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "provol/errors.hpp"

namespace provol::demand {

namespace {

void require_finite(double y, const char* what) {
    if (!std::isfinite(y)) throw std::domain_error(std::string(what) + ": argument must be finite");
}

} // namespace

std::size_t PiecewisePoly::segment_index(double y) const {
    // First breakpoint strictly greater than y; y == breakpoint belongs to the
    // segment on the right of it (half-open [b, next) intervals).
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), y);
    return static_cast<std::size_t>(it - breakpoints.begin());
}

double PiecewisePoly::operator()(double y) const {
    require_finite(y, "PiecewisePoly");
    return segments[segment_index(y)](y);
}

double StretchedExpPair::operator()(double y) const {
    require_finite(y, "StretchedExpPair");
    const double d = y - center;
    if (d < 0.0) return amp * std::exp(-left_rate * std::pow(-d, left_pow));
    return amp * std::exp(-right_rate * std::pow(d, right_pow));
}

DemandCurve::DemandCurve(PiecewisePoly d1, StretchedExpPair d2_slope, double anchor, double lo,
                         double hi, std::size_t points)
    : d1_(std::move(d1)), d2_slope_(d2_slope), anchor_(anchor), lo_(lo), hi_(hi) {
    if (!(lo < hi) || points < 2) throw std::invalid_argument("DemandCurve: bad table range");
    if (!(anchor >= lo && anchor <= hi))
        throw std::invalid_argument("DemandCurve: anchor outside table range");
    if (!std::is_sorted(d1_.breakpoints.begin(), d1_.breakpoints.end()) ||
        std::adjacent_find(d1_.breakpoints.begin(), d1_.breakpoints.end()) !=
            d1_.breakpoints.end())
        throw std::invalid_argument("DemandCurve: breakpoints must be strictly ascending");
    if (d1_.segments.size() != d1_.breakpoints.size() + 1)
        throw std::invalid_argument("DemandCurve: need one more segment than breakpoints");
    if (!(d2_slope_.amp > 0.0) || !(d2_slope_.left_rate > 0.0) || !(d2_slope_.right_rate > 0.0) ||
        !(d2_slope_.left_pow > 0.0) || !(d2_slope_.right_pow > 0.0))
        throw std::invalid_argument("DemandCurve: stretched-exponential parameters must be positive");

    step_ = (hi - lo) / static_cast<double>(points - 1);

    // Cumulative composite Simpson: each cell [y_k, y_{k+1}] contributes
    // (step/6) * (s(y_k) + 4*s(mid) + s(y_{k+1})). The slope is smooth except
    // for one |.|^pow kink at the center, and the grid is fine enough that the
    // linear interpolation between nodes, not the quadrature, limits accuracy.
    std::vector<double> table(points);
    long double acc = 0.0L;
    table[0] = 0.0;
    double left_val = d2_slope_(lo);
    for (std::size_t k = 1; k < points; ++k) {
        const double a = lo + step_ * static_cast<double>(k - 1);
        const double b = lo + step_ * static_cast<double>(k);
        const double mid_val = d2_slope_(0.5 * (a + b));
        const double right_val = d2_slope_(b);
        acc += static_cast<long double>(step_ / 6.0) * (left_val + 4.0 * mid_val + right_val);
        table[k] = static_cast<double>(acc);
        left_val = right_val;
    }

    table_ = std::make_shared<const std::vector<double>>(std::move(table));

    // Shift so the interpolated value at the anchor is exactly zero.
    const double at_anchor = eval_d2(anchor);
    auto shifted = std::make_shared<std::vector<double>>(*table_);
    for (double& v : *shifted) v -= at_anchor;
    table_ = std::move(shifted);
}

double DemandCurve::eval_d2(double y) const {
    require_finite(y, "eval_d2");
    if (y < lo_ || y > hi_)
        throw std::out_of_range("eval_d2: argument outside the cached table range");
    const std::vector<double>& table = *table_;
    const double pos = (y - lo_) / step_;
    std::size_t k = static_cast<std::size_t>(pos);
    if (k >= table.size() - 1) k = table.size() - 2;
    const double t = pos - static_cast<double>(k);
    return table[k] + t * (table[k + 1] - table[k]);
}

std::vector<ContinuityGap> DemandCurve::continuity_report() const {
    std::vector<ContinuityGap> gaps;
    for (std::size_t k = 0; k < d1_.breakpoints.size(); ++k) {
        const double b = d1_.breakpoints[k];
        const double left = d1_.segments[k](b);      // limit from below
        const double right = d1_.segments[k + 1](b); // owning segment
        const double scale = std::max({1.0, std::fabs(left), std::fabs(right)});
        if (std::fabs(right - left) > 1e-12 * scale) gaps.push_back({b, left, right});
    }
    return gaps;
}

const DemandCurve& equity_preset() {
    static const DemandCurve curve = [] {
        PiecewisePoly d1;
        d1.breakpoints = {-0.0286, 0.0, 0.0648};
        d1.segments = {
            Poly{{-352.1, -504.0}},
            Poly{{0.0, 2.63e4, 5.12e5}},
            Poly{{0.0, 3.5e4, -4.5e5, 1.44e6}},
            Poly{{435.46, 1.85e4, -2.66e5, 9.38e5}},
        };
        StretchedExpPair slope;
        slope.center = 0.008;
        slope.amp = 110.0;
        slope.left_rate = 150.0;
        slope.left_pow = 1.5;
        slope.right_rate = 40.0;
        slope.right_pow = 1.3;
        return DemandCurve(std::move(d1), slope, /*anchor=*/0.008);
    }();
    return curve;
}

const DemandCurve& fx_preset() {
    static const DemandCurve curve = [] {
        PiecewisePoly d1;
        d1.breakpoints = {0.0};
        d1.segments = {
            Poly{{5.381, 4.039e4, 2.169e6, 2.802e7}},
            Poly{{-3.27, 3.391e4, -1.056e6, 7.935e6}},
        };
        StretchedExpPair slope;
        slope.center = -0.002;
        slope.amp = 220.0;
        slope.left_rate = 250.0;
        slope.left_pow = 1.36;
        slope.right_rate = 100.0;
        slope.right_pow = 1.35;
        return DemandCurve(std::move(d1), slope, /*anchor=*/-0.002);
    }();
    return curve;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t line_no) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string token;
    while (ss >> token) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw parse_error("curve file line " + std::to_string(line_no) +
                              ": expected a decimal number, got '" + token + "'");
        }
    }
    return out;
}

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

DemandCurve read_curve_file(std::istream& in) {
    PiecewisePoly d1;
    StretchedExpPair slope;
    bool have_anchor = false;
    double anchor = 0.0;
    bool saw_d1 = false, saw_slope = false;
    bool have_center = false, have_amp = false, have_left = false, have_right = false;

    enum class Section { none, d1, d2slope } section = Section::none;
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = trimmed(raw_line);
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = trimmed(line.substr(0, hash));
        if (line.empty()) continue;
        if (line == "[d1]") {
            section = Section::d1;
            saw_d1 = true;
            continue;
        }
        if (line == "[d2slope]") {
            section = Section::d2slope;
            saw_slope = true;
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw parse_error("curve file line " + std::to_string(line_no) +
                              ": expected 'key: values'");
        const std::string key = trimmed(line.substr(0, colon));
        const std::string rest = line.substr(colon + 1);
        if (section == Section::d1) {
            if (key == "breakpoints") {
                d1.breakpoints = parse_numbers(rest, line_no);
            } else if (key == "segment") {
                auto coeffs = parse_numbers(rest, line_no);
                if (coeffs.empty())
                    throw parse_error("curve file line " + std::to_string(line_no) +
                                      ": segment needs at least one coefficient");
                d1.segments.emplace_back(std::move(coeffs));
            } else {
                throw parse_error("curve file line " + std::to_string(line_no) +
                                  ": unknown [d1] key '" + key + "'");
            }
        } else if (section == Section::d2slope) {
            const auto nums = parse_numbers(rest, line_no);
            auto need = [&](std::size_t n) {
                if (nums.size() != n)
                    throw parse_error("curve file line " + std::to_string(line_no) + ": key '" +
                                      key + "' needs " + std::to_string(n) + " value(s)");
            };
            if (key == "center") {
                need(1);
                slope.center = nums[0];
                have_center = true;
            } else if (key == "amp") {
                need(1);
                slope.amp = nums[0];
                have_amp = true;
            } else if (key == "left") {
                need(2);
                slope.left_rate = nums[0];
                slope.left_pow = nums[1];
                have_left = true;
            } else if (key == "right") {
                need(2);
                slope.right_rate = nums[0];
                slope.right_pow = nums[1];
                have_right = true;
            } else if (key == "anchor") {
                need(1);
                anchor = nums[0];
                have_anchor = true;
            } else {
                throw parse_error("curve file line " + std::to_string(line_no) +
                                  ": unknown [d2slope] key '" + key + "'");
            }
        } else {
            throw parse_error("curve file line " + std::to_string(line_no) +
                              ": content before any section header");
        }
    }
    if (!saw_d1 || !saw_slope) throw parse_error("curve file: need both [d1] and [d2slope] sections");
    if (!have_center || !have_amp || !have_left || !have_right)
        throw parse_error("curve file: [d2slope] needs center, amp, left, right");
    if (!have_anchor) anchor = slope.center;
    try {
        return DemandCurve(std::move(d1), slope, anchor);
    } catch (const std::invalid_argument& e) {
        // Structural defects (segment counts, ordering, anchor placement) are
        // still malformed input, so they surface as parse errors.
        throw parse_error("curve file: " + std::string(e.what()));
    }
}

DemandCurve read_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve file: " + path);
    return read_curve_file(in);
}

void write_curve_file(const DemandCurve& curve, std::ostream& out) {
    auto emit_numbers = [&out](const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ' ';
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof(buf), values[i]);
            out.write(buf, res.ptr - buf);
        }
    };
    out << "[d1]\n";
    out << "breakpoints:";
    out << ' ';
    emit_numbers(curve.d1().breakpoints);
    out << '\n';
    for (const Poly& seg : curve.d1().segments) {
        out << "segment: ";
        emit_numbers(seg.coeffs);
        out << '\n';
    }
    out << "[d2slope]\n";
    const StretchedExpPair& s = curve.d2_slope();
    out << "center: ";
    emit_numbers({s.center});
    out << "\namp: ";
    emit_numbers({s.amp});
    out << "\nleft: ";
    emit_numbers({s.left_rate, s.left_pow});
    out << "\nright: ";
    emit_numbers({s.right_rate, s.right_pow});
    out << "\nanchor: ";
    emit_numbers({curve.d2_anchor()});
    out << '\n';
}

void write_curve_file(const DemandCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_curve_file(curve, out);
}

} // namespace provol::demand
