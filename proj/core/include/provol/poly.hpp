#pragma once

#include <cstddef>
#include <vector>

namespace provol {

// Dense univariate polynomial, constant-first coefficients:
//   p(y) = coeffs[0] + coeffs[1]*y + ... + coeffs[n]*y^n
struct Poly {
    std::vector<double> coeffs;

    Poly() = default;
    explicit Poly(std::vector<double> c) : coeffs(std::move(c)) {}

    int degree() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1; }

    double operator()(double y) const {
        if (coeffs.empty()) return 0.0;
        double acc = coeffs.back();
        for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * y + coeffs[i];
        return acc;
    }

    Poly derivative() const {
        if (coeffs.size() <= 1) return Poly{{0.0}};
        std::vector<double> d(coeffs.size() - 1);
        for (std::size_t i = 1; i < coeffs.size(); ++i) d[i - 1] = coeffs[i] * static_cast<double>(i);
        return Poly{std::move(d)};
    }
};

} // namespace provol
