#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace eqzero {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

/// Slope of log y against log x (or against x when semilog), ignoring
/// non-finite and nonpositive y.
inline double fit_log_slope(std::span<const double> x, std::span<const double> y,
                            bool log_x = true) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
        lx.push_back(log_x ? std::log(x[i]) : x[i]);
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly).slope;
}

} // namespace eqzero
