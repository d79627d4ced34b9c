#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "kinetikos/errors.hpp"

namespace kinetikos {

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw PreconditionError("loglog_slope: need two or more paired samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && ys[i] > 0.0)) throw PreconditionError("loglog_slope: values must be positive");
        const double x = std::log(xs[i]), y = std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw PreconditionError("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace kinetikos
