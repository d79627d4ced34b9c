#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <system_error>
#include <variant>

#include "kinetikos/point.hpp"
#include "kinetikos/ranges.hpp"

namespace kinetikos {

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) return std::to_string(v);
    return std::string(buf, res.ptr);
}

inline std::string format_point(const Point& p) {
    std::string s = "(";
    for (int i = 0; i < p.dim(); ++i) {
        if (i) s += ',';
        s += format_double(p[i]);
    }
    return s + ")";
}

inline std::string format_range(const Range& r) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Halfspace>)
                return "halfspace normal=" + format_point(x.normal) + " offset=" + format_double(x.offset);
            else if constexpr (std::is_same_v<T, Ball>)
                return "ball center=" + format_point(x.center) + " radius=" + format_double(x.radius);
            else if constexpr (std::is_same_v<T, BoundedCone>)
                return "cone apex=" + format_point(x.apex) + " axis=" + format_point(x.direction) +
                       " angle=" + format_double(x.angle) + " cap=" + format_double(x.cap_radius);
            else
                return "interval [" + format_double(x.lower) + "," + format_double(x.upper) + "]";
        },
        r);
}

}  // namespace kinetikos
