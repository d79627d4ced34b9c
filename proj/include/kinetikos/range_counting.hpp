#pragma once

#include <cmath>

#include "kinetikos/sampling.hpp"

namespace kinetikos {

/// Counts points of P in a range by counting a fixed eps-approximation A
/// and scaling by |P| / |A|.
struct ApproxCounter {
    EpsApproximation approximation;
    MovingPointSet sample;  // trajectories of A, in index order
    std::size_t n = 0;

    double scale() const noexcept { return static_cast<double>(n) / static_cast<double>(sample.size()); }
};

inline ApproxCounter build_counter(const MovingPointSet& set, const RangeFamily& family, double eps, const SampleConfig& cfg = {}) {
    auto approx = build_eps_approximation(set, family, eps, cfg);
    auto sample = set.subset(approx.indices);
    return ApproxCounter{std::move(approx), std::move(sample), set.size()};
}

/// Raw number of sample points inside r at time t.
inline std::size_t sample_count(const ApproxCounter& c, const Range& r, double t) {
    c.sample.require_in_horizon(t);
    std::size_t k = 0;
    for (const auto& tr : c.sample.trajectories())
        if (contains(r, tr(t))) ++k;
    return k;
}

inline double approx_count(const ApproxCounter& c, const Range& r, double t) {
    return static_cast<double>(sample_count(c, r, t)) * c.scale();
}

inline std::size_t exact_count(const MovingPointSet& set, const Range& r, double t) {
    set.require_in_horizon(t);
    std::size_t k = 0;
    for (const auto& tr : set.trajectories())
        if (contains(r, tr(t))) ++k;
    return k;
}

}  // namespace kinetikos
