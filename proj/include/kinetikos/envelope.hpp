#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "kinetikos/polynomial.hpp"
#include "kinetikos/trajectory.hpp"

namespace kinetikos {

/// Piecewise-constant choice of partner over [0, T]: partners[i] holds on
/// (breaks[i-1], breaks[i]), with breaks[-1] = 0 and breaks[size] = T.
struct EnvelopeSchedule {
    std::vector<double> breaks;
    std::vector<std::size_t> partners;

    std::size_t changes() const noexcept { return breaks.size(); }

    /// Partner at time t; at a breakpoint the later piece wins.
    std::size_t at(double t) const {
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        return partners[static_cast<std::size_t>(it - breaks.begin())];
    }
};

namespace detail {

/// Sign of g on the open piece right after r (next root or T bounds it).
inline double value_after(const Polynomial& g, const std::vector<double>& roots, std::size_t i, double T) {
    const double r = roots[i];
    const double hi = i + 1 < roots.size() ? roots[i + 1] : T;
    if (hi > r) return g(0.5 * (r + hi));
    // r == T: look just past it with the leading behaviour.
    return g(r + 1e-6 * std::max(1.0, std::abs(r)));
}

}  // namespace detail

/// Lower (or upper, when maximize) envelope of t -> |p(t) - q(t)|^2 over
/// the candidates, tracked by jumping from one crossing to the next. The
/// index in the schedule is the position in `candidates`. A candidate only
/// takes over where the difference changes sign; touching ties and exact
/// ties at a sample time resolve to the smaller position.
inline EnvelopeSchedule distance_envelope(const Trajectory& p, std::span<const Trajectory> candidates, double T,
                                          bool maximize = false) {
    if (candidates.empty()) throw PreconditionError("distance_envelope: no candidates");
    const double sgn = maximize ? -1.0 : 1.0;
    std::vector<Polynomial> f;
    f.reserve(candidates.size());
    for (const auto& q : candidates) f.push_back(squared_distance_polynomial(p, q) * sgn);

    auto best_at = [&](double t) {
        std::size_t b = 0;
        double bv = f[0](t);
        for (std::size_t q = 1; q < f.size(); ++q) {
            const double v = f[q](t);
            if (v < bv) {
                bv = v;
                b = q;
            }
        }
        return b;
    };

    EnvelopeSchedule out;
    // Decide the first piece just after 0 rather than at 0 itself.
    double t0 = 0.0;
    {
        double first = T;
        const std::size_t b0 = best_at(0.0);
        for (std::size_t q = 0; q < f.size(); ++q) {
            if (q == b0) continue;
            const Polynomial g = (f[q] - f[b0]).trimmed(1e-14);
            if (g.is_zero() || g.degree() == 0) continue;
            for (double r : real_roots(g, {0.0, T}))
                if (r > 0.0) {
                    first = std::min(first, r);
                    break;
                }
        }
        out.partners.push_back(best_at(first > 0.0 ? 0.5 * first : 0.0));
    }

    const double tol = 4.0 * kRootTolerance;
    while (true) {
        const std::size_t cur = out.partners.back();
        double next = std::numeric_limits<double>::infinity();
        double after = T;  // nearest root of any difference beyond `next`
        std::vector<double> all;
        for (std::size_t q = 0; q < f.size(); ++q) {
            if (q == cur) continue;
            const Polynomial g = (f[q] - f[cur]).trimmed(1e-14);
            if (g.is_zero() || g.degree() == 0) continue;
            const auto roots = real_roots(g, {t0, T});
            for (std::size_t i = 0; i < roots.size(); ++i) {
                if (roots[i] <= t0 + tol) continue;
                all.push_back(roots[i]);
                if (roots[i] < next && detail::value_after(g, roots, i, T) < 0.0) next = roots[i];
            }
        }
        if (!(next < T - tol)) break;
        for (double r : all)
            if (r > next + tol) after = std::min(after, r);
        const std::size_t nb = best_at(next + 0.5 * (after - next));
        if (nb == cur) {
            // Numerically a touch; skip past it.
            t0 = next;
            continue;
        }
        out.breaks.push_back(next);
        out.partners.push_back(nb);
        t0 = next;
    }
    return out;
}

}  // namespace kinetikos
