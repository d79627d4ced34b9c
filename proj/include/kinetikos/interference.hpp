#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "kinetikos/envelope.hpp"
#include "kinetikos/voronoi.hpp"

namespace kinetikos {

/// round(sqrt(n / ln n)), at least 2.
inline std::size_t hub_count(std::size_t n) {
    if (n < 2) return 2;
    const double x = static_cast<double>(n);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(std::sqrt(x / std::log(x)))));
}

/// Who each point reaches at every time: hubs reach their furthest point,
/// everyone else the nearest hub. Partners are global point indices.
struct AssignmentSchedule {
    FacilitySet hubs;
    std::vector<char> is_hub;
    std::vector<EnvelopeSchedule> partners;
    double horizon = 0.0;

    std::size_t size() const noexcept { return partners.size(); }
    std::size_t partner(std::size_t p, double t) const { return partners[p].at(t); }
};

/// Schedule for a given hub set (no size precondition beyond n >= 2).
inline AssignmentSchedule assign_with_hubs(const MovingPointSet& set, const FacilitySet& hubs, unsigned threads = default_threads()) {
    const std::size_t n = set.size();
    if (n < 2) throw PreconditionError("hub protocol needs at least two points");
    if (hubs.indices.empty()) throw PreconditionError("hub protocol needs a hub");
    AssignmentSchedule out;
    out.hubs = hubs;
    out.horizon = set.horizon();
    out.is_hub.assign(n, 0);
    for (auto h : hubs.indices) out.is_hub[h] = 1;
    std::vector<Trajectory> hub_tr;
    for (auto h : hubs.indices) hub_tr.push_back(set[h]);

    out.partners.resize(n);
    parallel_for(n, threads, [&](std::size_t p) {
        if (out.is_hub[p]) {
            std::vector<Trajectory> others;
            std::vector<std::size_t> ids;
            for (std::size_t q = 0; q < n; ++q)
                if (q != p) {
                    others.push_back(set[q]);
                    ids.push_back(q);
                }
            auto s = distance_envelope(set[p], others, set.horizon(), true);
            for (auto& x : s.partners) x = ids[x];
            out.partners[p] = std::move(s);
        } else {
            auto s = distance_envelope(set[p], hub_tr, set.horizon(), false);
            for (auto& x : s.partners) x = hubs.indices[x];
            out.partners[p] = std::move(s);
        }
    });
    return out;
}

inline AssignmentSchedule assign_hub_protocol(const MovingPointSet& set, const SampleConfig& cfg = {},
                                              unsigned threads = default_threads()) {
    if (set.size() < 4) throw PreconditionError("assign_hub_protocol: need n >= 4");
    const auto hubs = select_facilities(set, hub_count(set.size()), cfg);
    return assign_with_hubs(set, hubs, threads);
}

struct NetworkSnapshot {
    double time = 0.0;
    std::vector<Point> positions;
    std::vector<double> radii;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    /// Row-major bitset adjacency, words_per_row words per vertex.
    std::vector<std::uint64_t> adjacency;
    std::size_t words_per_row = 0;

    std::size_t size() const noexcept { return positions.size(); }
    bool adjacent(std::size_t a, std::size_t b) const noexcept {
        return (adjacency[a * words_per_row + (b >> 6)] >> (b & 63)) & 1U;
    }
};

namespace detail {

inline NetworkSnapshot make_snapshot(double t, std::vector<Point> pos, std::vector<double> r2) {
    NetworkSnapshot s;
    s.time = t;
    const std::size_t n = pos.size();
    s.words_per_row = (n + 63) / 64;
    s.adjacency.assign(n * s.words_per_row, 0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (squared_distance(pos[a], pos[b]) <= std::min(r2[a], r2[b])) {
                s.edges.emplace_back(a, b);
                s.adjacency[a * s.words_per_row + (b >> 6)] |= std::uint64_t{1} << (b & 63);
                s.adjacency[b * s.words_per_row + (a >> 6)] |= std::uint64_t{1} << (a & 63);
            }
        }
    s.positions = std::move(pos);
    s.radii.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.radii[i] = std::sqrt(r2[i]);
    return s;
}

}  // namespace detail

/// Snapshot with explicit radii; an edge needs d(p,q) <= min(r_p, r_q).
inline NetworkSnapshot snapshot_from_radii(double t, std::vector<Point> positions, const std::vector<double>& radii) {
    if (positions.size() != radii.size()) throw PreconditionError("snapshot: one radius per point");
    std::vector<double> r2;
    for (double r : radii) {
        if (!(r >= 0.0)) throw PreconditionError("snapshot: negative radius");
        r2.push_back(r * r);
    }
    return detail::make_snapshot(t, std::move(positions), std::move(r2));
}

inline NetworkSnapshot communication_graph(const MovingPointSet& set, const AssignmentSchedule& sched, double t) {
    set.require_in_horizon(t);
    auto pos = set.at(t);
    std::vector<double> r2(pos.size());
    // Squared radii from the same squared_distance call used for edges, so
    // a point and its partner are always within range of each other.
    for (std::size_t p = 0; p < pos.size(); ++p) r2[p] = squared_distance(pos[p], pos[sched.partner(p, t)]);
    return detail::make_snapshot(t, std::move(pos), std::move(r2));
}

struct Connectivity {
    bool connected = true;
    std::size_t diameter = 0;  // hop diameter; meaningful when connected
};

/// Breadth-first search from every vertex on bitset rows.
inline Connectivity connectivity_and_diameter(const NetworkSnapshot& s) {
    const std::size_t n = s.size(), w = s.words_per_row;
    Connectivity c;
    if (n <= 1) return c;
    std::vector<std::uint64_t> seen(w), frontier(w), next(w);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(seen.begin(), seen.end(), 0);
        std::fill(frontier.begin(), frontier.end(), 0);
        seen[src >> 6] |= std::uint64_t{1} << (src & 63);
        frontier[src >> 6] = seen[src >> 6];
        std::size_t reached = 1, depth = 0;
        while (true) {
            std::fill(next.begin(), next.end(), 0);
            for (std::size_t wi = 0; wi < w; ++wi) {
                std::uint64_t bits = frontier[wi];
                while (bits) {
                    const std::size_t v = wi * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                    bits &= bits - 1;
                    const std::uint64_t* row = &s.adjacency[v * w];
                    for (std::size_t k = 0; k < w; ++k) next[k] |= row[k];
                }
            }
            std::size_t added = 0;
            for (std::size_t k = 0; k < w; ++k) {
                next[k] &= ~seen[k];
                seen[k] |= next[k];
                added += static_cast<std::size_t>(std::popcount(next[k]));
            }
            if (!added) break;
            reached += added;
            ++depth;
            frontier.swap(next);
        }
        if (reached < n) return {false, 0};
        c.diameter = std::max(c.diameter, depth);
    }
    return c;
}

struct InterferenceValue {
    std::size_t value = 0;
    Point witness;
    bool exact = true;
};

namespace detail {

/// Maximum number of closed disks containing a point on the boundary of
/// disk i, together with such a point. Every vertex of the arrangement
/// lies on some boundary, and a cell without vertices is bounded by a
/// whole circle, so the maximum over all boundaries (and the centers) is
/// the depth of the arrangement.
inline std::pair<std::size_t, Point> boundary_depth(std::span<const Point> c, std::span<const double> r, std::size_t i,
                                                    std::vector<std::pair<double, int>>& ev) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double ri = r[i];
    std::size_t base = 1;  // disk i itself
    ev.clear();
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j == i) continue;
        const double dx = c[j][0] - c[i][0], dy = c[j][1] - c[i][1];
        const double d = std::sqrt(dx * dx + dy * dy);
        const double rj = r[j];
        if (d + ri <= rj) {
            ++base;  // circle i inside disk j
            continue;
        }
        if (d >= ri + rj || d + rj <= ri) continue;  // apart (tangency ignored) or j strictly inside i
        const double cosh = std::clamp((ri * ri + d * d - rj * rj) / (2.0 * ri * d), -1.0, 1.0);
        const double half = std::acos(cosh);
        double lo = std::atan2(dy, dx) - half;
        if (lo < 0.0) lo += two_pi;
        double hi = lo + 2.0 * half;
        ev.emplace_back(lo, +1);
        if (hi >= two_pi) {
            ev.emplace_back(two_pi, -1);
            ev.emplace_back(0.0, +1);
            ev.emplace_back(hi - two_pi, -1);
        } else {
            ev.emplace_back(hi, -1);
        }
    }
    // Closed arcs: at equal angles openings come before closings.
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : a.second > b.second; });
    std::size_t cur = 0, best = 0;
    double at = 0.0;
    for (const auto& [a, s] : ev) {
        if (s > 0) {
            ++cur;
            if (cur > best) {
                best = cur;
                at = a;
            }
        } else {
            --cur;
        }
    }
    return {base + best, Point{c[i][0] + ri * std::cos(at), c[i][1] + ri * std::sin(at)}};
}

inline std::size_t depth_at(std::span<const Point> c, std::span<const double> r, const Point& x) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (squared_distance(c[j], x) <= r[j] * r[j] * (1.0 + 1e-12) + 1e-300) ++k;
    return k;
}

}  // namespace detail

/// Largest number of disks covering a common point of the plane.
inline InterferenceValue planar_depth(std::span<const Point> centers, std::span<const double> radii) {
    InterferenceValue out;
    if (centers.empty()) return out;
    std::vector<std::pair<double, int>> ev;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (radii[i] > 0.0) {
            auto [v, w] = detail::boundary_depth(centers, radii, i, ev);
            if (v > out.value) {
                out.value = v;
                out.witness = w;
            }
        }
        const std::size_t v = detail::depth_at(centers, radii, centers[i]);
        if (v > out.value) {
            out.value = v;
            out.witness = centers[i];
        }
    }
    return out;
}

/// Lower bound in any dimension: centers, points between overlapping
/// centers, and random samples in the bounding box.
inline InterferenceValue sampled_depth(std::span<const Point> centers, std::span<const double> radii, std::uint64_t seed,
                                       std::size_t samples = 4096) {
    InterferenceValue out;
    out.exact = false;
    if (centers.empty()) return out;
    auto consider = [&](const Point& x) {
        const std::size_t v = detail::depth_at(centers, radii, x);
        if (v > out.value) {
            out.value = v;
            out.witness = x;
        }
    };
    const int d = centers.front().dim();
    for (const auto& c : centers) consider(c);
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            const double dd = distance(centers[i], centers[j]);
            if (dd <= 0.0 || dd > radii[i] + radii[j]) continue;
            // Middle of the overlap along the segment of centers.
            const double a = std::max(0.0, dd - radii[j]), b = std::min(dd, radii[i]);
            consider(centers[i] + (centers[j] - centers[i]) * (0.5 * (a + b) / dd));
        }
    Point lo = centers.front(), hi = centers.front();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], centers[i][k] - radii[i]);
            hi[k] = std::max(hi[k], centers[i][k] + radii[i]);
        }
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        Point x(d);
        for (int k = 0; k < d; ++k) x[k] = rng.uniform(lo[k], hi[k]);
        consider(x);
    }
    return out;
}

inline InterferenceValue interference_of(const NetworkSnapshot& s, std::uint64_t seed = 0) {
    if (s.size() && s.positions.front().dim() == 2) return planar_depth(s.positions, s.radii);
    return sampled_depth(s.positions, s.radii, seed);
}

inline InterferenceValue interference_at(const MovingPointSet& set, const AssignmentSchedule& sched, double t) {
    return interference_of(communication_graph(set, sched, t), std::bit_cast<std::uint64_t>(t));
}

struct InterferenceReport {
    std::vector<double> times;
    std::vector<std::size_t> values;
    std::vector<Point> witnesses;
    std::size_t max_value = 0;
    double time_of_max = 0.0;
    bool exact = true;
};

inline InterferenceReport interference_series(const MovingPointSet& set, const AssignmentSchedule& sched, std::span<const double> times) {
    InterferenceReport rep;
    for (double t : times) {
        const auto v = interference_at(set, sched, t);
        rep.times.push_back(t);
        rep.values.push_back(v.value);
        rep.witnesses.push_back(v.witness);
        rep.exact = rep.exact && v.exact;
        if (v.value > rep.max_value) {
            rep.max_value = v.value;
            rep.time_of_max = t;
        }
    }
    return rep;
}

/// Upper bound on the number of pieces of an envelope of m functions whose
/// pairwise differences change sign at most q times: m for q = 1, 2m - 1
/// for q = 2, and otherwise one piece per crossing, q * C(m, 2) + 1.
inline double envelope_piece_cap(std::size_t m, int q) {
    const double x = static_cast<double>(m);
    if (m == 0) return 0.0;
    if (q <= 0) return 1.0;
    if (q == 1) return x;
    if (q == 2) return 2.0 * x - 1.0;
    return q * x * (x - 1.0) / 2.0 + 1.0;
}

struct ChangeLog {
    std::size_t total = 0;
    std::vector<std::size_t> per_point;
    std::vector<double> event_times;  // sorted, with repeats across points
    /// Points whose envelope exceeded its crossing cap (should stay empty).
    std::vector<std::size_t> cap_violations;
};

inline ChangeLog count_combinatorial_changes(const AssignmentSchedule& sched, int max_degree) {
    ChangeLog log;
    const std::size_t n = sched.size();
    const std::size_t hubs = sched.hubs.indices.size();
    log.per_point.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& s = sched.partners[p];
        log.per_point[p] = s.changes();
        log.total += s.changes();
        log.event_times.insert(log.event_times.end(), s.breaks.begin(), s.breaks.end());
        const std::size_t m = sched.is_hub[p] ? n - 1 : hubs;
        if (static_cast<double>(s.partners.size()) > envelope_piece_cap(m, 2 * max_degree)) log.cap_violations.push_back(p);
    }
    std::sort(log.event_times.begin(), log.event_times.end());
    return log;
}

}  // namespace kinetikos
