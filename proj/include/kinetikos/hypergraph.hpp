#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kinetikos/errors.hpp"
#include "kinetikos/format.hpp"
#include "kinetikos/index_set.hpp"
#include "kinetikos/parallel.hpp"
#include "kinetikos/polynomial.hpp"
#include "kinetikos/ranges.hpp"
#include "kinetikos/trajectory.hpp"

namespace kinetikos {

/// Times at which the combinatorics of (P(t), family) may change, plus one
/// or more representative times inside every open interval between them.
struct EventTimeline {
    TimeInterval window;
    /// Strictly increasing, inside the window.
    std::vector<double> events;
    /// Strictly increasing; none coincides with an event.
    std::vector<double> representatives;
    /// Tuples whose degeneracy polynomial vanishes identically.
    std::size_t degenerate_tuples = 0;
    /// Latest degeneracy time found on [0, inf), NaN when there is none.
    double last_event = std::numeric_limits<double>::quiet_NaN();
    /// Roots found past the horizon; nonzero means the horizon cuts off events.
    std::size_t events_beyond_horizon = 0;

    bool horizon_too_short() const noexcept { return events_beyond_horizon > 0; }

    /// Horizon endpoints plus representatives, ascending.
    std::vector<double> sample_times() const {
        std::vector<double> out;
        out.push_back(window.lower);
        out.insert(out.end(), representatives.begin(), representatives.end());
        if (window.upper > window.lower) out.push_back(window.upper);
        return out;
    }
};

/// Knobs shared by the brute-force oracles.
struct EnumerationOptions {
    /// Largest n accepted; 0 selects default_oracle_limit.
    std::size_t max_points = 0;
    /// Representatives per open interval between events (>= 1). Values > 1
    /// are used to check that the catalog is stable under refinement.
    int representatives_per_interval = 1;
    /// Extra uniform breakpoints per point for cone families in d >= 2.
    std::size_t cone_grid_per_point = 64;
    unsigned threads = default_threads();
};

/// Default oracle size guard by dimension and family.
inline std::size_t default_oracle_limit(int dim, const RangeFamily& family) {
    if (dim == 1) return 160;
    if (family.tag == FamilyTag::bounded_cones) return 12;
    if (dim == 2) return 14;
    return 10;
}

inline void require_oracle_guard(const MovingPointSet& set, const RangeFamily& family, const EnumerationOptions& opts) {
    const std::size_t limit = opts.max_points ? opts.max_points : default_oracle_limit(set.dim(), family);
    if (set.size() > limit)
        throw GuardExceeded("oracle guard: n = " + std::to_string(set.size()) + " exceeds " + std::to_string(limit) +
                            " for family " + describe(family));
}

namespace detail {

/// Cauchy bound on root magnitude.
inline double root_bound(const Polynomial& p) {
    const double lead = std::abs(p.leading());
    double m = 0.0;
    for (int i = 0; i < p.degree(); ++i) m = std::max(m, std::abs(p.coefficient(i)) / lead);
    return 1.0 + m;
}

/// Degeneracy polynomials whose roots are the event candidates.
inline std::vector<EventPolynomial> event_polynomials(const MovingPointSet& set, const RangeFamily& family) {
    std::vector<EventPolynomial> polys;
    const std::size_t n = set.size();
    const auto d = static_cast<std::size_t>(set.dim());
    const auto& tr = set.trajectories();
    auto add_tuples = [&](std::size_t k, bool sphere) {
        std::vector<Trajectory> tuple(k);
        for_each_combination(n, k, [&](std::span<const std::size_t> idx) {
            for (std::size_t i = 0; i < k; ++i) tuple[i] = tr[idx[i]];
            polys.push_back(sphere ? cosphericity_polynomial(tuple) : determinant_polynomial(tuple));
            return true;
        });
    };
    if (d == 1) {
        // All four families change only when two points coincide.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                EventPolynomial ep;
                ep.poly = tr[i].component(0) - tr[j].component(0);
                ep.identically_zero = ep.poly.is_negligible(1e-14 * std::max(1.0, tr[i].component(0).magnitude()));
                if (ep.identically_zero) ep.poly = Polynomial{};
                polys.push_back(std::move(ep));
            }
        return polys;
    }
    switch (family.tag) {
        case FamilyTag::intervals: throw DimensionMismatch("interval family requires dimension 1");
        case FamilyTag::halfspaces: add_tuples(d + 1, false); break;
        case FamilyTag::balls:
        case FamilyTag::bounded_cones:
            add_tuples(d + 1, false);
            add_tuples(d + 2, true);
            break;
    }
    return polys;
}

}  // namespace detail

/// Event times of the kinetic hypergraph over the horizon. Halfspaces use
/// (d+1)-tuple affine dependence, balls add (d+2)-tuple cosphericity,
/// dimension 1 uses pairwise coincidence, and cones take the ball events
/// plus a uniform grid of cone_grid_per_point * n extra breakpoints.
inline EventTimeline event_times(const MovingPointSet& set, const RangeFamily& family, const EnumerationOptions& opts = {}) {
    require_canonical_guard(set.size(), set.dim());
    EventTimeline tl;
    tl.window = set.window();
    const double T = set.horizon();
    const auto polys = detail::event_polynomials(set, family);

    std::vector<std::vector<double>> roots(polys.size());
    std::vector<double> far_last(polys.size(), -1.0);
    std::vector<std::size_t> far_count(polys.size(), 0);
    parallel_for(polys.size(), opts.threads, [&](std::size_t i) {
        const auto& ep = polys[i];
        if (ep.identically_zero || ep.poly.degree() <= 0) return;
        const Polynomial p = ep.poly.trimmed(1e-14);
        if (p.degree() <= 0) return;
        const double bound = std::max(T, detail::root_bound(p));
        for (double r : real_roots(p, {0.0, bound})) {
            if (r <= T) {
                roots[i].push_back(r);
            } else {
                ++far_count[i];
                far_last[i] = std::max(far_last[i], r);
            }
        }
    });

    std::vector<double> all;
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].identically_zero) ++tl.degenerate_tuples;
        all.insert(all.end(), roots[i].begin(), roots[i].end());
        tl.events_beyond_horizon += far_count[i];
        if (far_last[i] >= 0.0) tl.last_event = std::isnan(tl.last_event) ? far_last[i] : std::max(tl.last_event, far_last[i]);
    }
    std::sort(all.begin(), all.end());
    for (double r : all) {
        if (!tl.events.empty() && r - tl.events.back() <= 2.0 * kRootTolerance) continue;
        tl.events.push_back(r);
    }
    if (!tl.events.empty() && std::isnan(tl.last_event)) tl.last_event = tl.events.back();
    else if (!tl.events.empty()) tl.last_event = std::max(tl.last_event, tl.events.back());

    std::vector<double> breaks;
    breaks.push_back(0.0);
    for (double e : tl.events)
        if (e > 0.0 && e < T) breaks.push_back(e);
    if (family.tag == FamilyTag::bounded_cones && set.dim() >= 2 && T > 0.0 && !set.is_static()) {
        const std::size_t grid = opts.cone_grid_per_point * std::max<std::size_t>(set.size(), 1);
        for (std::size_t g = 1; g < grid; ++g) breaks.push_back(T * static_cast<double>(g) / static_cast<double>(grid));
    }
    breaks.push_back(T);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const int per = std::max(1, opts.representatives_per_interval);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (b - a <= 0.0) continue;
        for (int k = 1; k <= per; ++k) tl.representatives.push_back(a + (b - a) * k / (per + 1));
    }
    return tl;
}

/// Calls visit(time, trace, witness) for every canonical trace at every
/// sample time of the timeline, in time order.
template <typename Visitor>
void sweep_traces(const MovingPointSet& set, const RangeFamily& family, const EventTimeline& timeline, Visitor&& visit) {
    for (double t : timeline.sample_times()) {
        const auto pts = set.at(t);
        for_each_canonical_trace(pts, family, [&](const IndexSet& s, const Range& r) { visit(t, s, r); });
    }
}

/// A (time, range) pair certifying that a hyperedge is realizable.
struct Witness {
    double time = 0.0;
    Range range;
};

/// Strict total order used for deterministic output: by size, then by
/// sorted member list.
inline bool edge_order(const IndexSet& a, const IndexSet& b) {
    const auto sa = a.size(), sb = b.size();
    if (sa != sb) return sa < sb;
    const auto wa = a.words(), wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        const std::uint64_t x = wa[i] ^ wb[i];
        if (x) return (wa[i] >> std::countr_zero(x)) & 1U;
    }
    return false;
}

/// The distinct nonempty hyperedges of a kinetic hypergraph, each with the
/// first witness found for it.
class HyperedgeCatalog {
public:
    HyperedgeCatalog() = default;
    HyperedgeCatalog(std::size_t n, RangeFamily family, TimeInterval window) : n_(n), family_(family), window_(window) {}

    std::size_t universe() const noexcept { return n_; }
    const RangeFamily& family() const noexcept { return family_; }
    TimeInterval window() const noexcept { return window_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool contains(const IndexSet& e) const { return edges_.count(e) != 0; }

    /// Adds the edge if new; returns true when it was inserted.
    bool insert(const IndexSet& e, double t, const Range& r) {
        if (e.empty()) return false;
        return edges_.try_emplace(e, Witness{t, r}).second;
    }

    const Witness& witness(const IndexSet& e) const { return edges_.at(e); }

    /// Edges in deterministic order.
    std::vector<IndexSet> edges() const {
        std::vector<IndexSet> out;
        out.reserve(edges_.size());
        for (const auto& [e, w] : edges_) out.push_back(e);
        std::sort(out.begin(), out.end(), edge_order);
        return out;
    }

    /// Raw map, iteration order unspecified.
    const std::unordered_map<IndexSet, Witness, IndexSetHash>& entries() const noexcept { return edges_; }

    std::size_t largest_edge() const noexcept {
        std::size_t m = 0;
        for (const auto& [e, w] : edges_) m = std::max(m, e.size());
        return m;
    }

    /// Line-oriented text: '#' header lines, then one edge per line.
    void write(std::ostream& os) const {
        os << "# family: " << describe(family_) << "\n";
        os << "# horizon: " << format_double(window_.lower) << " " << format_double(window_.upper) << "\n";
        os << "# n: " << n_ << "\n";
        os << "# edges: " << edges_.size() << "\n";
        os << "# witness: time<TAB>range, one line per edge in the same order (see witness file)\n";
        for (const auto& e : edges()) os << e.to_string() << "\n";
    }

    void write_witnesses(std::ostream& os) const {
        for (const auto& e : edges()) {
            const auto& w = edges_.at(e);
            os << e.to_string() << "\t" << format_double(w.time) << "\t" << format_range(w.range) << "\n";
        }
    }

private:
    std::size_t n_ = 0;
    RangeFamily family_;
    TimeInterval window_;
    std::unordered_map<IndexSet, Witness, IndexSetHash> edges_;
};

/// Brute-force kinetic hypergraph: union of the canonical traces at both
/// horizon endpoints and every representative time of the event timeline.
inline HyperedgeCatalog enumerate_kinetic_hyperedges(const MovingPointSet& set, const RangeFamily& family,
                                                     const EnumerationOptions& opts = {}) {
    require_oracle_guard(set, family, opts);
    const EventTimeline tl = event_times(set, family, opts);
    HyperedgeCatalog catalog(set.size(), family, set.window());
    const auto times = tl.sample_times();
    if (opts.threads <= 1 || times.size() < 2) {
        sweep_traces(set, family, tl, [&](double t, const IndexSet& s, const Range& r) { catalog.insert(s, t, r); });
        return catalog;
    }
    // Per-time partial catalogs merged in time order keep the earliest
    // witness, matching the sequential result.
    const unsigned workers = opts.threads;
    std::vector<HyperedgeCatalog> parts(workers, HyperedgeCatalog(set.size(), family, set.window()));
    const std::size_t block = (times.size() + workers - 1) / workers;
    parallel_for(workers, workers, [&](std::size_t w) {
        const std::size_t lo = w * block, hi = std::min(times.size(), lo + block);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto pts = set.at(times[i]);
            for_each_canonical_trace(pts, family, [&](const IndexSet& s, const Range& r) { parts[w].insert(s, times[i], r); });
        }
    });
    for (auto& part : parts)
        for (const auto& [e, wit] : part.entries()) catalog.insert(e, wit.time, wit.range);
    return catalog;
}

/// Number of distinct nonempty traces of the catalog on a vertex subset.
inline std::size_t trace_count(const HyperedgeCatalog& catalog, const IndexSet& subset) {
    std::unordered_set<IndexSet, IndexSetHash> traces;
    for (const auto& [e, w] : catalog.entries()) {
        IndexSet t = e & subset;
        if (!t.empty()) traces.insert(std::move(t));
    }
    return traces.size();
}

/// Exhaustive-subset guard for shatter and VC computations.
inline constexpr double kSubsetGuard = 1e5;

namespace detail {

inline std::vector<std::uint64_t> catalog_masks(const HyperedgeCatalog& catalog) {
    if (catalog.universe() > 64) throw GuardExceeded("shatter/VC oracles support at most 64 points");
    std::vector<std::uint64_t> masks;
    masks.reserve(catalog.size());
    for (const auto& [e, w] : catalog.entries()) masks.push_back(e.low_word());
    std::sort(masks.begin(), masks.end());
    return masks;
}

/// Compresses the bits of `value` selected by `positions` into a dense index.
inline std::uint32_t compress(std::uint64_t value, std::span<const std::size_t> positions) {
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) out |= static_cast<std::uint32_t>((value >> positions[i]) & 1U) << i;
    return out;
}

}  // namespace detail

/// Primal shatter function: max over m-subsets X of the number of distinct
/// nonempty traces on X. The empty trace is not counted.
inline std::size_t shatter_function(const HyperedgeCatalog& catalog, std::size_t m) {
    const std::size_t n = catalog.universe();
    if (m > n) throw PreconditionError("shatter_function: m exceeds n");
    if (binomial(n, m) > kSubsetGuard) throw GuardExceeded("shatter_function: C(n,m) exceeds subset guard");
    if (m == 0) return 0;
    const auto masks = detail::catalog_masks(catalog);
    std::size_t best = 0;
    std::vector<std::uint64_t> traces;
    for_each_combination(n, m, [&](std::span<const std::size_t> idx) {
        std::uint64_t sel = 0;
        for (std::size_t i : idx) sel |= std::uint64_t{1} << i;
        traces.clear();
        for (auto e : masks)
            if (e & sel) traces.push_back(e & sel);
        std::sort(traces.begin(), traces.end());
        const auto distinct = static_cast<std::size_t>(std::unique(traces.begin(), traces.end()) - traces.begin());
        best = std::max(best, distinct);
        return true;
    });
    return best;
}

inline std::size_t shatter_function(const MovingPointSet& set, const RangeFamily& family, std::size_t m,
                                    const EnumerationOptions& opts = {}) {
    if (binomial(set.size(), m) > kSubsetGuard) throw GuardExceeded("shatter_function: C(n,m) exceeds subset guard");
    return shatter_function(enumerate_kinetic_hyperedges(set, family, opts), m);
}

/// Largest k such that some k-subset X receives all 2^k traces (the empty
/// trace is always available: every family has ranges missing all points).
inline std::size_t vc_dimension_estimate(const HyperedgeCatalog& catalog) {
    const std::size_t n = catalog.universe();
    const auto masks = detail::catalog_masks(catalog);
    std::size_t vc = 0;
    std::vector<char> seen;
    for (std::size_t k = 1; k <= n && k <= 20; ++k) {
        if (binomial(n, k) > kSubsetGuard) throw GuardExceeded("vc_dimension_estimate: C(n,k) exceeds subset guard");
        const std::size_t need = (std::size_t{1} << k) - 1;
        bool found = false;
        for_each_combination(n, k, [&](std::span<const std::size_t> idx) {
            seen.assign(need + 1, 0);
            std::size_t got = 0;
            for (auto e : masks) {
                const auto c = detail::compress(e, idx);
                if (c && !seen[c]) {
                    seen[c] = 1;
                    if (++got == need) break;
                }
            }
            if (got == need) {
                found = true;
                return false;
            }
            return true;
        });
        if (!found) break;
        vc = k;
    }
    return vc;
}

inline std::size_t vc_dimension_estimate(const MovingPointSet& set, const RangeFamily& family, const EnumerationOptions& opts = {}) {
    return vc_dimension_estimate(enumerate_kinetic_hyperedges(set, family, opts));
}

/// Least-squares slope of log(pi(m)) against log(m) for m in [lo, hi].
inline double shatter_growth_slope(const HyperedgeCatalog& catalog, std::size_t lo, std::size_t hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (std::size_t m = lo; m <= hi; ++m) {
        const double x = std::log(static_cast<double>(m));
        const double y = std::log(static_cast<double>(std::max<std::size_t>(1, shatter_function(catalog, m))));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace kinetikos
