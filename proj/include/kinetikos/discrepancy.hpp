#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <vector>

#include "kinetikos/hypergraph.hpp"
#include "kinetikos/random.hpp"

namespace kinetikos {

struct Coloring {
    std::vector<int> values;  // each +1 or -1
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return values.size(); }
    void validate() const {
        for (int v : values)
            if (v != 1 && v != -1) throw PreconditionError("coloring entries must be +1 or -1");
    }
};

inline Coloring color_random(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw PreconditionError("color_random: n must be positive");
    Rng rng(seed);
    Coloring c;
    c.seed = seed;
    c.values.resize(n);
    for (auto& v : c.values) v = rng.sign();
    return c;
}

inline Coloring color_constant(std::size_t n, int value = 1) {
    Coloring c;
    c.values.assign(n, value);
    return c;
}

inline int signed_sum(const IndexSet& e, const Coloring& chi) {
    int s = 0;
    e.for_each([&](std::size_t i) { s += chi.values[i]; });
    return s;
}

struct DiscrepancyValue {
    std::size_t value = 0;
    IndexSet witness;
};

/// max |chi(S)| over the catalog; the witness is the first maximal edge in
/// catalog order.
inline DiscrepancyValue kinetic_discrepancy(const HyperedgeCatalog& catalog, const Coloring& chi) {
    if (chi.size() != catalog.universe()) throw PreconditionError("coloring size differs from the vertex count");
    chi.validate();
    DiscrepancyValue out;
    bool first = true;
    for (const auto& e : catalog.edges()) {
        const auto v = static_cast<std::size_t>(std::abs(signed_sum(e, chi)));
        if (first || v > out.value) {
            out.value = v;
            out.witness = e;
            first = false;
        }
    }
    return out;
}

inline DiscrepancyValue kinetic_discrepancy(const MovingPointSet& set, const RangeFamily& family, const Coloring& chi,
                                            const EnumerationOptions& opts = {}) {
    return kinetic_discrepancy(enumerate_kinetic_hyperedges(set, family, opts), chi);
}

/// Union-bound tail for a random coloring: sqrt(2 n ln(2m)).
inline double random_coloring_reference(std::size_t n, std::size_t m) {
    return std::sqrt(2.0 * static_cast<double>(n) * std::log(2.0 * static_cast<double>(std::max<std::size_t>(m, 1))));
}

struct ImprovementTrace {
    Coloring coloring;
    std::vector<std::size_t> maxima;  // max imbalance before the first and after every flip
    std::vector<std::size_t> flips;   // flipped vertex per step
};

/// Greedy local search. Each step flips the vertex whose flip gives the
/// smallest (max imbalance, number of edges at that max) pair, provided it
/// is strictly smaller than the current pair; ties go to the smaller
/// vertex. The max imbalance never increases.
inline ImprovementTrace improve_coloring(const HyperedgeCatalog& catalog, Coloring chi, std::size_t iterations) {
    const std::size_t n = catalog.universe();
    if (chi.size() != n) throw PreconditionError("coloring size differs from the vertex count");
    chi.validate();
    const auto edges = catalog.edges();
    const std::size_t m = edges.size();

    std::vector<std::vector<std::uint32_t>> incident(n);
    std::vector<int> sum(m);
    for (std::size_t e = 0; e < m; ++e) {
        edges[e].for_each([&](std::size_t v) { incident[v].push_back(static_cast<std::uint32_t>(e)); });
        sum[e] = signed_sum(edges[e], chi);
    }
    std::vector<std::size_t> hist(n + 3, 0);
    for (int s : sum) ++hist[static_cast<std::size_t>(std::abs(s))];
    auto top = [&]() {
        std::size_t l = hist.size();
        while (l > 0 && hist[l - 1] == 0) --l;
        return l == 0 ? std::size_t{0} : l - 1;
    };

    ImprovementTrace tr;
    std::size_t M = top();
    tr.maxima.push_back(M);
    std::vector<long> diff(hist.size(), 0);
    std::vector<std::size_t> touched;
    std::vector<char> cand(n);

    for (std::size_t it = 0; it < iterations && m > 0 && M > 0; ++it) {
        const std::size_t cnt = hist[M];
        // Only vertices in a maximal edge, colored like its sum, can help.
        std::fill(cand.begin(), cand.end(), 0);
        for (std::size_t e = 0; e < m; ++e) {
            if (static_cast<std::size_t>(std::abs(sum[e])) != M) continue;
            const int sg = sum[e] > 0 ? 1 : -1;
            edges[e].for_each([&](std::size_t v) {
                if (chi.values[v] == sg) cand[v] = 1;
            });
        }
        std::size_t best_v = n, best_M = M, best_c = cnt;
        for (std::size_t v = 0; v < n; ++v) {
            if (!cand[v]) continue;
            touched.clear();
            for (auto e : incident[v]) {
                const auto from = static_cast<std::size_t>(std::abs(sum[e]));
                const auto to = static_cast<std::size_t>(std::abs(sum[e] - 2 * chi.values[v]));
                --diff[from];
                ++diff[to];
                touched.push_back(from);
                touched.push_back(to);
            }
            std::size_t l = std::min(hist.size() - 1, M + 2);
            while (l > 0 && static_cast<long>(hist[l]) + diff[l] == 0) --l;
            const std::size_t c = static_cast<std::size_t>(static_cast<long>(hist[l]) + diff[l]);
            for (auto x : touched) diff[x] = 0;
            if (l < best_M || (l == best_M && c < best_c)) {
                best_v = v;
                best_M = l;
                best_c = c;
            }
        }
        if (best_v == n) break;
        const int cv = chi.values[best_v];
        for (auto e : incident[best_v]) {
            --hist[static_cast<std::size_t>(std::abs(sum[e]))];
            sum[e] -= 2 * cv;
            ++hist[static_cast<std::size_t>(std::abs(sum[e]))];
        }
        chi.values[best_v] = -cv;
        M = top();
        tr.maxima.push_back(M);
        tr.flips.push_back(best_v);
    }
    tr.coloring = std::move(chi);
    return tr;
}

inline ImprovementTrace improve_coloring(const MovingPointSet& set, const RangeFamily& family, Coloring chi, std::size_t iterations,
                                         const EnumerationOptions& opts = {}) {
    return improve_coloring(enumerate_kinetic_hyperedges(set, family, opts), std::move(chi), iterations);
}

inline void write_coloring(std::ostream& os, const Coloring& c) {
    os << "index,color\n";
    for (std::size_t i = 0; i < c.size(); ++i) os << i << "," << c.values[i] << "\n";
}

}  // namespace kinetikos
