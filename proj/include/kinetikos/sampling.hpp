#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kinetikos/errors.hpp"
#include "kinetikos/format.hpp"
#include "kinetikos/hypergraph.hpp"
#include "kinetikos/random.hpp"

namespace kinetikos {

struct SampleConfig {
    std::uint64_t seed = 0;
    /// Constant in front of the sample-size formulas.
    double size_constant = 4.0;
    /// VC-dimension to use; empty means "estimate" (see resolve_vc).
    std::optional<std::size_t> vc_hint;
    int max_attempts = 20;
    /// Options for the verification catalog.
    EnumerationOptions enumeration;

    void validate() const {
        if (!(size_constant > 0.0)) throw PreconditionError("SampleConfig: size constant must be positive");
        if (max_attempts < 1) throw PreconditionError("SampleConfig: max_attempts must be >= 1");
    }
};

enum class Verification { verified, unverified };

struct EpsNet {
    std::vector<std::size_t> indices;
    double epsilon = 0.0;
    RangeFamily family;
    std::uint64_t seed = 0;
    int attempts = 0;
    std::size_t vc = 0;
    double size_constant = 0.0;
    Verification status = Verification::unverified;

    bool verified() const noexcept { return status == Verification::verified; }
};

struct EpsApproximation {
    std::vector<std::size_t> indices;
    double epsilon = 0.0;
    RangeFamily family;
    std::uint64_t seed = 0;
    int attempts = 0;
    std::size_t vc = 0;
    double size_constant = 0.0;
    Verification status = Verification::unverified;
    /// Largest | |r∩A|/|A| - |r∩P|/|P| | over the catalog (NaN when unverified).
    double max_deviation = std::nan("");

    bool verified() const noexcept { return status == Verification::verified; }
};

struct UncoveredEdge {
    IndexSet edge;
    Witness witness;
};

struct NetReport {
    std::size_t threshold = 0;      // edges of at least this size must be hit
    std::size_t edges_checked = 0;  // catalog edges at or above the threshold
    std::vector<UncoveredEdge> uncovered;

    bool ok() const noexcept { return uncovered.empty(); }
    std::size_t largest_uncovered() const noexcept {
        std::size_t m = 0;
        for (const auto& u : uncovered) m = std::max(m, u.edge.size());
        return m;
    }
};

struct DeviationEdge {
    IndexSet edge;
    double deviation = 0.0;
    Witness witness;
};

struct ApproximationReport {
    double max_deviation = 0.0;
    std::vector<DeviationEdge> violations;  // edges with deviation > epsilon

    bool ok() const noexcept { return violations.empty(); }
};

inline void require_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
}

inline std::size_t net_size(std::size_t n, std::size_t vc, double eps, double c) {
    require_epsilon(eps);
    const double raw = std::ceil(c * static_cast<double>(vc) / eps * std::log(1.0 / eps) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

inline std::size_t approximation_size(std::size_t n, std::size_t vc, double eps, double c) {
    require_epsilon(eps);
    const double raw = std::ceil(c * static_cast<double>(vc) / (eps * eps) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

/// Smallest edge size an eps-net must hit.
inline std::size_t heavy_threshold(std::size_t n, double eps) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(eps * static_cast<double>(n) - 1e-9)));
}

/// Sub-instance size used when the VC-dimension has to be estimated.
/// Planar cone catalogs cost about a minute at 12 points, so they use 8.
inline std::size_t vc_estimate_points(int dim, const RangeFamily& family) {
    return (family.tag == FamilyTag::bounded_cones && dim >= 2) ? 8 : 12;
}

/// The VC-dimension consumed by the size formulas: the hint when given,
/// the classical value for static intervals, halfspaces and balls, and
/// otherwise an exhaustive estimate on a random sub-instance.
inline std::size_t resolve_vc(const MovingPointSet& set, const RangeFamily& family, const SampleConfig& cfg) {
    if (cfg.vc_hint) return *cfg.vc_hint;
    const auto d = static_cast<std::size_t>(set.dim());
    if (set.is_static()) {
        switch (family.tag) {
            case FamilyTag::intervals: return 2;
            case FamilyTag::halfspaces:
            case FamilyTag::balls: return d + 1;
            case FamilyTag::bounded_cones:
                if (d == 1) return 2;
                break;
        }
    }
    if (family.tag == FamilyTag::bounded_cones && d >= 3)
        throw PreconditionError("no cone enumeration in dimension 3; supply a VC hint");
    const std::size_t m = std::min(set.size(), vc_estimate_points(set.dim(), family));
    Rng rng(derive_seed(cfg.seed, 0x7663));
    const auto idx = rng.sample_without_replacement(set.size(), m);
    EnumerationOptions opts = cfg.enumeration;
    opts.max_points = 0;
    if (family.tag == FamilyTag::bounded_cones) opts.cone_grid_per_point = std::min<std::size_t>(opts.cone_grid_per_point, 8);
    return std::max<std::size_t>(1, vc_dimension_estimate(set.subset(idx), family, opts));
}

inline IndexSet as_index_set(std::size_t n, const std::vector<std::size_t>& indices) { return IndexSet(n, indices); }

/// Heavy catalog edges missed by the candidate subset.
inline NetReport check_net(const HyperedgeCatalog& catalog, const IndexSet& net, double eps) {
    NetReport rep;
    rep.threshold = heavy_threshold(catalog.universe(), eps);
    for (const auto& e : catalog.edges()) {
        if (e.size() < rep.threshold) continue;
        ++rep.edges_checked;
        if (!e.intersects(net)) rep.uncovered.push_back({e, catalog.witness(e)});
    }
    return rep;
}

inline ApproximationReport check_approximation(const HyperedgeCatalog& catalog, const IndexSet& sample, double eps) {
    ApproximationReport rep;
    const double n = static_cast<double>(catalog.universe());
    const double a = static_cast<double>(sample.size());
    for (const auto& e : catalog.edges()) {
        const double dev = std::abs(static_cast<double>(e.intersection_size(sample)) / a - static_cast<double>(e.size()) / n);
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (dev > eps) rep.violations.push_back({e, dev, catalog.witness(e)});
    }
    return rep;
}

inline bool within_oracle_guard(const MovingPointSet& set, const RangeFamily& family, const EnumerationOptions& opts) {
    const std::size_t limit = opts.max_points ? opts.max_points : default_oracle_limit(set.dim(), family);
    if (family.tag == FamilyTag::bounded_cones && set.dim() >= 3) return false;
    return set.size() <= limit;
}

inline NetReport verify_eps_net(const EpsNet& net, const MovingPointSet& set, const RangeFamily& family,
                                const EnumerationOptions& opts = {}) {
    const auto catalog = enumerate_kinetic_hyperedges(set, family, opts);
    return check_net(catalog, as_index_set(set.size(), net.indices), net.epsilon);
}

inline ApproximationReport verify_eps_approximation(const EpsApproximation& approx, const MovingPointSet& set,
                                                    const RangeFamily& family, const EnumerationOptions& opts = {}) {
    const auto catalog = enumerate_kinetic_hyperedges(set, family, opts);
    return check_approximation(catalog, as_index_set(set.size(), approx.indices), approx.epsilon);
}

/// Random subset of the computed size, redrawn until the catalog check
/// passes. Above the oracle guard the first draw is returned unverified.
inline EpsNet build_eps_net(const MovingPointSet& set, const RangeFamily& family, double eps, const SampleConfig& cfg = {}) {
    require_epsilon(eps);
    cfg.validate();
    EpsNet net;
    net.epsilon = eps;
    net.family = family;
    net.seed = cfg.seed;
    net.size_constant = cfg.size_constant;
    net.vc = resolve_vc(set, family, cfg);
    const std::size_t n = set.size();
    const std::size_t m = net_size(n, net.vc, eps, cfg.size_constant);

    auto draw = [&](int attempt) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
        return rng.sample_without_replacement(n, m);
    };
    if (m == n) {
        // The whole set hits every nonempty edge.
        net.indices = draw(1);
        net.attempts = 1;
        net.status = Verification::verified;
        return net;
    }
    if (!within_oracle_guard(set, family, cfg.enumeration)) {
        net.indices = draw(1);
        net.attempts = 1;
        return net;
    }
    const auto catalog = enumerate_kinetic_hyperedges(set, family, cfg.enumeration);
    std::size_t best = n + 1;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        auto idx = draw(attempt);
        const auto rep = check_net(catalog, as_index_set(n, idx), eps);
        if (rep.ok()) {
            net.indices = std::move(idx);
            net.attempts = attempt;
            net.status = Verification::verified;
            return net;
        }
        best = std::min(best, rep.largest_uncovered());
    }
    throw AttemptsExhausted("build_eps_net: no verified net in " + std::to_string(cfg.max_attempts) + " attempts",
                            static_cast<double>(best));
}

inline EpsApproximation build_eps_approximation(const MovingPointSet& set, const RangeFamily& family, double eps,
                                                const SampleConfig& cfg = {}) {
    require_epsilon(eps);
    cfg.validate();
    EpsApproximation approx;
    approx.epsilon = eps;
    approx.family = family;
    approx.seed = cfg.seed;
    approx.size_constant = cfg.size_constant;
    approx.vc = resolve_vc(set, family, cfg);
    const std::size_t n = set.size();
    const std::size_t m = approximation_size(n, approx.vc, eps, cfg.size_constant);

    auto draw = [&](int attempt) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
        return rng.sample_without_replacement(n, m);
    };
    if (m == n) {
        approx.indices = draw(1);
        approx.attempts = 1;
        approx.status = Verification::verified;
        approx.max_deviation = 0.0;
        return approx;
    }
    if (!within_oracle_guard(set, family, cfg.enumeration)) {
        approx.indices = draw(1);
        approx.attempts = 1;
        return approx;
    }
    const auto catalog = enumerate_kinetic_hyperedges(set, family, cfg.enumeration);
    double best = INFINITY;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        auto idx = draw(attempt);
        const auto rep = check_approximation(catalog, as_index_set(n, idx), eps);
        if (rep.ok()) {
            approx.indices = std::move(idx);
            approx.attempts = attempt;
            approx.status = Verification::verified;
            approx.max_deviation = rep.max_deviation;
            return approx;
        }
        best = std::min(best, rep.max_deviation);
    }
    throw AttemptsExhausted("build_eps_approximation: no verified sample in " + std::to_string(cfg.max_attempts) + " attempts",
                            best);
}

namespace detail {

inline void write_sample(std::ostream& os, const char* kind, double eps, double c, std::uint64_t seed, const RangeFamily& f,
                         std::size_t vc, int attempts, Verification st, const std::vector<std::size_t>& idx) {
    os << "# " << kind << "\n";
    os << "# epsilon: " << format_double(eps) << "\n";
    os << "# constant: " << format_double(c) << "\n";
    os << "# seed: " << seed << "\n";
    os << "# family: " << describe(f) << "\n";
    os << "# vc: " << vc << "\n";
    os << "# attempts: " << attempts << "\n";
    os << "# verified: " << (st == Verification::verified ? "yes" : "no") << "\n";
    for (auto i : idx) os << i << "\n";
}

}  // namespace detail

inline void write_net(std::ostream& os, const EpsNet& n) {
    detail::write_sample(os, "eps-net", n.epsilon, n.size_constant, n.seed, n.family, n.vc, n.attempts, n.status, n.indices);
}

inline void write_approximation(std::ostream& os, const EpsApproximation& a) {
    detail::write_sample(os, "eps-approximation", a.epsilon, a.size_constant, a.seed, a.family, a.vc, a.attempts, a.status,
                         a.indices);
}

}  // namespace kinetikos
