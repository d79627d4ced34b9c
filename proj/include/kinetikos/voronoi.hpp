#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kinetikos/envelope.hpp"
#include "kinetikos/parallel.hpp"
#include "kinetikos/sampling.hpp"

namespace kinetikos {

struct ConeCover {
    std::vector<Point> axes;
    std::size_t count() const noexcept { return axes.size(); }
};

/// Unit axes whose 60 degree cones cover the sphere: every unit vector is
/// within 30 degrees of some axis. The 3-d set was found numerically; its
/// covering radius is about 29.82 degrees.
inline ConeCover sixty_degree_cover(int d) {
    ConeCover c;
    switch (d) {
        case 1: c.axes = {Point{1.0}, Point{-1.0}}; break;
        case 2:
            for (int i = 0; i < 6; ++i) {
                const double a = i * std::numbers::pi / 3.0;
                c.axes.push_back(Point{std::cos(a), std::sin(a)});
            }
            break;
        case 3: {
            static constexpr double raw[][3] = {
                {-0.15737409460520765, 0.3427012116618671, -0.9261691389118293},
                {0.6050061492888782, -0.08190318613029389, 0.7919971132676875},
                {-0.07054383870631974, -0.7097760163738258, 0.7008862770814389},
                {0.8500405985498108, 0.5026155523494412, 0.15750741999520373},
                {-0.6637959917160091, -0.36267151849185797, -0.6540980439174007},
                {-0.7253625978455485, 0.5117700548614725, -0.4603699736014967},
                {-0.7283754564435372, -0.6676986642044582, 0.15377804872689427},
                {-0.5260431626681059, 0.7236151142473659, 0.4468330308324447},
                {0.36587500602321854, 0.8591943909616, -0.35765972446955113},
                {-0.9937807331465595, 0.10986793038341355, -0.018135388056287786},
                {0.9923948902098199, -0.12131690504773177, 0.02084683273495825},
                {-0.14414662982675336, -0.9699192034793075, -0.19615934296294582},
                {-0.14291206310809149, 0.9700721596151494, -0.1963062590896915},
                {0.6460696263481475, 0.21992746517857154, -0.7309076193134761},
                {0.5440615580075494, -0.7891926230371961, 0.2849070459677476},
                {0.610027164606935, -0.6119186107165161, -0.5034108384812473},
                {-0.005608814426212078, -0.4298977064901517, -0.9028601791834878},
                {-0.6979126429699943, -0.07910282210432368, 0.711801015957247},
                {-0.03314070969963742, 0.14804130948635208, 0.9884257503961391},
                {0.29190576214558955, 0.7463216443816828, 0.5981597020475582},
            };
            for (const auto& a : raw) c.axes.push_back(normalized(Point{a[0], a[1], a[2]}));
            break;
        }
        default: throw PreconditionError("sixty_degree_cover: dimension must be 1, 2 or 3");
    }
    return c;
}

/// Largest angle (radians) between a unit vector and its nearest axis.
inline double angular_gap(const ConeCover& cover, const Point& u) {
    double best = -1.0;
    for (const auto& a : cover.axes) best = std::max(best, dot(a, u));
    return std::acos(std::clamp(best, -1.0, 1.0));
}

struct FacilitySet {
    std::vector<std::size_t> indices;
    std::size_t k = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double size_constant = 0.0;
    std::size_t vc = 0;
    Verification status = Verification::unverified;

    /// The size the construction promises not to exceed.
    std::size_t size_bound(std::size_t n) const {
        const double kk = static_cast<double>(k);
        return std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(size_constant * static_cast<double>(vc) * kk * std::log(kk) - 1e-9)));
    }
};

/// Facilities as an eps-net with eps = 1/k for the bounded 60 degree cones.
inline FacilitySet select_facilities(const MovingPointSet& set, std::size_t k, const SampleConfig& cfg = {}) {
    if (k < 2 || k > set.size()) throw PreconditionError("select_facilities: need 2 <= k <= n");
    const double eps = 1.0 / static_cast<double>(k);
    const auto net = build_eps_net(set, RangeFamily::bounded_cones(), eps, cfg);
    FacilitySet f;
    f.indices = net.indices;
    f.k = k;
    f.epsilon = eps;
    f.seed = cfg.seed;
    f.size_constant = cfg.size_constant;
    f.vc = net.vc;
    f.status = net.status;
    return f;
}

struct CellLoadReport {
    double time = 0.0;
    std::vector<std::size_t> loads;  // facilities first, then the static sites
    std::size_t max_load = 0;
    std::size_t argmax_site = 0;
};

namespace detail {

inline std::vector<Point> site_positions(const MovingPointSet& set, const std::vector<std::size_t>& facilities,
                                         std::span<const Point> statics, double t) {
    std::vector<Point> out;
    out.reserve(facilities.size() + statics.size());
    for (auto i : facilities) out.push_back(set[i](t));
    for (const auto& s : statics) out.push_back(s);
    return out;
}

inline void finish_loads(CellLoadReport& r) {
    r.max_load = 0;
    r.argmax_site = 0;
    for (std::size_t s = 0; s < r.loads.size(); ++s)
        if (r.loads[s] > r.max_load) {
            r.max_load = r.loads[s];
            r.argmax_site = s;
        }
}

}  // namespace detail

/// Nearest-site tally at time t; ties go to the smaller site index.
inline CellLoadReport cell_loads(const MovingPointSet& set, const FacilitySet& facilities, std::span<const Point> statics, double t) {
    set.require_in_horizon(t);
    for (const auto& s : statics)
        if (s.dim() != set.dim()) throw DimensionMismatch("cell_loads: static site dimension");
    const auto sites = detail::site_positions(set, facilities.indices, statics, t);
    if (sites.empty()) throw PreconditionError("cell_loads: no sites");
    CellLoadReport r;
    r.time = t;
    r.loads.assign(sites.size(), 0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Point p = set[i](t);
        std::size_t best = 0;
        double bd = squared_distance(p, sites[0]);
        for (std::size_t s = 1; s < sites.size(); ++s) {
            const double dd = squared_distance(p, sites[s]);
            if (dd < bd) {
                bd = dd;
                best = s;
            }
        }
        ++r.loads[best];
    }
    detail::finish_loads(r);
    return r;
}

struct LoadSample {
    double time = 0.0;
    std::size_t max_load = 0;
    std::size_t argmax_site = 0;
};

struct BalanceReport {
    std::vector<LoadSample> series;  // in time order
    std::size_t max_load = 0;
    double time_of_max = 0.0;
    std::size_t argmax_site = 0;
    std::size_t bound = 0;  // C_d * ceil(n/k)
    std::size_t breakpoints = 0;

    bool ok() const noexcept { return max_load <= bound; }
};

inline std::size_t load_bound(int d, std::size_t n, std::size_t k) {
    return sixty_degree_cover(d).count() * ((n + k - 1) / k);
}

/// Maximum cell load over the horizon. Every point's nearest site is
/// tracked exactly as a lower envelope of squared distances, so loads are
/// evaluated once between each pair of consecutive breakpoints, plus at a
/// uniform grid of `grid` times (endpoints included).
inline BalanceReport verify_balanced(const MovingPointSet& set, const FacilitySet& facilities, std::span<const Point> statics,
                                     std::size_t grid = 1000, unsigned threads = default_threads()) {
    std::vector<Trajectory> sites;
    for (auto i : facilities.indices) sites.push_back(set[i]);
    for (const auto& s : statics) {
        if (s.dim() != set.dim()) throw DimensionMismatch("verify_balanced: static site dimension");
        sites.push_back(Trajectory::stationary(s));
    }
    if (sites.empty()) throw PreconditionError("verify_balanced: no sites");
    const double T = set.horizon();
    std::vector<EnvelopeSchedule> sched(set.size());
    parallel_for(set.size(), threads, [&](std::size_t i) { sched[i] = distance_envelope(set[i], sites, T); });

    std::vector<double> breaks{0.0, T};
    for (const auto& s : sched) breaks.insert(breaks.end(), s.breaks.begin(), s.breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<double> times;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) times.push_back(0.5 * (breaks[i] + breaks[i + 1]));
    if (grid == 1) times.push_back(0.0);
    for (std::size_t g = 0; grid > 1 && g < grid; ++g) times.push_back(T * static_cast<double>(g) / static_cast<double>(grid - 1));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    BalanceReport rep;
    rep.breakpoints = breaks.size() - 2;
    rep.bound = load_bound(set.dim(), set.size(), facilities.k);
    std::vector<std::size_t> loads(sites.size());
    for (double t : times) {
        std::fill(loads.begin(), loads.end(), 0);
        for (const auto& s : sched) ++loads[s.at(t)];
        LoadSample ls{t, 0, 0};
        for (std::size_t s = 0; s < loads.size(); ++s)
            if (loads[s] > ls.max_load) {
                ls.max_load = loads[s];
                ls.argmax_site = s;
            }
        if (ls.max_load > rep.max_load) {
            rep.max_load = ls.max_load;
            rep.time_of_max = t;
            rep.argmax_site = ls.argmax_site;
        }
        rep.series.push_back(ls);
    }
    return rep;
}

}  // namespace kinetikos
