#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <array>
#include <unordered_set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kinetikos/errors.hpp"
#include "kinetikos/index_set.hpp"
#include "kinetikos/point.hpp"
#include "kinetikos/trajectory.hpp"

namespace kinetikos {

/// { x : normal . x >= offset }, with a unit normal.
struct Halfspace {
    Point normal;
    double offset = 0.0;
};

/// Closed ball.
struct Ball {
    Point center;
    double radius = 0.0;
};

/// Cone with apex `apex`, unit axis `direction`, full opening `angle`
/// (radians), cut by the ball of radius `cap_radius` around the apex.
struct BoundedCone {
    Point apex;
    Point direction;
    double angle = std::numbers::pi / 3.0;
    double cap_radius = 1.0;
};

/// Closed interval on the line; only meaningful in dimension 1.
struct IntervalRange {
    double lower = 0.0;
    double upper = 0.0;
};

using Range = std::variant<Halfspace, Ball, BoundedCone, IntervalRange>;

enum class FamilyTag { halfspaces, balls, bounded_cones, intervals };

inline std::string_view to_string(FamilyTag tag) {
    switch (tag) {
        case FamilyTag::halfspaces: return "halfspaces";
        case FamilyTag::balls: return "balls";
        case FamilyTag::bounded_cones: return "bounded_cones";
        case FamilyTag::intervals: return "intervals";
    }
    return "?";
}

inline FamilyTag parse_family(std::string_view s) {
    if (s == "halfspaces") return FamilyTag::halfspaces;
    if (s == "balls") return FamilyTag::balls;
    if (s == "bounded_cones" || s == "cones") return FamilyTag::bounded_cones;
    if (s == "intervals") return FamilyTag::intervals;
    throw PreconditionError("unknown range family '" + std::string(s) + "'");
}

/// A family of ranges. Cones use a fixed opening angle.
struct RangeFamily {
    FamilyTag tag = FamilyTag::halfspaces;
    double cone_angle = std::numbers::pi / 3.0;

    static RangeFamily halfspaces() { return {FamilyTag::halfspaces}; }
    static RangeFamily balls() { return {FamilyTag::balls}; }
    static RangeFamily intervals() { return {FamilyTag::intervals}; }
    static RangeFamily bounded_cones(double angle = std::numbers::pi / 3.0) { return {FamilyTag::bounded_cones, angle}; }

    friend bool operator==(const RangeFamily&, const RangeFamily&) = default;
};

inline std::string describe(const RangeFamily& f) { return std::string(to_string(f.tag)); }

inline void check_range(const Halfspace& h) {
    if (std::abs(norm(h.normal) - 1.0) > 1e-12) throw PreconditionError("Halfspace: normal must be a unit vector");
}
inline void check_range(const Ball& b) {
    if (!(b.radius >= 0.0)) throw PreconditionError("Ball: negative radius");
}
inline void check_range(const BoundedCone& c) {
    require_same_dimension(c.apex, c.direction);
    if (std::abs(norm(c.direction) - 1.0) > 1e-12) throw PreconditionError("BoundedCone: axis must be at unit distance");
    if (!(c.angle > 0.0 && c.angle <= std::numbers::pi)) throw PreconditionError("BoundedCone: angle must lie in (0, pi]");
    if (!(c.cap_radius > 0.0)) throw PreconditionError("BoundedCone: cap radius must be positive");
}
inline void check_range(const IntervalRange& r) {
    if (!(r.lower <= r.upper)) throw PreconditionError("IntervalRange: lower > upper");
}
inline void check_range(const Range& r) {
    std::visit([](const auto& x) { check_range(x); }, r);
}

/// Dimension a range lives in; intervals report 1.
inline int dimension_of(const Range& r) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Halfspace>) return x.normal.dim();
            else if constexpr (std::is_same_v<T, Ball>) return x.center.dim();
            else if constexpr (std::is_same_v<T, BoundedCone>) return x.apex.dim();
            else return 1;
        },
        r);
}

// Closed ranges: boundary points are members.
inline bool contains(const Halfspace& h, const Point& x) { return dot(h.normal, x) >= h.offset; }
inline bool contains(const Ball& b, const Point& x) { return squared_distance(b.center, x) <= b.radius * b.radius; }
inline bool contains(const BoundedCone& c, const Point& x) {
    const Point v = x - c.apex;
    const double len = norm(v);
    return len <= c.cap_radius && dot(v, c.direction) >= len * std::cos(0.5 * c.angle);
}
inline bool contains(const IntervalRange& r, const Point& x) { return x[0] >= r.lower && x[0] <= r.upper; }

inline bool contains(const Range& r, const Point& x) {
    if (dimension_of(r) != x.dim()) throw DimensionMismatch("contains: range and point dimensions differ");
    return std::visit([&](const auto& range) { return contains(range, x); }, r);
}

/// Membership of every point, as an index set.
inline IndexSet trace_of(const Range& r, std::span<const Point> points) {
    IndexSet s(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        if (contains(r, points[i])) s.insert(i);
    return s;
}

/// Enumeration guard for canonical ranges: C(n, d) * n.
inline constexpr double kCanonicalGuard = 1e7;

namespace detail {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Point to_point(const Vec& v, int dim) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = v(i);
    return p;
}

/// Smallest scale factor that keeps every non-tuple point on its side:
/// half the minimum ratio |base value| / |perturbation effect|.
inline double safe_step(std::span<const double> base, std::span<const double> effect, double cap) {
    double step = cap;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (effect[i] == 0.0) continue;
        step = std::min(step, 0.5 * std::abs(base[i]) / std::abs(effect[i]));
    }
    return step;
}

template <typename Emit>
void emit_checked(const Range& r, std::span<const Point> pts, Emit& emit) {
    IndexSet s = trace_of(r, pts);
    if (!s.empty()) emit(s, r);
}

/// Halfspaces realizing every trace: for each d-tuple, the hyperplane
/// through it with both orientations and all in/out choices for the tuple.
template <typename Emit>
void halfspace_ranges(std::span<const Point> pts, int d, Emit& emit) {
    const std::size_t n = pts.size();
    if (n == 0) return;
    // Range containing everything.
    {
        Point nrm(d);
        nrm[0] = 1.0;
        double lo = pts[0][0];
        for (const auto& p : pts) lo = std::min(lo, p[0]);
        emit_checked(Halfspace{nrm, lo - 1.0}, pts, emit);
    }
    if (n <= static_cast<std::size_t>(d)) {
        // Every subset of an affinely independent set is separable.
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
            Mat m(static_cast<Eigen::Index>(n), d + 1);
            Vec rhs(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                for (int j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), j) = pts[i][j];
                m(static_cast<Eigen::Index>(i), d) = -1.0;
                rhs(static_cast<Eigen::Index>(i)) = (mask >> i) & 1U ? 1.0 : -1.0;
            }
            const Vec sol = m.completeOrthogonalDecomposition().solve(rhs);
            Point nrm = to_point(sol, d);
            const double len = norm(nrm);
            if (len < 1e-12) continue;
            emit_checked(Halfspace{nrm * (1.0 / len), sol(d) / len}, pts, emit);
        }
        return;
    }
    for_each_combination(n, static_cast<std::size_t>(d), [&](std::span<const std::size_t> tuple) {
        // Hyperplane a.x = b through the tuple: kernel of [p_i | -1].
        Mat sys(d, d + 1);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) sys(i, j) = pts[tuple[static_cast<std::size_t>(i)]][j];
            sys(i, d) = -1.0;
        }
        Eigen::FullPivLU<Mat> lu(sys);
        const Mat ker = lu.kernel();
        if (ker.cols() != 1) return true;
        Vec k = ker.col(0);
        Point a = to_point(k, d);
        const double len = norm(a);
        if (len < 1e-14) return true;
        a *= 1.0 / len;
        const double b = k(d) / len;

        for (double orient : {1.0, -1.0}) {
            const Point nrm = a * orient;
            const double off = b * orient;
            Mat m(d + 1, d + 1);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) m(i, j) = pts[tuple[static_cast<std::size_t>(i)]][j];
                m(i, d) = -1.0;
            }
            for (int j = 0; j < d; ++j) m(d, j) = nrm[j];
            m(d, d) = 0.0;
            Eigen::PartialPivLU<Mat> solver(m);
            std::vector<double> base, effect;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
                Vec rhs(d + 1);
                for (int i = 0; i < d; ++i) rhs(i) = (mask >> i) & 1U ? 1.0 : -1.0;
                rhs(d) = 0.0;
                const Vec u = solver.solve(rhs);
                const Point du = to_point(u, d);
                base.clear();
                effect.clear();
                for (std::size_t q = 0; q < n; ++q) {
                    if (std::find(tuple.begin(), tuple.end(), q) != tuple.end()) continue;
                    base.push_back(dot(nrm, pts[q]) - off);
                    effect.push_back(dot(du, pts[q]) - u(d));
                }
                const double step = safe_step(base, effect, 1e-3 / std::max(1.0, norm(du)));
                Point nn = nrm + du * step;
                double oo = off + u(d) * step;
                const double l2 = norm(nn);
                emit_checked(Halfspace{nn * (1.0 / l2), oo / l2}, pts, emit);
            }
        }
        return true;
    });
}

/// Balls realizing every trace: in (center, |c|^2 - r^2) coordinates the
/// traces are the cells of a hyperplane arrangement, and each cell touches
/// a vertex given by the circumsphere of a (d+1)-tuple.
template <typename Emit>
void ball_ranges(std::span<const Point> pts, int d, Emit& emit) {
    const std::size_t n = pts.size();
    if (n == 0) return;
    {
        Point c(d);
        for (const auto& p : pts) c += p;
        c *= 1.0 / static_cast<double>(n);
        double r = 0.0;
        for (const auto& p : pts) r = std::max(r, distance(c, p));
        emit_checked(Ball{c, r + 1.0}, pts, emit);
    }
    auto ball_from = [&](const Vec& sol) -> std::optional<Ball> {
        const Point c = to_point(sol, d);
        const double r2 = squared_norm(c) - sol(d);
        if (!(r2 > 0.0)) return std::nullopt;
        return Ball{c, std::sqrt(r2)};
    };
    if (n <= static_cast<std::size_t>(d) + 1) {
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
            Mat m(static_cast<Eigen::Index>(n), d + 1);
            Vec rhs(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                const auto row = static_cast<Eigen::Index>(i);
                for (int j = 0; j < d; ++j) m(row, j) = -2.0 * pts[i][j];
                m(row, d) = 1.0;
                rhs(row) = -squared_norm(pts[i]) - ((mask >> i) & 1U ? 1.0 : -1.0);
            }
            const Vec sol = m.completeOrthogonalDecomposition().solve(rhs);
            if (auto b = ball_from(sol)) emit_checked(*b, pts, emit);
        }
        return;
    }
    for_each_combination(n, static_cast<std::size_t>(d) + 1, [&](std::span<const std::size_t> tuple) {
        Mat m(d + 1, d + 1);
        Vec rhs(d + 1);
        for (int i = 0; i <= d; ++i) {
            const Point& p = pts[tuple[static_cast<std::size_t>(i)]];
            for (int j = 0; j < d; ++j) m(i, j) = -2.0 * p[j];
            m(i, d) = 1.0;
            rhs(i) = -squared_norm(p);
        }
        Eigen::FullPivLU<Mat> solver(m);
        if (solver.rank() < d + 1) return true;
        const Vec vertex = solver.solve(rhs);
        const Point c0 = to_point(vertex, d);
        std::vector<double> base, effect;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (d + 1)); ++mask) {
            Vec target(d + 1);
            for (int i = 0; i <= d; ++i) target(i) = (mask >> i) & 1U ? -1.0 : 1.0;
            const Vec u = solver.solve(target);
            const Point dc = to_point(u, d);
            base.clear();
            effect.clear();
            for (std::size_t q = 0; q < n; ++q) {
                if (std::find(tuple.begin(), tuple.end(), q) != tuple.end()) continue;
                base.push_back(squared_norm(pts[q]) - 2.0 * dot(pts[q], c0) + vertex(d));
                effect.push_back(-2.0 * dot(pts[q], dc) + u(d));
            }
            const double scale = std::max(1.0, squared_norm(c0) + std::abs(vertex(d)));
            const double step = safe_step(base, effect, 1e-3 * scale / std::max(1.0, u.norm()));
            if (auto b = ball_from(vertex + step * u)) emit_checked(*b, pts, emit);
        }
        return true;
    });
}

/// All runs of consecutive points in sorted order, each with an interval
/// whose ends sit at gap midpoints.
template <typename Emit>
void interval_ranges(std::span<const Point> pts, Emit& emit, bool as_cones, double cone_angle) {
    const std::size_t n = pts.size();
    if (n == 0) return;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && a < b);
    });
    std::vector<double> cuts(n + 1);
    cuts[0] = pts[order[0]][0] - 1.0;
    cuts[n] = pts[order[n - 1]][0] + 1.0;
    for (std::size_t i = 1; i < n; ++i) cuts[i] = 0.5 * (pts[order[i - 1]][0] + pts[order[i]][0]);
    IndexSet s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s = IndexSet(n);
        for (std::size_t j = i; j < n; ++j) {
            s.insert(order[j]);
            // Points sharing a coordinate cannot be split.
            if (j + 1 < n && pts[order[j + 1]][0] == pts[order[j]][0]) continue;
            if (i > 0 && pts[order[i - 1]][0] == pts[order[i]][0]) break;
            Range r = IntervalRange{cuts[i], cuts[j + 1]};
            if (as_cones) r = BoundedCone{Point{cuts[i]}, Point{1.0}, cone_angle, cuts[j + 1] - cuts[i]};
            emit(static_cast<const IndexSet&>(s), static_cast<const Range&>(r));
        }
    }
}

/// Emits bounded cones of one opening angle, each distinct trace once.
template <typename Emit>
class ConeSink {
public:
    ConeSink(std::span<const Point> pts, double angle, Emit& emit)
        : pts_(pts), angle_(angle), cos_half_(std::cos(0.5 * angle)), emit_(emit), dist_(pts.size()) {}

    /// The cone (apex, dir, cap).
    void offer(const Point& apex, const Point& dir, double cap) {
        if (!(cap > 0.0)) return;
        const std::size_t n = pts_.size();
        if (n <= 64) {
            std::uint64_t mask = 0;
            for (std::size_t q = 0; q < n; ++q) {
                const Point v = pts_[q] - apex;
                const double len = norm(v);
                if (len <= cap && dot(v, dir) >= len * cos_half_) mask |= std::uint64_t{1} << q;
            }
            if (mask && seen_.insert(mask).second) emit_mask(mask, apex, dir, cap);
            return;
        }
        const Range r = BoundedCone{apex, dir, angle_, cap};
        IndexSet s = trace_of(r, pts_);
        if (!s.empty() && seen_large_.insert(s).second) emit_(static_cast<const IndexSet&>(s), r);
    }

    /// Every distance prefix of the points inside the infinite cone.
    void offer_prefixes(const Point& apex, const Point& dir) {
        const std::size_t n = pts_.size();
        members_.clear();
        for (std::size_t q = 0; q < n; ++q) {
            const Point v = pts_[q] - apex;
            const double len = norm(v);
            if (dot(v, dir) >= len * cos_half_) members_.emplace_back(len, q);
        }
        std::sort(members_.begin(), members_.end());
        for (std::size_t m = 0; m < members_.size(); ++m) {
            if (m + 1 < members_.size() && members_[m + 1].first == members_[m].first) continue;
            const double cap =
                m + 1 < members_.size() ? 0.5 * (members_[m].first + members_[m + 1].first) : members_[m].first + 1.0;
            offer(apex, dir, cap);
        }
    }

private:
    void emit_mask(std::uint64_t mask, const Point& apex, const Point& dir, double cap) {
        IndexSet s(pts_.size());
        for (std::size_t q = 0; q < pts_.size(); ++q)
            if ((mask >> q) & 1U) s.insert(q);
        emit_(static_cast<const IndexSet&>(s), Range{BoundedCone{apex, dir, angle_, cap}});
    }

    std::span<const Point> pts_;
    double angle_;
    double cos_half_;
    Emit& emit_;
    std::vector<double> dist_;
    std::vector<std::pair<double, std::size_t>> members_;
    std::unordered_set<std::uint64_t> seen_;
    std::unordered_set<IndexSet, IndexSetHash> seen_large_;
};

/// Planar cones of a fixed opening angle, parametrized by z = (a_x, a_y,
/// phi, rho): apex, axis angle and cap. A point changes membership only by
/// crossing one of the two boundary rays or the cap circle, so every trace
/// is attained next to a vertex of that arrangement in z-space. Vertices
/// come from tight constraints (cap circle through 3 points + a ray through
/// one; circle through 2 + a point on each ray; circle through 2 + a ray
/// line through 2; a ray line through 2 + the other ray through 1, with all
/// caps). Each in/out choice of the tight constraints is then realized by
/// a short step along the solved direction.
template <typename Sink>
void planar_cone_vertices(std::span<const Point> raw, double angle, Sink& sink) {
    const std::size_t n = raw.size();
    // Centered, unit-scale coordinates.
    Point center(2);
    for (const auto& p : raw) center += p;
    center *= 1.0 / static_cast<double>(n);
    double scale = 0.0;
    for (const auto& p : raw) scale = std::max(scale, distance(p, center));
    if (scale == 0.0) scale = 1.0;
    std::vector<Point> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = (raw[i] - center) * (1.0 / scale);

    const double h = 0.5 * angle;
    const double sin_t = std::sin(angle), cos_t = std::cos(angle);
    enum Kind : int { ray1 = 0, ray2 = 1, cap = 2 };
    struct Tight {
        Kind kind;
        std::size_t point;
    };
    auto unit_at = [](double a) { return Point{std::cos(a), std::sin(a)}; };
    auto cross = [](const Point& u, const Point& v) { return u[0] * v[1] - u[1] * v[0]; };
    auto angle_of = [](const Point& v) { return std::atan2(v[1], v[0]); };

    // Per point and constraint kind: value at z (positive = inside) and
    // gradient in z.
    std::vector<std::array<double, 3>> value(n);
    std::vector<std::array<Eigen::Vector4d, 3>> grad(n);
    auto linearize = [&](const Eigen::Vector4d& z) {
        const Point a{z(0), z(1)};
        const Point u1 = unit_at(z(2) - h), u2 = unit_at(z(2) + h);
        for (std::size_t i = 0; i < n; ++i) {
            const Point v = q[i] - a;
            const double len = norm(v);
            value[i][ray1] = cross(u1, v);
            grad[i][ray1] << u1[1], -u1[0], -dot(u1, v), 0.0;
            value[i][ray2] = -cross(u2, v);
            grad[i][ray2] << -u2[1], u2[0], dot(u2, v), 0.0;
            value[i][cap] = z(3) - len;
            grad[i][cap] << (len > 0 ? v[0] / len : 0.0), (len > 0 ? v[1] / len : 0.0), 0.0, 1.0;
        }
    };

    auto offer = [&](const Eigen::Vector4d& z, bool prefixes) {
        const Point apex = center + Point{z(0), z(1)} * scale;
        const Point dir = unit_at(z(2));
        if (prefixes) sink.offer_prefixes(apex, dir);
        else sink.offer(apex, dir, z(3) * scale);
    };

    // Steps into every cell around z. Without a cap constraint only the
    // (apex, axis) coordinates move and every cap is tried.
    std::vector<char> tight_flag(3 * n);
    auto around = [&](const Eigen::Vector4d& z, std::span<const Tight> tight) {
        const int m = static_cast<int>(tight.size());
        const bool with_cap = m == 4;
        linearize(z);
        Eigen::Matrix4d jac = Eigen::Matrix4d::Identity();
        for (int r = 0; r < m; ++r) {
            const auto& t = tight[static_cast<std::size_t>(r)];
            jac.row(r) = grad[t.point][t.kind].transpose();
        }
        // Without a cap the last row pins rho.
        if (!with_cap) jac.row(3) << 0.0, 0.0, 0.0, 1.0;
        Eigen::FullPivLU<Eigen::Matrix4d> lu(jac);
        if (!lu.isInvertible()) return;
        const Eigen::Matrix4d inv = lu.inverse();
        std::fill(tight_flag.begin(), tight_flag.end(), 0);
        for (const auto& t : tight) tight_flag[3 * t.point + t.kind] = 1;
        const int kinds = with_cap ? 3 : 2;
        for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
            Eigen::Vector4d dz = Eigen::Vector4d::Zero();
            for (int r = 0; r < m; ++r) dz += ((mask >> r) & 1U ? 1.0 : -1.0) * inv.col(r);
            double step = 1e-4 / std::max(1.0, dz.norm());
            for (std::size_t i = 0; i < n; ++i)
                for (int k = 0; k < kinds; ++k) {
                    if (tight_flag[3 * i + static_cast<std::size_t>(k)]) continue;
                    const double e = grad[i][k].dot(dz);
                    if (e != 0.0) step = std::min(step, 0.5 * std::abs(value[i][k]) / std::abs(e));
                }
            offer(z + step * dz, !with_cap);
        }
    };

    auto ray_phi = [&](Kind kind, const Point& ray_dir) { return angle_of(ray_dir) + (kind == ray1 ? h : -h); };

    // Circle through three points, plus one point on either ray.
    for_each_combination(n, 3, [&](std::span<const std::size_t> t) {
        const Point& p0 = q[t[0]];
        const Point b = q[t[1]] - p0, c = q[t[2]] - p0;
        const double den = 2.0 * cross(b, c);
        if (std::abs(den) < 1e-14) return true;
        const double bb = squared_norm(b), cc = squared_norm(c);
        const Point a = p0 + Point{(c[1] * bb - b[1] * cc) / den, (b[0] * cc - c[0] * bb) / den};
        const double rho = distance(a, p0);
        for (std::size_t l = 0; l < n; ++l) {
            const Point v = q[l] - a;
            if (squared_norm(v) < 1e-20) continue;
            for (Kind kind : {ray1, ray2}) {
                const Tight tight[4] = {{cap, t[0]}, {cap, t[1]}, {cap, t[2]}, {kind, l}};
                around(Eigen::Vector4d(a[0], a[1], ray_phi(kind, v), rho), tight);
            }
        }
        return true;
    });

    for_each_combination(n, 2, [&](std::span<const std::size_t> bis) {
        const std::size_t i = bis[0], j = bis[1];
        const Point mid = (q[i] + q[j]) * 0.5;
        const Point e = q[j] - q[i];
        const double elen = norm(e);
        if (elen < 1e-14) return true;
        const Point w{-e[1] / elen, e[0] / elen};

        // Circle through i, j with l on the first ray and m on the second:
        // the apex sees l and m at angle exactly theta.
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t m = 0; m < n; ++m) {
                if (l == m) continue;
                const Point al = q[l] - mid, am = q[m] - mid;
                const double c0 = cross(al, am), c1 = -(cross(al, w) + cross(w, am));
                const double d0 = dot(al, am), d1 = -(dot(al, w) + dot(w, am));
                // cross*cos(theta) - dot*sin(theta) = 0 along the bisector.
                const double k0 = c0 * cos_t - d0 * sin_t, k1 = c1 * cos_t - d1 * sin_t, k2 = -sin_t;
                double roots[2];
                int count = 0;
                if (std::abs(k2) < 1e-14) {
                    if (std::abs(k1) > 1e-14) roots[count++] = -k0 / k1;
                } else {
                    const double disc = k1 * k1 - 4.0 * k2 * k0;
                    if (disc >= 0.0) {
                        const double sq = std::sqrt(disc);
                        roots[count++] = (-k1 + sq) / (2.0 * k2);
                        roots[count++] = (-k1 - sq) / (2.0 * k2);
                    }
                }
                for (int r = 0; r < count; ++r) {
                    const Point a = mid + w * roots[r];
                    const Point vl = q[l] - a, vm = q[m] - a;
                    if (cross(vl, vm) * sin_t + dot(vl, vm) * cos_t <= 0.0) continue;
                    if (squared_norm(vl) < 1e-20 || squared_norm(vm) < 1e-20) continue;
                    const Tight tight[4] = {{cap, i}, {cap, j}, {ray1, l}, {ray2, m}};
                    around(Eigen::Vector4d(a[0], a[1], ray_phi(ray1, vl), distance(a, q[i])), tight);
                }
            }
        }

        // Circle through i, j with one ray along the line through l, m.
        for_each_combination(n, 2, [&](std::span<const std::size_t> line) {
            const std::size_t l = line[0], m = line[1];
            const Point u = normalized(q[m] - q[l]);
            const double ue = dot(u, e);
            if (std::abs(ue) < 1e-14) return true;
            const Point a = q[l] + u * (dot(mid - q[l], e) / ue);
            for (double orient : {1.0, -1.0})
                for (Kind kind : {ray1, ray2}) {
                    const Tight tight[4] = {{cap, i}, {cap, j}, {kind, l}, {kind, m}};
                    around(Eigen::Vector4d(a[0], a[1], ray_phi(kind, u * orient), distance(a, q[i])), tight);
                }
            return true;
        });
        return true;
    });

    // One ray along the line through l, m and the other ray through k;
    // every cap.
    for_each_combination(n, 2, [&](std::span<const std::size_t> line) {
        const std::size_t l = line[0], m = line[1];
        const Point u0 = normalized(q[m] - q[l]);
        for (double orient : {1.0, -1.0})
            for (Kind kind : {ray1, ray2}) {
                const Point r = u0 * orient;
                const double phi = ray_phi(kind, r);
                const Point r2 = unit_at(kind == ray1 ? phi + h : phi - h);
                const double den = cross(r, r2);
                if (std::abs(den) < 1e-14) continue;
                const Kind other = kind == ray1 ? ray2 : ray1;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == l || k == m) continue;
                    const double t = cross(q[k] - q[l], r2) / den;
                    const Point a = q[l] + r * t;
                    const Tight tight[3] = {{kind, l}, {kind, m}, {other, k}};
                    around(Eigen::Vector4d(a[0], a[1], phi, 0.0), tight);
                }
            }
        return true;
    });
}

/// Bounded cones. d = 1 reduces to intervals. In the plane the vertex
/// enumeration above is combined with apexes at (or just in front of) each
/// point, axes through other points or grazing them, and every distance
/// prefix as cap, over opening angles {angle, angle +- 1e-6}.
template <typename Emit>
void cone_ranges(std::span<const Point> pts, int d, double angle0, Emit& emit) {
    const std::size_t n = pts.size();
    if (n == 0) return;
    if (d == 1) {
        interval_ranges(pts, emit, true, angle0);
        return;
    }
    if (d != 2) throw PreconditionError("bounded-cone canonical ranges are available for d <= 2 only");
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) min_gap = std::min(min_gap, distance(pts[i], pts[j]));
    if (!std::isfinite(min_gap) || min_gap == 0.0) min_gap = 1.0;
    const double apex_shift = 1e-6 * min_gap;
    constexpr double kGraze = 1e-7;

    const double angles[3] = {angle0, angle0 - 1e-6, std::min(angle0 + 1e-6, std::numbers::pi)};
    for (double angle : angles) {
        ConeSink<Emit> sink(pts, angle, emit);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Point v = pts[j] - pts[i];
                if (squared_norm(v) == 0.0) continue;
                const Point u = normalized(v);
                const double phi = std::atan2(u[1], u[0]);
                auto both = [&](const Point& dir) {
                    sink.offer_prefixes(pts[i], dir);
                    sink.offer_prefixes(pts[i] + dir * apex_shift, dir);
                };
                both(u);
                for (double side : {-1.0, 1.0})
                    for (double graze : {-kGraze, kGraze}) {
                        const double a = phi + side * (0.5 * angle0 + graze);
                        both(Point{std::cos(a), std::sin(a)});
                    }
            }
        }
        if (angle == angle0 && n >= 2) planar_cone_vertices(pts, angle0, sink);
    }
}

}  // namespace detail

inline void require_canonical_guard(std::size_t n, int d) {
    if (binomial(n, static_cast<std::size_t>(d)) * static_cast<double>(n) > kCanonicalGuard)
        throw GuardExceeded("canonical_ranges: C(n,d)*n exceeds " + std::to_string(kCanonicalGuard));
}

/// Visits (trace, witness range) for a finite set of ranges from the family
/// that together realize every nonempty trace the family can cut from the
/// points. Traces may repeat. The trace passed is exactly the set of points
/// the witness contains.
template <typename Visitor>
void for_each_canonical_trace(std::span<const Point> points, const RangeFamily& family, Visitor&& visit) {
    if (points.empty()) return;
    const int d = points.front().dim();
    for (const auto& p : points)
        if (p.dim() != d) throw DimensionMismatch("canonical ranges: mixed point dimensions");
    require_canonical_guard(points.size(), d);
    auto emit = [&](const IndexSet& s, const Range& r) { visit(s, r); };
    switch (family.tag) {
        case FamilyTag::intervals:
            if (d != 1) throw DimensionMismatch("interval family requires dimension 1");
            detail::interval_ranges(points, emit, false, 0.0);
            break;
        case FamilyTag::halfspaces: detail::halfspace_ranges(points, d, emit); break;
        case FamilyTag::balls: detail::ball_ranges(points, d, emit); break;
        case FamilyTag::bounded_cones: detail::cone_ranges(points, d, family.cone_angle, emit); break;
    }
}

/// The witness ranges of for_each_canonical_trace.
inline std::vector<Range> canonical_ranges(std::span<const Point> points, const RangeFamily& family) {
    std::vector<Range> out;
    for_each_canonical_trace(points, family, [&](const IndexSet&, const Range& r) { out.push_back(r); });
    return out;
}

}  // namespace kinetikos
