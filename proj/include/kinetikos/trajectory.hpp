#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kinetikos/errors.hpp"
#include "kinetikos/point.hpp"
#include "kinetikos/polynomial.hpp"
#include "kinetikos/random.hpp"

namespace kinetikos {

/// One moving point: a polynomial per coordinate.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<Polynomial> components) : components_(std::move(components)) {
        if (components_.empty() || static_cast<int>(components_.size()) > kMaxDimension)
            throw PreconditionError("Trajectory: unsupported dimension");
    }

    /// A point that never moves.
    static Trajectory stationary(const Point& p) {
        std::vector<Polynomial> cs;
        for (int i = 0; i < p.dim(); ++i) cs.push_back(Polynomial::constant(p[i]));
        return Trajectory(std::move(cs));
    }

    /// p(t) = origin + t * velocity.
    static Trajectory linear(const Point& origin, const Point& velocity) {
        require_same_dimension(origin, velocity);
        std::vector<Polynomial> cs;
        for (int i = 0; i < origin.dim(); ++i) cs.push_back(Polynomial{origin[i], velocity[i]});
        return Trajectory(std::move(cs));
    }

    int dim() const noexcept { return static_cast<int>(components_.size()); }
    const std::vector<Polynomial>& components() const noexcept { return components_; }
    const Polynomial& component(int i) const { return components_.at(static_cast<std::size_t>(i)); }
    Polynomial& component(int i) { return components_.at(static_cast<std::size_t>(i)); }

    int degree() const noexcept {
        int deg = 0;
        for (const auto& c : components_) deg = std::max(deg, c.degree());
        return deg;
    }

    Point operator()(double t) const noexcept {
        Point p(dim());
        for (int i = 0; i < dim(); ++i) p[i] = components_[static_cast<std::size_t>(i)](t);
        return p;
    }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
    std::vector<Polynomial> components_;
};

inline Point eval(const Trajectory& traj, double t) { return traj(t); }

/// Squared distance between two trajectories as a polynomial in t.
inline Polynomial squared_distance_polynomial(const Trajectory& a, const Trajectory& b) {
    Polynomial acc;
    for (int i = 0; i < a.dim(); ++i) {
        const Polynomial diff = a.component(i) - b.component(i);
        acc += diff * diff;
    }
    return acc;
}

/// A set of n trajectories sharing dimension d and degree bound s, observed
/// over the finite horizon [0, T].
class MovingPointSet {
public:
    MovingPointSet() = default;
    MovingPointSet(std::vector<Trajectory> points, int dimension, int max_degree, double horizon)
        : points_(std::move(points)), dim_(dimension), max_degree_(max_degree), horizon_(horizon) {
        if (dim_ < 1 || dim_ > kMaxDimension) throw PreconditionError("MovingPointSet: unsupported dimension");
        if (max_degree_ < 0) throw PreconditionError("MovingPointSet: negative degree bound");
        if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) throw PreconditionError("MovingPointSet: horizon must be finite and >= 0");
        for (const auto& p : points_) {
            if (p.dim() != dim_) throw DimensionMismatch("MovingPointSet: trajectory dimension differs from set dimension");
            if (p.degree() > max_degree_) throw PreconditionError("MovingPointSet: trajectory exceeds degree bound");
        }
    }

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    int dim() const noexcept { return dim_; }
    int max_degree() const noexcept { return max_degree_; }
    double horizon() const noexcept { return horizon_; }
    TimeInterval window() const noexcept { return {0.0, horizon_}; }

    const std::vector<Trajectory>& trajectories() const noexcept { return points_; }
    const Trajectory& operator[](std::size_t i) const { return points_[i]; }

    bool is_static() const noexcept {
        return std::all_of(points_.begin(), points_.end(), [](const Trajectory& t) { return t.degree() <= 0; });
    }

    /// Positions of all points at time t.
    std::vector<Point> at(double t) const {
        std::vector<Point> out;
        out.reserve(points_.size());
        for (const auto& p : points_) out.push_back(p(t));
        return out;
    }

    /// The sub-instance made of the given indices, in the given order.
    MovingPointSet subset(std::span<const std::size_t> indices) const {
        std::vector<Trajectory> sub;
        sub.reserve(indices.size());
        for (std::size_t i : indices) sub.push_back(points_.at(i));
        return MovingPointSet(std::move(sub), dim_, max_degree_, horizon_);
    }

    void require_in_horizon(double t) const {
        if (!(t >= 0.0 && t <= horizon_)) throw PreconditionError("time " + std::to_string(t) + " outside horizon");
    }

    friend bool operator==(const MovingPointSet&, const MovingPointSet&) = default;

private:
    std::vector<Trajectory> points_;
    int dim_ = 1;
    int max_degree_ = 0;
    double horizon_ = 0.0;
};

/// Determinant of a square matrix of polynomials, by cofactor expansion.
/// Intended for the small (<= 6) sizes that arise from point tuples.
inline Polynomial polynomial_determinant(const std::vector<std::vector<Polynomial>>& m) {
    const std::size_t k = m.size();
    std::vector<std::size_t> cols(k);
    for (std::size_t i = 0; i < k; ++i) cols[i] = i;

    auto rec = [&](auto& self, std::size_t row, std::vector<std::size_t>& free_cols) -> Polynomial {
        if (free_cols.size() == 1) return m[row][free_cols[0]];
        Polynomial acc;
        double sgn = 1.0;
        for (std::size_t j = 0; j < free_cols.size(); ++j) {
            const std::size_t c = free_cols[j];
            if (!m[row][c].is_zero()) {
                std::vector<std::size_t> rest;
                rest.reserve(free_cols.size() - 1);
                for (std::size_t q = 0; q < free_cols.size(); ++q)
                    if (q != j) rest.push_back(free_cols[q]);
                acc += sgn * (m[row][c] * self(self, row + 1, rest));
            }
            sgn = -sgn;
        }
        return acc;
    };
    return rec(rec, 0, cols);
}

/// Numeric determinant by Gaussian elimination with partial pivoting.
inline double numeric_determinant(std::vector<std::vector<double>> a) {
    const std::size_t k = a.size();
    double det = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t q = c; q < k; ++q) a[r][q] -= f * a[c][q];
        }
    }
    return det;
}

/// A tuple degeneracy polynomial together with a flag telling whether it
/// vanishes identically (the tuple is degenerate at every time).
struct EventPolynomial {
    Polynomial poly;
    bool identically_zero = false;
};

namespace detail {

inline double row_scale(const std::vector<Polynomial>& row) {
    double s = 0.0;
    for (const auto& p : row) {
        double l1 = 0.0;
        for (double c : p.coefficients()) l1 += std::abs(c);
        s += l1;
    }
    return s;
}

inline EventPolynomial finish_event(const std::vector<std::vector<Polynomial>>& rows) {
    double scale = 1.0;
    for (const auto& r : rows) scale *= std::max(row_scale(r), 1e-300);
    EventPolynomial out;
    out.poly = polynomial_determinant(rows);
    out.identically_zero = out.poly.is_negligible(1e-12 * scale);
    if (out.identically_zero) out.poly = Polynomial{};
    return out;
}

}  // namespace detail

/// det [x_j(t) | 1] over a tuple of d+1 trajectories in R^d; zero exactly
/// when the tuple is affinely dependent. Degree is at most d*s.
inline EventPolynomial determinant_polynomial(std::span<const Trajectory> tuple) {
    if (tuple.empty()) throw PreconditionError("determinant_polynomial: empty tuple");
    const int d = tuple.front().dim();
    if (static_cast<int>(tuple.size()) != d + 1)
        throw PreconditionError("determinant_polynomial: tuple must hold exactly d+1 trajectories");
    std::vector<std::vector<Polynomial>> rows;
    for (const auto& p : tuple) {
        if (p.dim() != d) throw DimensionMismatch("determinant_polynomial: mixed dimensions");
        std::vector<Polynomial> row = p.components();
        row.push_back(Polynomial::constant(1.0));
        rows.push_back(std::move(row));
    }
    return detail::finish_event(rows);
}

/// det [x_j(t) | |x(t)|^2 | 1] over d+2 trajectories; zero exactly when the
/// tuple is cospherical (or affinely degenerate). Degree at most (d+1)*2s.
inline EventPolynomial cosphericity_polynomial(std::span<const Trajectory> tuple) {
    if (tuple.empty()) throw PreconditionError("cosphericity_polynomial: empty tuple");
    const int d = tuple.front().dim();
    if (static_cast<int>(tuple.size()) != d + 2)
        throw PreconditionError("cosphericity_polynomial: tuple must hold exactly d+2 trajectories");
    std::vector<std::vector<Polynomial>> rows;
    for (const auto& p : tuple) {
        if (p.dim() != d) throw DimensionMismatch("cosphericity_polynomial: mixed dimensions");
        std::vector<Polynomial> row = p.components();
        Polynomial lift;
        for (const auto& c : p.components()) lift += c * c;
        row.push_back(std::move(lift));
        row.push_back(Polynomial::constant(1.0));
        rows.push_back(std::move(row));
    }
    return detail::finish_event(rows);
}

/// Outcome of a general-position check.
struct GeneralPositionReport {
    bool valid = true;
    /// Tuples (sorted indices) lying on a common hyperplane at t = 0.
    std::vector<std::vector<std::size_t>> degenerate_at_start;
    /// Tuples whose determinant polynomial vanishes for all time.
    std::vector<std::vector<std::size_t>> degenerate_always;
    /// True when a random sample of tuples was checked instead of all.
    bool sampled = false;
    std::size_t tuples_checked = 0;
};

/// Visits every k-subset of {0..n-1} in lexicographic order. The visitor
/// returns false to stop early.
template <typename Visitor>
void for_each_combination(std::size_t n, std::size_t k, Visitor&& visit) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!visit(std::span<const std::size_t>(idx))) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// Binomial coefficient as a double (exact below 2^53).
inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

/// Exhaustive check above this many (d+1)-tuples switches to sampling.
inline constexpr double kExhaustiveTupleLimit = 2e5;

/// Checks that no d+1 points of P(0) lie on a common hyperplane and that no
/// tuple is degenerate for all time. Exhaustive when the tuple count is at
/// most kExhaustiveTupleLimit, otherwise a seeded sample of that many tuples.
inline GeneralPositionReport validate_general_position(const MovingPointSet& set, std::uint64_t sample_seed = 0x5eed) {
    GeneralPositionReport report;
    const std::size_t n = set.size();
    const auto d = static_cast<std::size_t>(set.dim());
    if (n < d + 1) return report;

    auto check = [&](std::span<const std::size_t> tuple) {
        std::vector<std::vector<double>> m;
        double scale = 1.0;
        std::vector<Trajectory> trajs;
        for (std::size_t i : tuple) {
            const Point p = set[i](0.0);
            std::vector<double> row(p.coords().begin(), p.coords().end());
            row.push_back(1.0);
            double rn = 0.0;
            for (double v : row) rn += v * v;
            scale *= std::sqrt(rn);
            m.push_back(std::move(row));
            trajs.push_back(set[i]);
        }
        ++report.tuples_checked;
        std::vector<std::size_t> t(tuple.begin(), tuple.end());
        if (std::abs(numeric_determinant(m)) <= 1e-12 * scale) {
            report.valid = false;
            report.degenerate_at_start.push_back(t);
        }
        if (!set.is_static() && determinant_polynomial(trajs).identically_zero) {
            report.valid = false;
            report.degenerate_always.push_back(std::move(t));
        }
        return true;
    };

    if (binomial(n, d + 1) <= kExhaustiveTupleLimit) {
        for_each_combination(n, d + 1, check);
        return report;
    }
    report.sampled = true;
    Rng rng(sample_seed);
    for (std::size_t s = 0; s < static_cast<std::size_t>(kExhaustiveTupleLimit); ++s) {
        const auto tuple = rng.sample_without_replacement(n, d + 1);
        check(tuple);
    }
    return report;
}

/// Default magnitude of the constant-coefficient perturbation.
inline constexpr double kPerturbationMagnitude = 1e-7;

/// Adds seeded uniform noise in [-magnitude, magnitude] to every constant
/// coefficient. Used to break degeneracies reported by validation.
inline MovingPointSet perturb(const MovingPointSet& set, std::uint64_t seed, double magnitude = kPerturbationMagnitude) {
    Rng rng(seed);
    std::vector<Trajectory> out;
    out.reserve(set.size());
    for (const auto& traj : set.trajectories()) {
        std::vector<Polynomial> cs;
        for (const auto& c : traj.components()) {
            std::vector<double> coeffs = c.coefficients();
            if (coeffs.empty()) coeffs.push_back(0.0);
            coeffs[0] += rng.uniform(-magnitude, magnitude);
            cs.emplace_back(std::move(coeffs));
        }
        out.emplace_back(std::move(cs));
    }
    return MovingPointSet(std::move(out), set.dim(), set.max_degree(), set.horizon());
}

}  // namespace kinetikos
