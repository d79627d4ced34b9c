#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinetikos/errors.hpp"

namespace kinetikos {

/// Closed time window [lower, upper].
struct TimeInterval {
    double lower = 0.0;
    double upper = 0.0;

    constexpr double length() const noexcept { return upper - lower; }
    constexpr double midpoint() const noexcept { return 0.5 * (lower + upper); }
    constexpr bool contains(double t) const noexcept { return t >= lower && t <= upper; }
};

/// Absolute tolerance on root locations.
inline constexpr double kRootTolerance = 1e-10;

/// Univariate polynomial with real coefficients in ascending powers of t.
///
/// Kept in trimmed form: trailing (highest-power) zero coefficients are
/// dropped, so the zero polynomial has no coefficients at all.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }
    static Polynomial monomial(int power, double c = 1.0) {
        std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
        v.back() = c;
        return Polynomial(std::move(v));
    }

    /// Degree; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    double coefficient(int power) const noexcept {
        return power >= 0 && power <= degree() ? coeffs_[static_cast<std::size_t>(power)] : 0.0;
    }
    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

    /// Largest coefficient magnitude.
    double magnitude() const noexcept {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    double operator()(double t) const noexcept {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    /// Drops leading coefficients whose magnitude is at most rel_tol times the
    /// largest coefficient. Used to strip cancellation noise.
    Polynomial trimmed(double rel_tol) const {
        const double cutoff = rel_tol * magnitude();
        std::vector<double> v = coeffs_;
        while (!v.empty() && std::abs(v.back()) <= cutoff) v.pop_back();
        return Polynomial(std::move(v));
    }

    /// True when every coefficient is at most abs_tol in magnitude.
    bool is_negligible(double abs_tol) const noexcept { return magnitude() <= abs_tol; }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        trim();
        return *this;
    }
    Polynomial& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<double> r(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(r));
    }
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Remainder of Euclidean division by a nonzero divisor.
    friend Polynomial operator%(const Polynomial& a, const Polynomial& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<double> r = a.coeffs_;
        const int db = b.degree();
        const double lead = b.leading();
        for (int i = static_cast<int>(r.size()) - 1; i >= db; --i) {
            const double q = r[static_cast<std::size_t>(i)] / lead;
            for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= q * b.coeffs_[static_cast<std::size_t>(j)];
            r[static_cast<std::size_t>(i)] = 0.0;
        }
        r.resize(static_cast<std::size_t>(std::max(db, 0)));
        return Polynomial(std::move(r));
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

namespace detail {

inline int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

/// Sturm chain p, p', -rem(p, p'), ... truncated once a remainder is
/// negligible relative to the chain's scale.
inline std::vector<Polynomial> sturm_chain(const Polynomial& p) {
    std::vector<Polynomial> chain;
    chain.push_back(p * (1.0 / p.magnitude()));
    Polynomial d = chain.front().derivative();
    if (d.is_zero()) return chain;
    chain.push_back(d * (1.0 / d.magnitude()));
    while (chain.back().degree() > 0) {
        const auto& a = chain[chain.size() - 2];
        const auto& b = chain.back();
        Polynomial r = -(a % b);
        r = r.trimmed(1e-13);
        if (r.is_negligible(1e-11)) break;
        chain.push_back(r * (1.0 / r.magnitude()));
    }
    return chain;
}

inline int sign_variations(const std::vector<Polynomial>& chain, double t) {
    int count = 0;
    int last = 0;
    for (const auto& q : chain) {
        const int s = sign_of(q(t));
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

/// Number of distinct roots in (a, b].
inline int sturm_count(const std::vector<Polynomial>& chain, double a, double b) {
    return sign_variations(chain, a) - sign_variations(chain, b);
}

inline void push_merged(std::vector<double>& roots, double r, double tol) {
    if (!roots.empty() && std::abs(r - roots.back()) <= 2.0 * tol) {
        roots.back() = 0.5 * (roots.back() + r);
        return;
    }
    roots.push_back(r);
}

inline std::vector<double> low_degree_roots(const Polynomial& p) {
    std::vector<double> out;
    if (p.degree() == 1) {
        out.push_back(-p.coefficient(0) / p.coefficient(1));
        return out;
    }
    // Degree 2, numerically stable form.
    const double a = p.coefficient(2), b = p.coefficient(1), c = p.coefficient(0);
    const double disc = b * b - 4.0 * a * c;
    const double scale = std::max({b * b, std::abs(4.0 * a * c), 1e-300});
    if (disc < -1e-14 * scale) return out;
    if (disc <= 1e-14 * scale) {
        out.push_back(-b / (2.0 * a));
        return out;
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : -r1;
    if (r1 > r2) std::swap(r1, r2);
    out.push_back(r1);
    out.push_back(r2);
    return out;
}

/// Bisection on a bracketing pair with f(lo), f(hi) of opposite signs.
inline double bisect_sign_change(const Polynomial& p, double lo, double hi, double tol) {
    int slo = sign_of(p(lo));
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const int s = sign_of(p(mid));
        if (s == 0) return mid;
        if (s == slo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// All distinct real roots of p inside the closed window, sorted ascending.
///
/// Roots are isolated by Sturm sign-variation counting and refined by
/// bisection to an absolute tolerance of tol. Roots closer than 2*tol are
/// merged. Throws DegeneracyError for the zero polynomial.
inline std::vector<double> real_roots(const Polynomial& poly, TimeInterval window, double tol = kRootTolerance) {
    const Polynomial p = poly.trimmed(1e-14);
    if (p.is_zero()) throw DegeneracyError("real_roots: polynomial is identically zero");
    std::vector<double> roots;
    if (p.degree() == 0) return roots;

    const double lo = window.lower - tol;
    const double hi = window.upper + tol;
    auto clamp_into = [&](double r) { return std::clamp(r, window.lower, window.upper); };

    if (p.degree() <= 2) {
        for (double r : detail::low_degree_roots(p))
            if (r >= lo && r <= hi) detail::push_merged(roots, clamp_into(r), tol);
        return roots;
    }

    const auto chain = detail::sturm_chain(p);
    struct Pending {
        double a, b;
        int count;
    };
    std::vector<Pending> stack;
    const int total = detail::sturm_count(chain, lo, hi);
    if (total <= 0) return roots;
    stack.push_back({lo, hi, total});
    std::vector<double> found;

    while (!stack.empty()) {
        Pending cur = stack.back();
        stack.pop_back();
        if (cur.count <= 0) continue;
        const double width = cur.b - cur.a;
        if (cur.count == 1) {
            const int sa = detail::sign_of(p(cur.a));
            const int sb = detail::sign_of(p(cur.b));
            if (sa != 0 && sb != 0 && sa != sb) {
                found.push_back(detail::bisect_sign_change(p, cur.a, cur.b, tol));
                continue;
            }
        }
        if (width <= tol) {
            found.push_back(0.5 * (cur.a + cur.b));
            continue;
        }
        const double mid = 0.5 * (cur.a + cur.b);
        // Both halves are recounted rather than derived from the parent so
        // that rounding in the chain cannot leak a phantom root.
        stack.push_back({mid, cur.b, detail::sturm_count(chain, mid, cur.b)});
        stack.push_back({cur.a, mid, detail::sturm_count(chain, cur.a, mid)});
    }

    std::sort(found.begin(), found.end());
    for (double r : found) detail::push_merged(roots, clamp_into(r), tol);
    return roots;
}

/// Sign of p on an open root-free interval (a, b), sampled at its midpoint.
inline int sign_on(const Polynomial& p, double a, double b) noexcept { return detail::sign_of(p(0.5 * (a + b))); }

inline std::string to_string(const Polynomial& p) {
    std::string s;
    for (int i = p.degree(); i >= 0; --i) {
        const double c = p.coefficient(i);
        if (c == 0.0) continue;
        if (!s.empty()) s += c < 0 ? " - " : " + ";
        else if (c < 0) s += "-";
        s += std::to_string(std::abs(c));
        if (i >= 1) s += "t";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

}  // namespace kinetikos
