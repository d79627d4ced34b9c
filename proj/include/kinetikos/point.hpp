#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "kinetikos/errors.hpp"

namespace kinetikos {

/// Largest supported ambient dimension.
inline constexpr int kMaxDimension = 4;

/// A point (or vector) in R^d with d <= kMaxDimension, stored inline.
class Point {
public:
    Point() = default;
    explicit Point(int dim) : dim_(dim) {
        if (dim < 0 || dim > kMaxDimension) throw PreconditionError("Point: unsupported dimension");
    }
    Point(std::initializer_list<double> xs) : Point(static_cast<int>(xs.size())) {
        int i = 0;
        for (double x : xs) c_[static_cast<std::size_t>(i++)] = x;
    }
    explicit Point(std::span<const double> xs) : Point(static_cast<int>(xs.size())) {
        for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)];
    }

    int dim() const noexcept { return dim_; }
    double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const noexcept { return {c_.data(), static_cast<std::size_t>(dim_)}; }

    Point& operator+=(const Point& o) noexcept {
        for (int i = 0; i < dim_; ++i) (*this)[i] += o[i];
        return *this;
    }
    Point& operator-=(const Point& o) noexcept {
        for (int i = 0; i < dim_; ++i) (*this)[i] -= o[i];
        return *this;
    }
    Point& operator*=(double s) noexcept {
        for (int i = 0; i < dim_; ++i) (*this)[i] *= s;
        return *this;
    }
    friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
    friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
    friend Point operator*(Point a, double s) noexcept { return a *= s; }
    friend Point operator*(double s, Point a) noexcept { return a *= s; }
    friend bool operator==(const Point& a, const Point& b) noexcept {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDimension> c_{};
    int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) noexcept {
    assert(a.dim() == b.dim());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(const Point& a) noexcept { return dot(a, a); }
inline double norm(const Point& a) noexcept { return std::sqrt(squared_norm(a)); }

inline double squared_distance(const Point& a, const Point& b) noexcept {
    assert(a.dim() == b.dim());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Point& a, const Point& b) noexcept { return std::sqrt(squared_distance(a, b)); }

inline Point normalized(Point a) {
    const double n = norm(a);
    if (n == 0.0) throw PreconditionError("normalized: zero vector");
    return a *= 1.0 / n;
}

inline void require_same_dimension(const Point& a, const Point& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("dimension mismatch between points");
}

}  // namespace kinetikos
