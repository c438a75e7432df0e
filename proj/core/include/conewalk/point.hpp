#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace conewalk {

inline constexpr int kMaxDim = 4;

// Lattice point in Z^d, d <= kMaxDim. Unused lanes stay zero so comparisons
// and hashing can look at the whole array.
struct Point {
    std::array<int64_t, kMaxDim> c{};
    int32_t d = 0;

    Point() = default;
    Point(std::initializer_list<int64_t> xs) : d(static_cast<int32_t>(xs.size())) {
        int i = 0;
        for (int64_t v : xs) c[i++] = v;
    }
    static Point zero(int dim) {
        Point p;
        p.d = dim;
        return p;
    }

    int64_t operator[](int i) const { return c[i]; }
    int64_t& operator[](int i) { return c[i]; }

    friend bool operator==(const Point& a, const Point& b) { return a.d == b.d && a.c == b.c; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend bool operator<(const Point& a, const Point& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.c < b.c;
    }

    friend Point operator+(const Point& a, const Point& b) {
        Point r = a;
        for (int i = 0; i < a.d; ++i) r.c[i] += b.c[i];
        return r;
    }
    friend Point operator-(const Point& a, const Point& b) {
        Point r = a;
        for (int i = 0; i < a.d; ++i) r.c[i] -= b.c[i];
        return r;
    }
    friend Point operator-(const Point& a) {
        Point r = a;
        for (int i = 0; i < a.d; ++i) r.c[i] = -r.c[i];
        return r;
    }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += double(c[i]) * double(c[i]);
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    std::string str() const;
};

struct PointHash {
    size_t operator()(const Point& p) const {
        uint64_t h = 0x9e3779b97f4a7c15ull ^ uint64_t(p.d);
        for (int i = 0; i < p.d; ++i) {
            uint64_t z = h + uint64_t(p.c[i]) + 0x9e3779b97f4a7c15ull;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            h = z ^ (z >> 31);
        }
        return size_t(h);
    }
};

// Real point, world coordinates (after any decorrelating transform).
struct Vecd {
    std::array<double, kMaxDim> c{};
    int32_t d = 0;

    Vecd() = default;
    Vecd(std::initializer_list<double> xs) : d(static_cast<int32_t>(xs.size())) {
        int i = 0;
        for (double v : xs) c[i++] = v;
    }
    static Vecd zero(int dim) {
        Vecd v;
        v.d = dim;
        return v;
    }
    static Vecd from(const Point& p) {
        Vecd v;
        v.d = p.d;
        for (int i = 0; i < p.d; ++i) v.c[i] = double(p.c[i]);
        return v;
    }

    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += c[i] * c[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dot(const Vecd& a, const Vecd& b) {
    double s = 0;
    for (int i = 0; i < a.d; ++i) s += a.c[i] * b.c[i];
    return s;
}

inline Vecd scaled(const Vecd& a, double t) {
    Vecd r = a;
    for (int i = 0; i < a.d; ++i) r.c[i] *= t;
    return r;
}

inline Vecd normalized(const Vecd& a) { return scaled(a, 1.0 / a.norm()); }

// Dense d x d matrix, row major.
struct Mat {
    std::array<double, kMaxDim * kMaxDim> m{};
    int32_t d = 0;

    static Mat identity(int dim) {
        Mat r;
        r.d = dim;
        for (int i = 0; i < dim; ++i) r.m[i * kMaxDim + i] = 1.0;
        return r;
    }
    double at(int i, int j) const { return m[i * kMaxDim + j]; }
    double& at(int i, int j) { return m[i * kMaxDim + j]; }

    Vecd apply(const Vecd& x) const {
        Vecd r = Vecd::zero(d);
        for (int i = 0; i < d; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += at(i, j) * x.c[j];
            r.c[i] = s;
        }
        return r;
    }
    Vecd apply(const Point& x) const { return apply(Vecd::from(x)); }

    // Transpose-apply, used for mapping normals: n_world = M^{-T} n.
    Vecd apply_transposed(const Vecd& x) const {
        Vecd r = Vecd::zero(d);
        for (int i = 0; i < d; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += at(j, i) * x.c[j];
            r.c[i] = s;
        }
        return r;
    }
};

}  // namespace conewalk
