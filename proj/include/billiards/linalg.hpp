#pragma once

// Small fixed-size vectors and matrices over any arithmetic type that supports
// + - * / (Rational, double, and the dual numbers used for Jacobians).

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace billiards {

template <typename T>
struct Vec3 {
    T x{}, y{}, z{};

    Vec3() = default;
    Vec3(T x_, T y_, T z_) : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

    const T& operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
    T& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(const T& s) { x *= s; y *= s; z *= s; return *this; }

    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend Vec3 operator*(Vec3 a, const T& s) { return a *= s; }
    friend Vec3 operator*(const T& s, Vec3 a) { return a *= s; }
    friend Vec3 operator/(const Vec3& a, const T& s) { return {a.x / s, a.y / s, a.z / s}; }

    friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

    friend std::ostream& operator<<(std::ostream& os, const Vec3& v) {
        return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
    }
};

template <typename T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <typename T>
T norm2(const Vec3<T>& a) {
    return dot(a, a);
}

template <typename T>
bool is_zero_vector(const Vec3<T>& a) {
    return a.x == T(0) && a.y == T(0) && a.z == T(0);
}

/// Converts between scalar backends component-wise via a conversion functor.
template <typename To, typename From, typename Fn>
Vec3<To> convert(const Vec3<From>& v, Fn&& fn) {
    return {fn(v.x), fn(v.y), fn(v.z)};
}

/// Row-major 3x3 matrix.
template <typename T>
struct Mat3 {
    std::array<std::array<T, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = T(i == j ? 1 : 0);
        return r;
    }

    static Mat3 from_rows(const Vec3<T>& r0, const Vec3<T>& r1, const Vec3<T>& r2) {
        Mat3 r;
        r.m[0] = {r0.x, r0.y, r0.z};
        r.m[1] = {r1.x, r1.y, r1.z};
        r.m[2] = {r2.x, r2.y, r2.z};
        return r;
    }

    const T& operator()(int i, int j) const { return m[i][j]; }
    T& operator()(int i, int j) { return m[i][j]; }

    [[nodiscard]] Vec3<T> row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

    [[nodiscard]] Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    [[nodiscard]] T determinant() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }

    [[nodiscard]] T trace() const { return m[0][0] + m[1][1] + m[2][2]; }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                T s = a.m[i][0] * b.m[0][j];
                s += a.m[i][1] * b.m[1][j];
                s += a.m[i][2] * b.m[2][j];
                r.m[i][j] = s;
            }
        return r;
    }

    friend Vec3<T> operator*(const Mat3& a, const Vec3<T>& v) {
        return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
                a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
                a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
    }

    friend Mat3 operator-(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
        return r;
    }

    friend Mat3 operator*(const T& s, const Mat3& a) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
        return r;
    }

    friend bool operator==(const Mat3& a, const Mat3& b) { return a.m == b.m; }

    friend std::ostream& operator<<(std::ostream& os, const Mat3& a) {
        os << '[';
        for (int i = 0; i < 3; ++i) os << (i ? ", " : "") << a.row(i);
        return os << ']';
    }
};

/// Planar point, used for base-triangle constructions and foot positions.
template <typename T>
struct Vec2 {
    T x{}, y{};
    friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(const T& s, const Vec2& a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
    friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
        return os << '(' << v.x << ", " << v.y << ')';
    }
};

template <typename T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
    return a.x * b.x + a.y * b.y;
}

template <typename T>
T cross(const Vec2<T>& a, const Vec2<T>& b) {
    return a.x * b.y - a.y * b.x;
}

}  // namespace billiards
