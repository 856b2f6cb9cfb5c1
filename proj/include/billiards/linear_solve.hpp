#pragma once

#include <billiards/scalar.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

namespace billiards {

/// Solves the square system `a * x = rhs` by Gaussian elimination.
///
/// Returns nullopt when the matrix is singular: exactly singular on the
/// rational backend, or with a pivot below 1e-10 of the largest pivot seen on
/// floats (partial pivoting).
template <Scalar T, std::size_t N>
std::optional<std::array<T, N>> solve_linear(std::array<std::array<T, N>, N> a, std::array<T, N> rhs) {
    double largest_pivot = 0.0;
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = N;
        if constexpr (ScalarTraits<T>::exact) {
            for (std::size_t r = col; r < N; ++r)
                if (!a[r][col].is_zero()) {
                    pivot = r;
                    break;
                }
        } else {
            double best = 0.0;
            for (std::size_t r = col; r < N; ++r)
                if (std::fabs(a[r][col]) > best) {
                    best = std::fabs(a[r][col]);
                    pivot = r;
                }
            largest_pivot = std::max(largest_pivot, best);
            if (pivot != N && best <= 1e-10 * largest_pivot) pivot = N;
        }
        if (pivot == N) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (std::size_t r = col + 1; r < N; ++r) {
            if constexpr (ScalarTraits<T>::exact) {
                if (a[r][col].is_zero()) continue;
            }
            T f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::array<T, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        T s = rhs[i];
        for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace billiards
