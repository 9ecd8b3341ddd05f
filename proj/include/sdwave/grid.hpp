#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sdwave/core.hpp"

namespace sdwave {

/// Periodic sampling lattice on the box [-L/2, L/2)^n with N points per axis.
/// The dual lattice carries frequencies xi_k = 2*pi*k/L for k in [-N/2, N/2),
/// stored in DFT order (index m maps to k = m for m < N/2, k = m - N above).
struct Grid {
    int n = 0;        // spatial dimension, 1..3
    int points = 0;   // N, points per axis (even, >= 4)
    double box = 0.0; // L, side length

    double spacing() const { return box / points; }
    double nyquist() const { return pi / spacing(); }
    double freq_step() const { return two_pi / box; }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < n; ++a) s *= static_cast<std::size_t>(points);
        return s;
    }

    /// Signed integer frequency index for DFT slot m.
    int wrap(int m) const { return m < points / 2 ? m : m - points; }

    /// Spatial coordinate along one axis.
    double coord(int i) const { return -0.5 * box + i * spacing(); }

    /// Frequency along one axis for DFT slot m.
    double freq(int m) const { return freq_step() * wrap(m); }

    bool operator==(const Grid&) const = default;
};

inline Grid make_grid(int n, int points, double box) {
    if (n < 1 || n > 3) throw GridError("make_grid: dimension must be 1, 2 or 3");
    if (points < 4 || points % 2 != 0)
        throw GridError("make_grid: points per axis must be even and >= 4");
    if (!(box > 0.0)) throw GridError("make_grid: box size must be positive");
    return Grid{n, points, box};
}

namespace detail {

/// Visit every lattice point; f(flat, i0, i1, i2) with unused indices zero.
/// Flat order is row-major with axis 0 slowest, matching FFTW's layout.
template <class F>
void for_each_index(const Grid& g, F&& f) {
    const int N = g.points;
    std::size_t flat = 0;
    switch (g.n) {
        case 1:
            for (int i0 = 0; i0 < N; ++i0) f(flat++, i0, 0, 0);
            break;
        case 2:
            for (int i0 = 0; i0 < N; ++i0)
                for (int i1 = 0; i1 < N; ++i1) f(flat++, i0, i1, 0);
            break;
        case 3:
            for (int i0 = 0; i0 < N; ++i0)
                for (int i1 = 0; i1 < N; ++i1)
                    for (int i2 = 0; i2 < N; ++i2) f(flat++, i0, i1, i2);
            break;
        default:
            throw GridError("for_each_index: bad dimension");
    }
}

inline std::vector<double> freq_table(const Grid& g) {
    std::vector<double> xi(static_cast<std::size_t>(g.points));
    for (int m = 0; m < g.points; ++m) xi[static_cast<std::size_t>(m)] = g.freq(m);
    return xi;
}

inline std::vector<double> coord_table(const Grid& g) {
    std::vector<double> x(static_cast<std::size_t>(g.points));
    for (int i = 0; i < g.points; ++i) x[static_cast<std::size_t>(i)] = g.coord(i);
    return x;
}

}  // namespace detail

/// Visit every dual-lattice point with its radius |xi|; f(flat, r).
template <class F>
void for_each_freq_radius(const Grid& g, F&& f) {
    const auto xi = detail::freq_table(g);
    detail::for_each_index(g, [&](std::size_t flat, int i0, int i1, int i2) {
        const double a = xi[static_cast<std::size_t>(i0)];
        double r2 = a * a;
        if (g.n > 1) {
            const double b = xi[static_cast<std::size_t>(i1)];
            r2 += b * b;
        }
        if (g.n > 2) {
            const double c = xi[static_cast<std::size_t>(i2)];
            r2 += c * c;
        }
        f(flat, std::sqrt(r2));
    });
}

/// Visit every spatial lattice point with its coordinates; f(flat, x[3]).
template <class F>
void for_each_coord(const Grid& g, F&& f) {
    const auto xs = detail::coord_table(g);
    detail::for_each_index(g, [&](std::size_t flat, int i0, int i1, int i2) {
        std::array<double, 3> x{xs[static_cast<std::size_t>(i0)], 0.0, 0.0};
        if (g.n > 1) x[1] = xs[static_cast<std::size_t>(i1)];
        if (g.n > 2) x[2] = xs[static_cast<std::size_t>(i2)];
        f(flat, x);
    });
}

}  // namespace sdwave
