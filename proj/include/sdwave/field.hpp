#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "sdwave/fft.hpp"
#include "sdwave/grid.hpp"

namespace sdwave {

/// Complex-valued samples of a function on a Grid together with its discrete
/// Fourier coefficients. Fields behave as immutable values: every operation
/// returns a new field, and the sample/spectrum arrays are shared between
/// copies. The spectrum is computed lazily on first access and cached;
/// set_values replaces the samples and drops the cache.
class SpectralField {
public:
    SpectralField(Grid grid, std::vector<cplx> values)
        : grid_(grid),
          values_(std::make_shared<const std::vector<cplx>>(std::move(values))),
          mutex_(std::make_shared<std::mutex>()) {
        if (values_->size() != grid_.size())
            throw ShapeError("SpectralField: values/grid size mismatch");
    }

    static SpectralField from_spectrum(Grid grid, std::vector<cplx> spectrum) {
        if (spectrum.size() != grid.size())
            throw ShapeError("SpectralField: spectrum/grid size mismatch");
        auto spec = std::make_shared<const std::vector<cplx>>(std::move(spectrum));
        SpectralField f(grid, inverse_fft(grid, *spec));
        f.spectrum_ = std::move(spec);
        return f;
    }

    const Grid& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return *values_; }

    const std::vector<cplx>& spectrum() const {
        std::lock_guard<std::mutex> lock(*mutex_);
        if (!spectrum_)
            spectrum_ = std::make_shared<const std::vector<cplx>>(forward_fft(grid_, *values_));
        return *spectrum_;
    }

    /// Replace the samples; invalidates the cached spectrum.
    void set_values(std::vector<cplx> values) {
        if (values.size() != grid_.size())
            throw ShapeError("SpectralField::set_values: size mismatch");
        std::lock_guard<std::mutex> lock(*mutex_);
        values_ = std::make_shared<const std::vector<cplx>>(std::move(values));
        spectrum_.reset();
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& v : values()) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |v| on the faces of the periodic box (any axis index 0),
    /// used to detect probes that do not fit the box.
    double boundary_abs() const {
        double m = 0.0;
        const auto& v = values();
        detail::for_each_index(grid_, [&](std::size_t flat, int i0, int i1, int i2) {
            if (i0 == 0 || (grid_.n > 1 && i1 == 0) || (grid_.n > 2 && i2 == 0))
                m = std::max(m, std::abs(v[flat]));
        });
        return m;
    }

private:
    Grid grid_;
    std::shared_ptr<const std::vector<cplx>> values_;
    mutable std::shared_ptr<const std::vector<cplx>> spectrum_;
    std::shared_ptr<std::mutex> mutex_;
};

/// Coefficients approximating integral v(x) e^{-i x.xi} dx on the dual lattice.
inline std::vector<cplx> forward_transform(const SpectralField& v) { return v.spectrum(); }

/// Exact inverse of forward_transform on the lattice.
inline SpectralField inverse_transform(std::vector<cplx> coeffs, const Grid& grid) {
    return SpectralField::from_spectrum(grid, std::move(coeffs));
}

/// (sum |v|^p h^n)^{1/p}; grid maximum for p = infinity.
inline double lp_norm(const SpectralField& v, double p) {
    if (std::isinf(p)) return v.max_abs();
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1 or infinity");
    const Grid& g = v.grid();
    double hn = 1.0;
    for (int a = 0; a < g.n; ++a) hn *= g.spacing();
    KahanSum s;
    if (p == 1.0) {
        for (const cplx& z : v.values()) s.add(std::abs(z));
    } else if (p == 2.0) {
        for (const cplx& z : v.values()) s.add(std::norm(z));
    } else {
        for (const cplx& z : v.values()) s.add(std::pow(std::abs(z), p));
    }
    const double total = s.value() * hn;
    if (p == 1.0) return total;
    if (p == 2.0) return std::sqrt(total);
    return std::pow(total, 1.0 / p);
}

/// l2 norm of the spectrum with the Parseval weight (1/L^n); equals
/// lp_norm(v, 2) on the lattice to machine precision.
inline double parseval_l2(const SpectralField& v) {
    const Grid& g = v.grid();
    double w = 1.0;
    for (int a = 0; a < g.n; ++a) w /= g.box;
    KahanSum s;
    for (const cplx& z : v.spectrum()) s.add(std::norm(z));
    return std::sqrt(s.value() * w);
}

/// Analytic description of a (possibly modulated) Gaussian probe:
/// v(x) = amplitude * exp(-|x|^2 / (2 width^2)) * exp(i carrier.x).
struct GaussianSpec {
    double width = 1.0;
    std::array<double, 3> carrier{0.0, 0.0, 0.0};
    double amplitude = 1.0;

    GaussianSpec dilated(double t) const {
        GaussianSpec d = *this;
        d.width = width / t;
        for (auto& c : d.carrier) c *= t;
        return d;
    }

    cplx operator()(const std::array<double, 3>& x, int n) const {
        double r2 = 0.0, phase = 0.0;
        for (int a = 0; a < n; ++a) {
            r2 += x[a] * x[a];
            phase += carrier[a] * x[a];
        }
        return amplitude * std::exp(-r2 / (2.0 * width * width)) *
               std::exp(cplx(0.0, phase));
    }

    /// Closed-form transform: (2 pi)^{n/2} w^n A exp(-w^2 |xi - c|^2 / 2).
    cplx transform(const std::array<double, 3>& xi, int n) const {
        double q2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double d = xi[a] - carrier[a];
            q2 += d * d;
        }
        const double scale = amplitude * std::pow(two_pi, 0.5 * n) * std::pow(width, n);
        return scale * std::exp(-0.5 * width * width * q2);
    }
};

inline SpectralField make_gaussian(const Grid& g, const GaussianSpec& spec) {
    std::vector<cplx> vals(g.size());
    for_each_coord(g, [&](std::size_t flat, const std::array<double, 3>& x) {
        vals[flat] = spec(x, g.n);
    });
    return SpectralField(g, std::move(vals));
}

namespace detail {

/// Exact evaluation of the band-limited trigonometric interpolant at the
/// scaled points t*x_j, done axis by axis (cost N^{n+1} per axis). Points
/// with |t x| beyond the box take the decayed continuum extension (zero)
/// rather than the periodic image; the boundary precondition on v makes the
/// two differ by less than the boundary tolerance. Intended for test grids;
/// large production dilations use analytic probes instead.
inline std::vector<cplx> resample_scaled(const Grid& g, const std::vector<cplx>& spectrum,
                                         double t) {
    const int N = g.points;
    const auto xi = freq_table(g);
    const auto xs = coord_table(g);
    // E[i][m] = e^{i t x_i xi_m}, zeroed where t x_i leaves the box.
    std::vector<cplx> E(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i) {
        const double y = t * xs[static_cast<std::size_t>(i)];
        const bool outside = std::abs(y) > 0.5 * g.box;
        for (int m = 0; m < N; ++m)
            E[static_cast<std::size_t>(i) * N + m] =
                outside ? cplx(0.0)
                        : std::exp(cplx(0.0, y * xi[static_cast<std::size_t>(m)]));
    }

    std::vector<cplx> cur = spectrum;
    std::vector<cplx> next(cur.size());
    const std::size_t total = g.size();
    // Contract one frequency axis at a time; after axis a the slot holds a
    // spatial index. Axis order: innermost (fastest) first keeps strides simple.
    for (int axis = g.n - 1; axis >= 0; --axis) {
        std::size_t stride = 1;
        for (int a = g.n - 1; a > axis; --a) stride *= static_cast<std::size_t>(N);
        const std::size_t outer = total / (stride * static_cast<std::size_t>(N));
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t s = 0; s < stride; ++s) {
                const std::size_t base = o * stride * N + s;
                for (int i = 0; i < N; ++i) {
                    cplx acc = 0.0;
                    const cplx* row = &E[static_cast<std::size_t>(i) * N];
                    for (int m = 0; m < N; ++m) acc += row[m] * cur[base + stride * m];
                    next[base + stride * static_cast<std::size_t>(i)] = acc;
                }
            }
        }
        std::swap(cur, next);
    }
    double inv_ln = 1.0;
    for (int a = 0; a < g.n; ++a) inv_ln /= g.box;
    for (auto& z : cur) z *= inv_ln;
    return cur;
}

}  // namespace detail

/// Samples of x -> v(t x) by band-limited (spectral) interpolation. Both the
/// input and the result must be numerically negligible at the box boundary.
inline SpectralField dilate(const SpectralField& v, double t,
                            double boundary_tol = 1e-12) {
    if (!(t > 0.0)) throw DomainError("dilate: t must be positive");
    const double peak = v.max_abs();
    if (peak > 0.0 && v.boundary_abs() > boundary_tol * peak)
        throw NumericalError("dilate: input support touches the box boundary");
    if (t == 1.0) return v;
    SpectralField out(v.grid(), detail::resample_scaled(v.grid(), v.spectrum(), t));
    const double opeak = out.max_abs();
    if (opeak > 0.0 && out.boundary_abs() > boundary_tol * opeak)
        throw NumericalError("dilate: dilation pushes support outside the box");
    return out;
}

}  // namespace sdwave
