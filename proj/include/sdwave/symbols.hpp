#pragma once

#include <cmath>
#include <concepts>
#include <utility>

#include "sdwave/field.hpp"
#include "sdwave/state.hpp"

namespace sdwave {

/// 1/(2 sqrt 2), the damping threshold of the curvature analysis: below it the
/// oscillatory branch covers the whole annulus {1/2 < r < 2}.
inline constexpr double delta_max_littman = 0.35355339059327373;

// ---------------------------------------------------------------------------
// Scalar radial symbols of the damped dispersion relation.
//
// lambda_delta(r) = r sqrt(1 - delta^2 r^2)   (oscillatory branch, delta*r <= 1)
// beta_delta(r)   = r sqrt(delta^2 r^2 - 1)   (dissipative branch, delta*r >= 1)
//
// Both are sections of the same analytic object through
//   w(r) = delta^2 r^4 - r^2 = beta^2 = -lambda^2,
// which is what the kernel evaluation branches on.
// ---------------------------------------------------------------------------

inline double lambda_delta(double r, double delta) {
    if (r < 0.0 || delta < 0.0) throw DomainError("lambda_delta: r, delta must be >= 0");
    const double dr = delta * r;
    if (dr > 1.0) throw DomainError("lambda_delta: requires delta*r <= 1");
    return r * std::sqrt(1.0 - dr * dr);
}

inline double beta_delta(double r, double delta) {
    const double dr = delta * r;
    if (dr < 1.0) throw DomainError("beta_delta: requires delta*r >= 1");
    return r * std::sqrt(dr * dr - 1.0);
}

/// First and second radial derivatives of lambda_delta; valid for delta*r < 1.
struct LambdaDerivatives {
    double first;
    double second;
};

inline LambdaDerivatives lambda_derivatives(double r, double delta) {
    const double d2r2 = delta * delta * r * r;
    if (!(d2r2 < 1.0)) throw DomainError("lambda_derivatives: requires delta*r < 1");
    if (!(r > 0.0)) throw DomainError("lambda_derivatives: requires r > 0");
    const double root = std::sqrt(1.0 - d2r2);
    const double first = (1.0 - 2.0 * d2r2) / root;
    const double second = r * delta * delta * (2.0 * d2r2 - 3.0) / (root * root * root);
    return {first, second};
}

namespace detail {

// Entire even functions G(t, w) = sinh(t sqrt(w))/sqrt(w) and
// H(t, w) = cosh(t sqrt(w)), evaluated through the removable singularity at
// w = 0 by a 5-term power series in t^2 w (relative error < 1e-16 for
// |t^2 w| < 1e-2).
inline constexpr double series_threshold = 1e-2;

inline double sinhc_series(double t, double w) {
    const double z = t * t * w;
    return t * (1.0 + z / 6.0 * (1.0 + z / 20.0 * (1.0 + z / 42.0 * (1.0 + z / 72.0))));
}

inline double cosh_series(double t, double w) {
    const double z = t * t * w;
    return 1.0 + z / 2.0 * (1.0 + z / 12.0 * (1.0 + z / 30.0 * (1.0 + z / 56.0)));
}

}  // namespace detail

/// Heat-damped propagator kernel e^{-delta t r^2} sinh(t beta)/beta with the
/// sin branch for delta*r < 1 and the overflow-free split for delta*r > 1
/// (every exponent kept non-positive: beta <= delta r^2 always).
inline double propagator_kernel(double r, double delta, double t) {
    const double r2 = r * r;
    const double w = r2 * (delta * delta * r2 - 1.0);
    const double heat = delta * t * r2;
    if (std::abs(w) * t * t < detail::series_threshold)
        return std::exp(-heat) * detail::sinhc_series(t, w);
    if (w < 0.0) {
        const double lam = std::sqrt(-w);
        return std::exp(-heat) * std::sin(t * lam) / lam;
    }
    const double beta = std::sqrt(w);
    // heat - t*beta = t r^2/(beta + delta r^2) exactly (no cancellation).
    const double gap = t * r2 / (beta + delta * r2);
    return (std::exp(-gap) - std::exp(-(heat + t * beta))) / (2.0 * beta);
}

/// The four scalar entries of the per-frequency semigroup matrix, each
/// premultiplied by the heat factor e^{-delta t r^2}. With Laplacian -> -r^2:
///   a = e^{-.}(cosh(t B) + delta r^2 sinh(t B)/B)      (B = sqrt(w))
///   b = e^{-.} sinh(t B)/B
///   c = -r^2 b
///   d = e^{-.}(cosh(t B) - delta r^2 sinh(t B)/B)
struct SemigroupEntries {
    double a, b, c, d;
};

inline SemigroupEntries semigroup_entries(double r, double delta, double t) {
    const double r2 = r * r;
    const double dr2 = delta * r2;
    const double w = r2 * (delta * delta * r2 - 1.0);
    if (std::abs(w) * t * t < detail::series_threshold) {
        const double heat = std::exp(-delta * t * r2);
        const double G = detail::sinhc_series(t, w);
        const double H = detail::cosh_series(t, w);
        const double b = heat * G;
        return {heat * H + dr2 * b, b, -r2 * b, heat * H - dr2 * b};
    }
    if (w < 0.0) {
        const double lam = std::sqrt(-w);
        const double heat = std::exp(-delta * t * r2);
        const double G = std::sin(t * lam) / lam;
        const double H = std::cos(t * lam);
        const double b = heat * G;
        return {heat * H + dr2 * b, b, -r2 * b, heat * H - dr2 * b};
    }
    const double beta = std::sqrt(w);
    const double gap = t * r2 / (beta + dr2);        // = t(delta r^2 - beta) >= 0
    const double ep = std::exp(-gap);                // e^{-t(delta r^2 - beta)}
    const double em = std::exp(-t * (dr2 + beta));   // e^{-t(delta r^2 + beta)}
    const double s = dr2 / beta;
    // 1 - s = (beta - delta r^2)/beta = -r^2/(beta (beta + delta r^2)).
    const double one_minus_s = -r2 / (beta * (beta + dr2));
    const double b = (ep - em) / (2.0 * beta);
    const double a = 0.5 * (ep * (1.0 + s) + em * one_minus_s);
    const double d = 0.5 * (ep * one_minus_s + em * (1.0 + s));
    return {a, b, -r2 * b, d};
}

// ---------------------------------------------------------------------------
// Radial Fourier multipliers.
// ---------------------------------------------------------------------------

template <class H>
concept RadialSymbol = requires(H h, double r) {
    { h(r) } -> std::convertible_to<cplx>;
};

/// F^{-1}(h(|xi|) v_hat); h may be real- or complex-valued but must be finite
/// at every lattice radius.
template <RadialSymbol H>
SpectralField apply_multiplier(const SpectralField& v, H&& h) {
    const Grid& g = v.grid();
    const auto& spec = v.spectrum();
    std::vector<cplx> out(spec.size());
    bool bad = false;
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        const cplx hv = static_cast<cplx>(h(r));
        if (!std::isfinite(hv.real()) || !std::isfinite(hv.imag())) bad = true;
        out[flat] = hv * spec[flat];
    });
    if (bad) throw NumericalError("apply_multiplier: non-finite symbol value on the lattice");
    return SpectralField::from_spectrum(g, std::move(out));
}

/// Semigroup symbol e^{delta t Laplacian} Lambda^{-1} sinh(t Lambda) as a
/// radial callable (the b entry).
inline auto propagator_symbol(double delta, double t) {
    return [delta, t](double r) { return propagator_kernel(r, delta, t); };
}

inline auto heat_symbol(double delta, double t) {
    return [delta, t](double r) { return std::exp(-delta * t * r * r); };
}

/// Per-frequency 2x2 semigroup action on a state vector.
inline StateVector apply_semigroup(const StateVector& state, double delta, double t) {
    const Grid& g = state.grid();
    const auto& u = state.psi.spectrum();
    const auto& ut = state.psi_t.spectrum();
    std::vector<cplx> out_u(u.size()), out_ut(u.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        const SemigroupEntries e = semigroup_entries(r, delta, t);
        out_u[flat] = e.a * u[flat] + e.b * ut[flat];
        out_ut[flat] = e.c * u[flat] + e.d * ut[flat];
    });
    return {SpectralField::from_spectrum(g, std::move(out_u)),
            SpectralField::from_spectrum(g, std::move(out_ut))};
}

}  // namespace sdwave
