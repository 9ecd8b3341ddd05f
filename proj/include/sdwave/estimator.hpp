#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sdwave/fit.hpp"
#include "sdwave/probes.hpp"
#include "sdwave/symbols.hpp"

namespace sdwave {

// ---------------------------------------------------------------------------
// Measured operator-norm ratios.
// ---------------------------------------------------------------------------

/// |F^{-1}(h v_hat)|_{p'} / |v|_p for p in [1, 2]. A lower bound on the
/// L^p -> L^{p'} operator norm of the multiplier h.
template <RadialSymbol H>
double measured_ratio(H&& h, const SpectralField& v, double p) {
    if (!(p >= 1.0 && p <= 2.0)) throw DomainError("measured_ratio: p must be in [1, 2]");
    const double vn = lp_norm(v, p);
    if (!(vn > 0.0)) throw DomainError("measured_ratio: zero probe");
    return lp_norm(apply_multiplier(v, h), ExponentSet::conjugate(p)) / vn;
}

/// Grid realization of the two interpolation endpoints for a radial symbol:
/// C1 = |F^{-1} h|_infinity (discrete Young constant) and
/// Cinf = sup over lattice radii of |h| (discrete Parseval constant).
struct SymbolConstants {
    double c1 = 0.0;
    double cinf = 0.0;
    double kernel_boundary_ratio = 0.0;  // boundary/peak of F^{-1} h
};

template <RadialSymbol H>
SymbolConstants symbol_constants(const Grid& g, H&& h) {
    std::vector<cplx> spec(g.size());
    double cinf = 0.0;
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        const cplx hv = static_cast<cplx>(h(r));
        cinf = std::max(cinf, std::abs(hv));
        spec[flat] = hv;
    });
    SpectralField kernel = SpectralField::from_spectrum(g, std::move(spec));
    SymbolConstants out;
    out.c1 = kernel.max_abs();
    out.cinf = cinf;
    out.kernel_boundary_ratio = out.c1 > 0.0 ? kernel.boundary_abs() / out.c1 : 0.0;
    return out;
}

struct InterpolationReport {
    double p = 0.0;
    double alpha = 0.0;      // 2/p - 1: the weight of the L1 -> Linf endpoint
    double c1 = 0.0;
    double cinf = 0.0;
    double bound = 0.0;      // (1 + slack) * C1^alpha * Cinf^{1-alpha}
    double max_ratio = 0.0;  // worst measured ratio over the family
    std::string worst_probe;
    bool pass = false;
};

/// Riesz-Thorin check: every measured L^p -> L^{p'} ratio must sit below
/// C1^alpha Cinf^{1-alpha} with alpha = 2/p - 1, so that p = 1 hits the
/// Young endpoint C1 and p = 2 the Parseval endpoint Cinf. (The source
/// display pairs the endpoints the other way round, which contradicts both
/// endpoints; its own application uses this pairing.) Holds exactly on the
/// lattice by discrete Young/Parseval + interpolation; the slack covers
/// rounding only.
template <RadialSymbol H>
InterpolationReport interpolation_check(H&& h, const std::vector<Probe>& family, double p,
                                        double slack = 1e-2,
                                        double integrability_tol = 5e-2) {
    if (family.empty()) throw DomainError("interpolation_check: empty probe family");
    const Grid& g = family.front().field.grid();
    const SymbolConstants sc = symbol_constants(g, h);
    if (sc.kernel_boundary_ratio > integrability_tol)
        throw NumericalError(
            "interpolation_check: F^{-1}(h) not resolved in the box (non-integrable symbol?)");
    InterpolationReport rep;
    rep.p = p;
    rep.alpha = 2.0 / p - 1.0;
    rep.c1 = sc.c1;
    rep.cinf = sc.cinf;
    rep.bound = (1.0 + slack) * std::pow(sc.c1, rep.alpha) * std::pow(sc.cinf, 1.0 - rep.alpha);
    for (const Probe& probe : family) {
        const double ratio = measured_ratio(h, probe.field, p);
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_probe = probe.label;
        }
    }
    rep.pass = rep.max_ratio <= rep.bound;
    return rep;
}

// ---------------------------------------------------------------------------
// Per-shell sup bounds at the proof's t = 1 normalization.
// ---------------------------------------------------------------------------

struct ShellSupBounds {
    int shell = 0;
    double delta_j = 0.0;      // delta * 2^j
    bool small_regime = true;  // delta_j <= 1/(2 sqrt 2)
    double spatial_sup = 0.0;  // S_j = |F^{-1}(kernel phi_j)|_infinity
    double symbol_sup = 0.0;   // M_j = |kernel phi_j|_infinity
};

struct ShellGridOptions {
    double box = 12.0;
    double nyquist_margin = 2.0;  // Nyquist >= margin * 2^{j+1}
    int dense_radial_samples = 4097;
};

/// Power-of-two N with Nyquist >= margin * 2^{j+1} on the requested box.
inline Grid shell_grid(int n, int j, const ShellGridOptions& opt = {}) {
    const double need = opt.nyquist_margin * std::ldexp(1.0, j + 1);
    int N = 8;
    while (pi * N / opt.box < need) N *= 2;
    return make_grid(n, N, opt.box);
}

/// S_j and M_j for the heat-damped propagator kernel at t = 1 on shell j.
/// S_j comes from one inverse transform on a grid resolving the shell; M_j
/// from a dense radial scan of the symbol over the shell support.
inline ShellSupBounds shell_sup_bounds(double delta, int j, int n,
                                       const ShellGridOptions& opt = {}) {
    ShellSupBounds out;
    out.shell = j;
    out.delta_j = delta * std::ldexp(1.0, j);
    out.small_regime = out.delta_j <= delta_max_littman;

    const Grid g = shell_grid(n, j, opt);
    if (g.nyquist() < std::ldexp(1.0, j + 1))
        throw GridError("shell_sup_bounds: unresolved shell");
    DyadicPartition part(g, std::max(1, j));
    auto kernel = propagator_symbol(delta, 1.0);

    std::vector<cplx> spec(g.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        spec[flat] = kernel(r) * part.shell(j, r);
    });
    inverse_fft_inplace(g, spec);
    double sup = 0.0;
    for (const cplx& z : spec) sup = std::max(sup, std::abs(z));
    out.spatial_sup = sup;

    const double r_lo = j == 0 ? 0.0 : std::ldexp(1.0, j - 1);
    const double r_hi = std::ldexp(1.0, j + 1);
    double msup = 0.0;
    for (int i = 0; i < opt.dense_radial_samples; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / (opt.dense_radial_samples - 1);
        msup = std::max(msup, std::abs(kernel(r) * part.shell(j, r)));
    }
    out.symbol_sup = msup;
    return out;
}

// ---------------------------------------------------------------------------
// Littman decay scan.
// ---------------------------------------------------------------------------

struct LittmanScanOptions {
    int points = 0;    // N; 0 = derive from box and spacing <= pi/4
    double box = 0.0;  // L; 0 = derive from t_max
    double max_phase_step = 0.5;  // rad per frequency cell before erroring
};

struct LittmanScan {
    std::vector<double> times;
    std::vector<double> sup_norms;
    DecayFit fit;  // over the positive-time, positive-value entries
    Grid grid;
};

/// Largest |lambda_delta'| over the bump support [1/2, 2].
inline double max_group_speed(double delta) {
    double m = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double r = 0.5 + 1.5 * i / 4096.0;
        if (delta * r < 1.0) m = std::max(m, std::abs(lambda_derivatives(r, delta).first));
    }
    return m;
}

/// Sup-norm table of F^{-1}(sin(t lambda_delta) phi) over the time grid plus
/// its fitted log-log slope. t = 0 evaluates to exactly 0 and is excluded
/// from the fit.
inline LittmanScan littman_decay_scan(double delta, int n, const std::vector<double>& times,
                                      LittmanScanOptions opt = {}) {
    if (delta < 0.0 || delta > delta_max_littman)
        throw DomainError("littman_decay_scan: delta outside [0, 1/(2 sqrt 2)]");
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    double box = opt.box;
    if (box <= 0.0) box = 4.0 * pi * std::max(t_max, 1.0) * 1.02;  // strict phase criterion
    int N = opt.points;
    if (N <= 0) {
        N = 8;
        while (box / N > pi / 4.0) N *= 2;
    }
    const Grid g = make_grid(n, N, box);

    const double speed = max_group_speed(delta);
    if (t_max * speed * g.freq_step() > opt.max_phase_step)
        throw GridError("littman_decay_scan: grid too coarse (phase step per cell exceeds limit)");

    LittmanScan scan;
    scan.grid = g;
    scan.times = times;
    std::vector<cplx> spec(g.size());
    for (double t : times) {
        if (t == 0.0) {
            scan.sup_norms.push_back(0.0);
            continue;
        }
        for_each_freq_radius(g, [&](std::size_t flat, double r) {
            const double amp = dyadic_bump(r);
            spec[flat] = amp == 0.0 ? 0.0 : std::sin(t * lambda_delta(r, delta)) * amp;
        });
        inverse_fft_inplace(g, spec);
        double sup = 0.0;
        for (const cplx& z : spec) sup = std::max(sup, std::abs(z));
        scan.sup_norms.push_back(sup);
    }

    std::vector<double> ft, fv;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] > 0.0 && scan.sup_norms[i] > 0.0) {
            ft.push_back(times[i]);
            fv.push_back(scan.sup_norms[i]);
        }
    scan.fit = decay_fit(std::move(ft), std::move(fv));
    return scan;
}

// ---------------------------------------------------------------------------
// Scaling identity of the propagator kernel.
// ---------------------------------------------------------------------------

/// Relative sup discrepancy between F^{-1}(K_{delta,t} v_hat) and
/// t * [F^{-1}(K_{delta/t,1} (v(t.))^hat)](x/t) for a Gaussian probe (closed
/// form dilation). Both sides are evaluated independently on the grid and
/// compared on the sub-lattice where x = t*y lands exactly on lattice points.
inline double scaling_identity_check(const Grid& g, const GaussianSpec& probe, double delta,
                                     double t) {
    if (!(t > 0.0)) throw DomainError("scaling_identity_check: t must be positive");
    // Smallest stride sigma <= 64 with sigma * t integral.
    int stride = 0;
    for (int s = 1; s <= 64; ++s) {
        const double st = s * t;
        if (std::abs(st - std::round(st)) < 1e-12) {
            stride = s;
            break;
        }
    }
    if (stride == 0)
        throw DomainError("scaling_identity_check: t does not align with the lattice");

    const SpectralField v = make_gaussian(g, probe);
    const SpectralField lhs = apply_multiplier(v, propagator_symbol(delta, t));

    const SpectralField vt = make_gaussian(g, probe.dilated(t));  // v(t x), closed form
    const SpectralField rhs_core = apply_multiplier(vt, propagator_symbol(delta / t, 1.0));

    const auto& lv = lhs.values();
    const auto& rv = rhs_core.values();
    const int N = g.points;
    const int half = N / 2;
    const long mt = std::lround(stride * t);

    // y index j (stepping by stride) maps to x index i with
    // i - N/2 = t (j - N/2), wrapped periodically.
    auto map_index = [&](int j) {
        const long k = (static_cast<long>(j) - half) / stride;  // j - half divisible by stride
        long i = mt * k + half;
        i %= N;
        if (i < 0) i += N;
        return static_cast<int>(i);
    };

    // Compare only where x = t y stays inside the box: beyond it the lattice
    // evaluation of the left side wraps periodically while the continuum
    // identity refers to the decayed tails.
    const double coord_limit = 0.5 * g.box * (1.0 + 1e-12);
    double max_diff = 0.0, max_mag = 0.0;
    for (const cplx& z : lv) max_mag = std::max(max_mag, std::abs(z));
    detail::for_each_index(g, [&](std::size_t, int j0, int j1, int j2) {
        if ((j0 - half) % stride != 0) return;
        if (g.n > 1 && (j1 - half) % stride != 0) return;
        if (g.n > 2 && (j2 - half) % stride != 0) return;
        if (std::abs(t * g.coord(j0)) > coord_limit) return;
        if (g.n > 1 && std::abs(t * g.coord(j1)) > coord_limit) return;
        if (g.n > 2 && std::abs(t * g.coord(j2)) > coord_limit) return;
        const int i0 = map_index(j0);
        const int i1 = g.n > 1 ? map_index(j1) : 0;
        const int i2 = g.n > 2 ? map_index(j2) : 0;
        std::size_t li = static_cast<std::size_t>(i0);
        std::size_t ri = static_cast<std::size_t>(j0);
        if (g.n > 1) {
            li = li * N + static_cast<std::size_t>(i1);
            ri = ri * N + static_cast<std::size_t>(j1);
        }
        if (g.n > 2) {
            li = li * N + static_cast<std::size_t>(i2);
            ri = ri * N + static_cast<std::size_t>(j2);
        }
        const cplx diff = lv[li] - t * rv[ri];
        max_diff = std::max(max_diff, std::abs(diff));
    });
    if (!(max_mag > 0.0)) throw NumericalError("scaling_identity_check: zero field");
    return max_diff / max_mag;
}

// ---------------------------------------------------------------------------
// Corollary-level decay scan (L^p -> L^{p'}).
// ---------------------------------------------------------------------------

struct RatioScan {
    std::vector<double> times;
    std::vector<double> max_ratios;
    std::vector<std::string> worst_probes;
    DecayFit fit;
};

/// R(t) = max over the family of measured_ratio(propagator(delta, t), v, p).
inline RatioScan corollary_decay_scan(double delta, double p, int n,
                                      const std::vector<double>& times,
                                      const std::vector<Probe>& family) {
    ExponentSet::make(p, n);  // admissibility gate
    RatioScan scan;
    scan.times = times;
    for (double t : times) {
        double best = 0.0;
        std::string who;
        for (const Probe& probe : family) {
            const double r = measured_ratio(propagator_symbol(delta, t), probe.field, p);
            if (r > best) {
                best = r;
                who = probe.label;
            }
        }
        scan.max_ratios.push_back(best);
        scan.worst_probes.push_back(who);
    }
    scan.fit = decay_fit(scan.times, scan.max_ratios);
    return scan;
}

// ---------------------------------------------------------------------------
// Besov-level checks: the semigroup's decay shape and the dyadic lift.
// ---------------------------------------------------------------------------

struct BesovRatioRow {
    double t = 0.0;
    double max_ratio = 0.0;  // Besov norm of T v over the decay-bound shape
    std::string worst_probe;
};

/// ratio(v, t) = |T v|_{B^sigma_{p' q}} / (t^e max(t^sigma, t^-sigma) |v|_{B^sigma_{p q}}),
/// maximized over the family for each t.
inline std::vector<BesovRatioRow> besov_estimate_check(double delta, double p, double q,
                                                       double sigma,
                                                       const std::vector<double>& times,
                                                       const std::vector<Probe>& family,
                                                       const DyadicPartition& part) {
    if (!(sigma > 0.0)) throw DomainError("besov_estimate_check: sigma must be positive");
    const int n = part.grid().n;
    const ExponentSet ex = ExponentSet::make(p, n);
    const BesovParams in_params{sigma, p, q, part.levels()};
    const BesovParams out_params{sigma, ex.p_conjugate, q, part.levels()};

    std::vector<double> in_norms;
    in_norms.reserve(family.size());
    for (const Probe& probe : family) in_norms.push_back(besov_norm(probe.field, part, in_params));

    std::vector<BesovRatioRow> rows;
    for (double t : times) {
        BesovRatioRow row;
        row.t = t;
        const double shape = std::pow(t, ex.decay_exponent) *
                             std::max(std::pow(t, sigma), std::pow(t, -sigma));
        for (std::size_t i = 0; i < family.size(); ++i) {
            const SpectralField tv =
                apply_multiplier(family[i].field, propagator_symbol(delta, t));
            const double ratio = besov_norm(tv, part, out_params) / (shape * in_norms[i]);
            if (ratio > row.max_ratio) {
                row.max_ratio = ratio;
                row.worst_probe = family[i].label;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct Lemma1Report {
    double per_shell_constant = 0.0;   // C: max over (j, family) per-shell ratio
    double besov_ratio_max = 0.0;      // max over family of Besov-level ratio
    double lift_constant = 0.0;        // C~ = 3^{q-1} (2^{sigma q} + 2^{-sigma q} + 1)
    double empirical_constant = 0.0;   // smallest C~ for which the bound holds
    std::string worst_probe;
    bool pass = false;
};

/// Lemma-1 lift: measures the per-shell constant C over the family, then
/// verifies Besov-level ratios against C~ * C with the displayed three-shell
/// constant C~, and records the smallest empirical C~.
template <RadialSymbol H>
Lemma1Report lemma1_lift_check(H&& h, const std::vector<Probe>& family, double sigma, double p,
                               double q, const DyadicPartition& part) {
    if (!(p >= 1.0 && p <= 2.0)) throw DomainError("lemma1_lift_check: p must be in [1, 2]");
    const double pc = ExponentSet::conjugate(p);
    const BesovParams in_params{sigma, p, q, part.levels()};
    const BesovParams out_params{sigma, pc, q, part.levels()};

    Lemma1Report rep;
    rep.lift_constant =
        std::pow(3.0, q - 1.0) * (std::pow(2.0, sigma * q) + std::pow(2.0, -sigma * q) + 1.0);

    for (const Probe& probe : family) {
        const double vp = lp_norm(probe.field, p);
        for (int j = 0; j <= part.levels(); ++j) {
            const SpectralField hj = apply_multiplier(
                probe.field, [&](double r) { return static_cast<cplx>(h(r)) * part.shell(j, r); });
            rep.per_shell_constant = std::max(rep.per_shell_constant, lp_norm(hj, pc) / vp);
        }
    }
    for (const Probe& probe : family) {
        const SpectralField hv = apply_multiplier(probe.field, h);
        const double ratio =
            besov_norm(hv, part, out_params) / besov_norm(probe.field, part, in_params);
        if (ratio > rep.besov_ratio_max) {
            rep.besov_ratio_max = ratio;
            rep.worst_probe = probe.label;
        }
    }
    rep.empirical_constant = rep.besov_ratio_max / rep.per_shell_constant;
    rep.pass = rep.besov_ratio_max <= rep.lift_constant * rep.per_shell_constant * (1.0 + 1e-9);
    return rep;
}

}  // namespace sdwave
