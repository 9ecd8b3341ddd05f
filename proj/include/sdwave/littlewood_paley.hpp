#pragma once

#include <cmath>
#include <vector>

#include "sdwave/field.hpp"
#include "sdwave/symbols.hpp"

namespace sdwave {

namespace detail {

inline double mollifier(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

/// C-infinity transition: 0 for s <= 0, 1 for s >= 1, strictly monotone
/// between, built from e^{-1/s}.
inline double transition(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = mollifier(s);
    const double b = mollifier(1.0 - s);
    return a / (a + b);
}

}  // namespace detail

/// Smooth radial cutoff: exactly 1 for r <= 1, exactly 0 for r >= 2, smooth
/// transition on [1, 2].
inline double smooth_cutoff(double r) { return detail::transition(2.0 - r); }

/// Base dyadic bump phi = chi(r) - chi(2r), supported on {1/2 < r < 2}.
inline double dyadic_bump(double r) { return smooth_cutoff(r) - smooth_cutoff(2.0 * r); }

/// Dyadic partition of unity on a grid's frequency lattice:
///   phi_0 = chi,   phi_j(xi) = phi(2^{-j} xi) for j >= 1,
/// telescoping to phi_0 + sum_{j=1..J} phi_j = chi(2^{-J} xi), which is
/// identically 1 on |xi| <= 2^J. Shells are evaluated on demand; divisions by
/// 2^j are exact so the supports and the telescoping hold to roundoff.
class DyadicPartition {
public:
    DyadicPartition(Grid grid, int levels) : grid_(grid), levels_(levels) {
        if (levels < 1) throw DomainError("DyadicPartition: J must be >= 1");
        if (grid.nyquist() < std::ldexp(1.0, levels + 1))
            throw GridError("DyadicPartition: unresolved shell, Nyquist < 2^(J+1)");
    }

    const Grid& grid() const { return grid_; }
    int levels() const { return levels_; }

    /// phi_j evaluated at radius r.
    double shell(int j, double r) const {
        check_index(j);
        if (j == 0) return smooth_cutoff(r);
        return dyadic_bump(std::ldexp(r, -j));
    }

    /// Partial sum phi_0 + ... + phi_J at radius r (= chi(2^{-J} r)).
    double partition_sum(double r) const {
        double s = smooth_cutoff(r);
        for (int j = 1; j <= levels_; ++j) s += shell(j, r);
        return s;
    }

    /// phi_j sampled on the whole frequency lattice.
    std::vector<double> shell_values(int j) const {
        check_index(j);
        std::vector<double> out(grid_.size());
        for_each_freq_radius(grid_, [&](std::size_t flat, double r) { out[flat] = shell(j, r); });
        return out;
    }

private:
    void check_index(int j) const {
        if (j < 0 || j > levels_) throw DomainError("DyadicPartition: shell index out of range");
    }

    Grid grid_;
    int levels_;
};

inline DyadicPartition build_partition(const Grid& grid, int levels) {
    return DyadicPartition(grid, levels);
}

/// F^{-1}(phi_j v_hat).
inline SpectralField shell_project(const SpectralField& v, const DyadicPartition& part, int j) {
    return apply_multiplier(v, [&part, j](double r) { return part.shell(j, r); });
}

/// Besov parameters: smoothness sigma, integrability p, summability q,
/// truncation level J.
struct BesovParams {
    double sigma = 0.0;
    double p = 2.0;
    double q = 2.0;
    int levels = 1;

    void validate() const {
        if (!(std::isinf(p) || p >= 1.0) || !(std::isinf(q) || q >= 1.0))
            throw DomainError("BesovParams: p, q must be >= 1 or infinity");
        if (levels < 1) throw DomainError("BesovParams: J must be >= 1");
    }
};

/// Relative magnitude of the spectrum above radius 2^J; the truncated dyadic
/// sum is meaningful only when this is negligible.
inline double spectral_leakage(const SpectralField& v, int levels) {
    const double top = std::ldexp(1.0, levels);
    double peak = 0.0, outside = 0.0;
    const auto& spec = v.spectrum();
    for_each_freq_radius(v.grid(), [&](std::size_t flat, double r) {
        const double m = std::abs(spec[flat]);
        peak = std::max(peak, m);
        if (r > top) outside = std::max(outside, m);
    });
    return peak > 0.0 ? outside / peak : 0.0;
}

/// Truncated discrete Besov norm
///   ( sum_{j=0..J} 2^{j sigma q} |F^{-1}(phi_j v_hat)|_p^q )^{1/q},
/// with the supremum over j for q = infinity.
inline double besov_norm(const SpectralField& v, const DyadicPartition& part,
                         const BesovParams& params, double leakage_tol = 1e-10) {
    params.validate();
    if (params.levels > part.levels())
        throw DomainError("besov_norm: J exceeds partition levels");
    if (spectral_leakage(v, params.levels) > leakage_tol)
        throw NumericalError("besov_norm: spectral leakage above 2^J exceeds tolerance");
    if (std::isinf(params.q)) {
        double sup = 0.0;
        for (int j = 0; j <= params.levels; ++j) {
            const double term =
                std::pow(2.0, j * params.sigma) * lp_norm(shell_project(v, part, j), params.p);
            sup = std::max(sup, term);
        }
        return sup;
    }
    KahanSum s;
    for (int j = 0; j <= params.levels; ++j) {
        const double shell_norm = lp_norm(shell_project(v, part, j), params.p);
        s.add(std::pow(2.0, j * params.sigma * params.q) * std::pow(shell_norm, params.q));
    }
    return std::pow(s.value(), 1.0 / params.q);
}

}  // namespace sdwave
