#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sdwave/littlewood_paley.hpp"

namespace sdwave {

/// A labelled test field; Gaussian probes carry their analytic description so
/// dilation can use the closed form.
struct Probe {
    std::string label;
    SpectralField field;
    std::optional<GaussianSpec> gaussian;
};

struct ProbeFamilySpec {
    std::vector<double> gaussian_widths{0.25, 0.5, 1.0, 2.0};
    std::vector<double> carriers{1.0, 2.0, 4.0, 8.0};
    double carrier_width = 1.0;
    std::vector<int> shells{1, 2, 3};
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

namespace detail {

inline std::string format_double_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

/// Shell-localized random field: spectrum = phi_j * unit-modulus phases,
/// deterministically seeded. Delocalized in space by construction, so it is
/// exempt from the boundary-concentration requirement; its role is
/// Fourier-side checks.
inline Probe make_shell_probe(const DyadicPartition& part, int j, std::uint64_t seed) {
    std::mt19937_64 eng(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(j + 1)));
    auto unit = [&eng] { return (eng() >> 11) * 0x1.0p-53; };
    const Grid& g = part.grid();
    std::vector<cplx> spec(g.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        const double amp = part.shell(j, r);
        const double th = two_pi * unit();
        spec[flat] = amp * std::exp(cplx(0.0, th));
    });
    return {"shell_j" + std::to_string(j),
            SpectralField::from_spectrum(g, std::move(spec)), std::nullopt};
}

/// Builds the probe family on a grid: Gaussians, modulated Gaussians (carrier
/// along the first axis) and shell-localized random fields. Localized probes
/// are required to be numerically negligible (< boundary_tol of peak) at the
/// box boundary and every probe must be nonzero.
inline std::vector<Probe> build_probe_family(const Grid& g, const DyadicPartition& part,
                                             const ProbeFamilySpec& spec,
                                             double boundary_tol = 1e-12) {
    std::vector<Probe> family;
    auto add_gaussian = [&](const std::string& label, const GaussianSpec& gs) {
        SpectralField f = make_gaussian(g, gs);
        const double peak = f.max_abs();
        if (!(peak > 0.0)) throw NumericalError("probe '" + label + "' is identically zero");
        if (f.boundary_abs() > boundary_tol * peak)
            throw NumericalError("probe '" + label + "' is not negligible at the box boundary");
        family.push_back({label, std::move(f), gs});
    };
    for (double w : spec.gaussian_widths)
        add_gaussian("gauss_w" + detail::format_double_label(w), GaussianSpec{w, {0, 0, 0}, 1.0});
    for (double c : spec.carriers)
        add_gaussian("mod_c" + detail::format_double_label(c),
                     GaussianSpec{spec.carrier_width, {c, 0, 0}, 1.0});
    for (int j : spec.shells) {
        Probe p = make_shell_probe(part, j, spec.seed);
        if (!(p.field.max_abs() > 0.0))
            throw NumericalError("probe '" + p.label + "' is identically zero");
        family.push_back(std::move(p));
    }
    return family;
}

}  // namespace sdwave
