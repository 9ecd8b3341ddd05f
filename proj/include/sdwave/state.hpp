#pragma once

#include "sdwave/field.hpp"

namespace sdwave {

/// The pair Psi = (psi, d_t psi) evolved by the semigroup and the Duhamel
/// integral. Both components live on the same grid.
struct StateVector {
    SpectralField psi;
    SpectralField psi_t;

    StateVector(SpectralField p, SpectralField pt)
        : psi(std::move(p)), psi_t(std::move(pt)) {
        if (!(psi.grid() == psi_t.grid()))
            throw ShapeError("StateVector: components on different grids");
    }

    const Grid& grid() const { return psi.grid(); }
};

/// Discrete energy-style l2 magnitude of a state, sqrt(|psi|_2^2 + |psi_t|_2^2).
inline double state_l2(const StateVector& s) {
    const double a = lp_norm(s.psi, 2.0);
    const double b = lp_norm(s.psi_t, 2.0);
    return std::sqrt(a * a + b * b);
}

}  // namespace sdwave
