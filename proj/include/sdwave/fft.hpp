#pragma once

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "sdwave/grid.hpp"

namespace sdwave {

namespace detail {

/// FFTW's planner is not thread-safe; executing distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline void dft_inplace(const Grid& g, std::vector<cplx>& buf, int sign) {
    if (buf.size() != g.size()) throw ShapeError("dft_inplace: buffer/grid size mismatch");
    int dims[3] = {g.points, g.points, g.points};
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(g.n, dims, data, data, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("dft_inplace: FFTW plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

/// Multiply by (-1)^(i0+i1+i2) and an overall scale in one pass. The sign
/// pattern re-centers the DFT so that slot m carries exactly
/// integral-convention data for the point x = -L/2 + i*h / frequency 2*pi*k/L.
inline void apply_checkerboard(const Grid& g, std::vector<cplx>& buf, double scale) {
    for_each_index(g, [&](std::size_t flat, int i0, int i1, int i2) {
        const bool odd = ((i0 + i1 + i2) & 1) != 0;
        buf[flat] *= odd ? -scale : scale;
    });
}

}  // namespace detail

/// Discrete realization of v_hat(xi) = integral v(x) e^{-i x.xi} dx
/// (rectangle rule): spectrum[m] = h^n * (-1)^{sum m_a} * DFT_m(values).
inline std::vector<cplx> forward_fft(const Grid& g, std::vector<cplx> values) {
    detail::dft_inplace(g, values, FFTW_FORWARD);
    double hn = 1.0;
    for (int a = 0; a < g.n; ++a) hn *= g.spacing();
    detail::apply_checkerboard(g, values, hn);
    return values;
}

/// Inverse with the (2*pi)^{-n} convention; exact inverse of forward_fft on
/// the lattice: values[j] = (1/L^n) * IDFT-sum of (-1)^{sum m} spectrum[m].
inline std::vector<cplx> inverse_fft(const Grid& g, std::vector<cplx> spectrum) {
    double inv_ln = 1.0;
    for (int a = 0; a < g.n; ++a) inv_ln /= g.box;
    detail::apply_checkerboard(g, spectrum, inv_ln);
    detail::dft_inplace(g, spectrum, FFTW_BACKWARD);
    return spectrum;
}

/// In-place variant of inverse_fft for large scan buffers.
inline void inverse_fft_inplace(const Grid& g, std::vector<cplx>& spectrum) {
    double inv_ln = 1.0;
    for (int a = 0; a < g.n; ++a) inv_ln /= g.box;
    detail::apply_checkerboard(g, spectrum, inv_ln);
    detail::dft_inplace(g, spectrum, FFTW_BACKWARD);
}

}  // namespace sdwave
