#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sdwave/core.hpp"

namespace sdwave {

/// Least-squares power-law fit in log-log coordinates: value ~ C * t^slope.
struct DecayFit {
    std::vector<double> times;
    std::vector<double> values;
    double slope = 0.0;
    double log_intercept = 0.0;  // log C
    double residual = 0.0;       // RMS residual of log(value) about the fit

    double intercept() const { return std::exp(log_intercept); }
};

inline DecayFit decay_fit(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size()) throw ShapeError("decay_fit: size mismatch");
    if (times.size() < 6) throw DomainError("decay_fit: needs at least 6 points");
    const std::size_t m = times.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(times[i] > 0.0)) throw DomainError("decay_fit: nonpositive time");
        if (!(values[i] > 0.0)) throw DomainError("decay_fit: nonpositive value");
        sx += std::log(times[i]);
        sy += std::log(values[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = std::log(times[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(values[i]) - my);
    }
    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.log_intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = fit.log_intercept + fit.slope * std::log(times[i]);
        const double e = std::log(values[i]) - pred;
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / m);
    fit.times = std::move(times);
    fit.values = std::move(values);
    return fit;
}

/// Plain least-squares line through (x, y); for short regime-restricted
/// slope fits where decay_fit's 6-point gate does not apply.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit line_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ShapeError("line_fit: needs >= 2 points");
    const std::size_t m = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return {sxy / sxx, my - sxy / sxx * mx};
}

/// Log-spaced time grid [lo, hi] with the given number of points.
inline std::vector<double> log_spaced(double lo, double hi, int count) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo))
        throw DomainError("log_spaced: need hi > lo > 0 and count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return out;
}

/// The exponent bookkeeping of the L^p -> L^{p'} estimates:
///   p' = p/(p-1),  alpha = 2/p - 1,  decay(p, n) = 1 - 2n(1/p - 1/2),
/// with p admissible in [(2n+2)/(n+3), 2].
struct ExponentSet {
    double p;
    double p_conjugate;
    double alpha;
    double admissible_lower;
    double decay_exponent;
    int dimension;

    static double conjugate(double p) {
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return p / (p - 1.0);
    }

    static double lower_bound(int n) { return (2.0 * n + 2.0) / (n + 3.0); }

    static double decay(double p, int n) { return 1.0 - 2.0 * n * (1.0 / p - 0.5); }

    static ExponentSet make(double p, int n) {
        if (!(p >= lower_bound(n) && p <= 2.0))
            throw DomainError("ExponentSet: p outside [(2n+2)/(n+3), 2]");
        return {p, conjugate(p), 2.0 / p - 1.0, lower_bound(n), decay(p, n), n};
    }
};

}  // namespace sdwave
