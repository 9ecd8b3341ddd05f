#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "sdwave/symbols.hpp"

namespace sdwave {

/// Sample point on the annulus A = {1/2 < |x| < 2}.
using Point = std::vector<double>;

/// Closed-form Hessian of the radial phase lambda_delta(|x|):
///   Hess = (lambda'/r) (I + (mu/r^2) x x^T),  mu = (r/lambda')(lambda'' - lambda'/r).
/// At delta = 0 this reduces to (1/r)(I - x x^T / r^2).
inline Eigen::MatrixXd hessian_radial(double delta, const Point& x, int n) {
    if (static_cast<int>(x.size()) != n)
        throw ShapeError("hessian_radial: point dimension mismatch");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw DomainError("hessian_radial: requires |x| > 0");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    if (delta == 0.0)
        return (Eigen::MatrixXd::Identity(n, n) - xv * xv.transpose() / r2) / r;
    const auto d = lambda_derivatives(r, delta);
    if (std::abs(d.first) < 1e-14)
        throw NumericalError("hessian_radial: singular parameterization (lambda' = 0)");
    const double mu = (r / d.first) * (d.second - d.first / r);
    return (d.first / r) *
           (Eigen::MatrixXd::Identity(n, n) + (mu / r2) * (xv * xv.transpose()));
}

/// Det(Hess) = (lambda'/r)^{n-1} lambda''.
inline double det_hessian(double delta, double r, int n) {
    if (delta == 0.0) return 0.0;
    const auto d = lambda_derivatives(r, delta);
    return std::pow(d.first / r, n - 1) * d.second;
}

/// Numerical rank: eigenvalues above 1e-8 of the largest magnitude.
inline int matrix_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto eig = es.eigenvalues();
    double top = 0.0;
    for (int i = 0; i < eig.size(); ++i) top = std::max(top, std::abs(eig[i]));
    if (top == 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < eig.size(); ++i)
        if (std::abs(eig[i]) > rel_tol * top) ++rank;
    return rank;
}

/// Minimum Hessian rank over a set of annulus samples.
inline int rank_on_annulus(double delta, int n, const std::vector<Point>& samples) {
    if (samples.empty()) throw DomainError("rank_on_annulus: empty sample set");
    int min_rank = n + 1;
    for (const auto& x : samples)
        min_rank = std::min(min_rank, matrix_rank(hessian_radial(delta, x, n)));
    return min_rank;
}

/// Largest |minor| of order n-1 of an n x n matrix (n = 2 or 3). For n = 2
/// these are the entries; for n = 3 the nine 2x2 cofactor minors.
inline double max_abs_minor(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n < 2) throw DomainError("max_abs_minor: needs n >= 2");
    double best = 0.0;
    if (n == 2) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) best = std::max(best, std::abs(m(i, j)));
        return best;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Eigen::MatrixXd sub(n - 1, n - 1);
            int rr = 0;
            for (int r = 0; r < n; ++r) {
                if (r == i) continue;
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub(rr, cc++) = m(r, c);
                }
                ++rr;
            }
            best = std::max(best, std::abs(sub.determinant()));
        }
    }
    return best;
}

struct MinorBound {
    double value = 0.0;
    double delta_at = 0.0;
    Point point_at;
};

/// min over (delta, x) of the max |(n-1)-minor| of Hess(lambda_delta) —
/// the quantity whose positive lower bound, uniform in delta, the curvature
/// analysis requires.
inline MinorBound minor_lower_bound(const std::vector<double>& deltas, int n,
                                    const std::vector<Point>& samples) {
    MinorBound out;
    out.value = std::numeric_limits<double>::infinity();
    for (double delta : deltas) {
        for (const auto& x : samples) {
            const double m = max_abs_minor(hessian_radial(delta, x, n));
            if (m < out.value) {
                out.value = m;
                out.delta_at = delta;
                out.point_at = x;
            }
        }
    }
    return out;
}

/// Deterministic radii x directions sample set on the closed sub-annulus
/// [r_lo, r_hi] (defaults trim the open annulus so lambda' stays away from
/// its zero at delta = 1/(2 sqrt 2), r = 2). The radial Hessian is
/// a I + b (x/r)(x/r)^T, so |entries| and eigenvalues are invariant under
/// coordinate sign flips and one octant of directions covers the sphere.
/// Directions form nested lattices (the quarter circle for n = 2, the
/// simplex {u_i^2 = k_i/m} for n = 3), so doubling `directions` refines the
/// sample set monotonically.
inline std::vector<Point> annulus_samples(int n, int radii, int directions,
                                          double r_lo = 0.55, double r_hi = 1.9) {
    std::vector<std::vector<double>> dirs;
    if (n == 1) {
        dirs.push_back({1.0});
    } else if (n == 2) {
        for (int k = 0; k <= directions; ++k) {
            const double th = 0.5 * pi * k / directions;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        for (int k1 = 0; k1 <= directions; ++k1)
            for (int k2 = 0; k1 + k2 <= directions; ++k2) {
                const int k3 = directions - k1 - k2;
                dirs.push_back({std::sqrt(static_cast<double>(k1) / directions),
                                std::sqrt(static_cast<double>(k2) / directions),
                                std::sqrt(static_cast<double>(k3) / directions)});
            }
    }
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(radii) * dirs.size());
    for (int i = 0; i < radii; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / std::max(1, radii - 1);
        for (const auto& u : dirs) {
            Point x(u.size());
            for (std::size_t a = 0; a < u.size(); ++a) x[a] = r * u[a];
            pts.push_back(std::move(x));
        }
    }
    return pts;
}

/// Seeded random (delta, x) pairs in [0, delta_hi] x sub-annulus, for the
/// finite-difference cross-checks.
inline std::vector<std::pair<double, Point>> random_annulus_samples(
    int n, int count, std::uint64_t seed, double delta_hi = delta_max_littman,
    double r_lo = 0.55, double r_hi = 1.9) {
    std::mt19937_64 eng(seed);
    auto unit = [&eng] { return (eng() >> 11) * 0x1.0p-53; };
    std::vector<std::pair<double, Point>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double delta = delta_hi * unit();
        const double r = r_lo + (r_hi - r_lo) * unit();
        Point x(static_cast<std::size_t>(n));
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& c : x) {
                c = 2.0 * unit() - 1.0;
                norm += c * c;
            }
        } while (norm < 1e-12);
        norm = std::sqrt(norm);
        for (auto& c : x) c *= r / norm;
        out.emplace_back(delta, std::move(x));
    }
    return out;
}

}  // namespace sdwave
