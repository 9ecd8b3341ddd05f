#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sdwave/littlewood_paley.hpp"

using namespace sdwave;
using Catch::Approx;

TEST_CASE("smooth cutoff and base bump") {
    CHECK(smooth_cutoff(0.0) == 1.0);
    CHECK(smooth_cutoff(1.0) == 1.0);
    CHECK(smooth_cutoff(2.0) == 0.0);
    CHECK(smooth_cutoff(5.0) == 0.0);
    for (double r : {1.1, 1.5, 1.9}) {
        CHECK(smooth_cutoff(r) > 0.0);
        CHECK(smooth_cutoff(r) < 1.0);
    }
    // supp(phi) inside {1/2 < r < 2}, phi(1) = 1 exactly.
    CHECK(dyadic_bump(0.5) == 0.0);
    CHECK(dyadic_bump(0.49) == 0.0);
    CHECK(dyadic_bump(2.0) == 0.0);
    CHECK(dyadic_bump(1.0) == 1.0);
    CHECK(dyadic_bump(0.75) > 0.0);
}

TEST_CASE("partition construction, telescoping and overlap") {
    const Grid g = make_grid(2, 256, 8.0);  // Nyquist ~ 100
    const int J = 4;
    const DyadicPartition part = build_partition(g, J);

    // |xi| = 0.3: phi_0 = 1, the rest vanish.
    CHECK(part.shell(0, 0.3) == 1.0);
    for (int j = 1; j <= J; ++j) CHECK(part.shell(j, 0.3) == 0.0);

    // phi_j(2^j) = phi(1) = 1.
    for (int j = 1; j <= J; ++j) CHECK(part.shell(j, std::ldexp(1.0, j)) == 1.0);

    const double top = std::ldexp(1.0, J);
    double sum_err = 0.0, overlap = 0.0, range = 0.0;
    std::vector<double> sh(static_cast<std::size_t>(J) + 1);
    for_each_freq_radius(g, [&](std::size_t, double r) {
        for (int j = 0; j <= J; ++j) {
            sh[static_cast<std::size_t>(j)] = part.shell(j, r);
            range = std::max({range, -sh[static_cast<std::size_t>(j)],
                              sh[static_cast<std::size_t>(j)] - 1.0});
        }
        double s = 0.0;
        for (double v : sh) s += v;
        if (r <= top) sum_err = std::max(sum_err, std::abs(s - 1.0));
        for (int j = 0; j + 2 <= J; ++j)
            for (int k = j + 2; k <= J; ++k)
                overlap = std::max(overlap, std::abs(sh[static_cast<std::size_t>(j)] *
                                                     sh[static_cast<std::size_t>(k)]));
    });
    CHECK(sum_err <= 1e-12);
    CHECK(overlap == 0.0);
    CHECK(range == 0.0);

    // Nyquist too small for the requested number of shells.
    CHECK_THROWS_AS(build_partition(make_grid(1, 16, 8.0), 3), GridError);
    CHECK_THROWS_AS(part.shell(J + 1, 1.0), DomainError);
}

TEST_CASE("shell projections") {
    const Grid g = make_grid(1, 512, 16.0);  // Nyquist ~ 100.5
    const int J = 5;
    const DyadicPartition part = build_partition(g, J);

    // Spectrum inside |xi| <= 1/2: projection 0 is the identity, others vanish.
    std::vector<cplx> low(g.size(), cplx(0.0));
    low[1] = 1.0;  // |xi| = 2 pi/16 ~ 0.39
    SpectralField vlow = SpectralField::from_spectrum(g, std::move(low));
    SpectralField p0 = shell_project(vlow, part, 0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(p0.values()[i] - vlow.values()[i]));
    CHECK(err <= 1e-14);
    for (int j = 1; j <= J; ++j) CHECK(shell_project(vlow, part, j).max_abs() == 0.0);

    // v_hat = phi_3: overlaps shells {2, 3, 4} only.
    std::vector<cplx> spec(g.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) { spec[flat] = part.shell(3, r); });
    SpectralField vshell = SpectralField::from_spectrum(g, std::move(spec));
    for (int j = 0; j <= J; ++j) {
        const double m = shell_project(vshell, part, j).max_abs();
        if (j >= 2 && j <= 4)
            CHECK(m > 1e-6);
        else
            CHECK(m == 0.0);
    }

    // Random field band-limited to |xi| <= 2^J: projections resum to v.
    std::vector<cplx> rnd = oracles::random_values(g, 99);
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        if (r > std::ldexp(1.0, J)) rnd[flat] = 0.0;
    });
    SpectralField v = SpectralField::from_spectrum(g, std::move(rnd));
    std::vector<cplx> acc(g.size(), cplx(0.0));
    for (int j = 0; j <= J; ++j) {
        const auto& pj = shell_project(v, part, j).values();
        for (std::size_t i = 0; i < g.size(); ++i) acc[i] += pj[i];
    }
    double rerr = 0.0, scale = v.max_abs();
    for (std::size_t i = 0; i < g.size(); ++i)
        rerr = std::max(rerr, std::abs(acc[i] - v.values()[i]));
    CHECK(rerr <= 1e-12 * scale);

    CHECK_THROWS_AS(shell_project(v, part, J + 2), DomainError);
}

TEST_CASE("besov norm: low-frequency reduction and two-shell bracket") {
    const Grid g = make_grid(2, 128, 32.0);  // Nyquist ~ 12.6, resolves J = 2
    const DyadicPartition part = build_partition(g, 2);

    // Spectrum in |xi| <= 1/2: single j = 0 term with weight 1 for any sigma, q.
    std::vector<cplx> low(g.size(), cplx(0.0));
    low[1] = cplx(0.7, 0.2);                     // |xi| ~ 0.196
    low[static_cast<std::size_t>(g.points)] = 0.4;  // same radius, other axis
    SpectralField v = SpectralField::from_spectrum(g, std::move(low));
    for (double sigma : {-1.0, 0.7})
        for (double q : {1.0, 1.5, std::numeric_limits<double>::infinity()}) {
            const BesovParams bp{sigma, 2.0, q, 2};
            CHECK(besov_norm(v, part, bp) == Approx(lp_norm(v, 2.0)).epsilon(1e-12));
        }

    // sigma = 0, p = q = 2: value^2 within [|v|_2^2 / 2, |v|_2^2].
    std::vector<cplx> rnd = oracles::random_values(g, 123);
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        if (r > 4.0) rnd[flat] = 0.0;  // keep spectrum within 2^J
    });
    SpectralField w = SpectralField::from_spectrum(g, std::move(rnd));
    const double b = besov_norm(w, part, BesovParams{0.0, 2.0, 2.0, 2});
    const double l2 = lp_norm(w, 2.0);
    CHECK(b * b >= 0.5 * l2 * l2 * (1.0 - 1e-12));
    CHECK(b * b <= l2 * l2 * (1.0 + 1e-12));
}

TEST_CASE("besov norm against an independent continuum quadrature oracle") {
    // v_hat = phi_2, sigma = 1, p = q = 2, n = 2. Shell norms have the closed
    // Parseval form (2 pi)^{-1} int (phi_j phi_2)^2 r dr, evaluated by dense
    // Simpson; no transform or lattice is involved in the oracle.
    const Grid g = make_grid(2, 1024, 80.0);  // Nyquist ~ 40 resolves J = 4
    const int J = 4;
    const DyadicPartition part = build_partition(g, J);
    std::vector<cplx> spec(g.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) { spec[flat] = part.shell(2, r); });
    SpectralField v = SpectralField::from_spectrum(g, std::move(spec));
    const double got = besov_norm(v, part, BesovParams{1.0, 2.0, 2.0, J});

    auto shell_sq = [&](int j) {
        const int M = 1 << 18;
        const long double hi = 16.0L, h = hi / M;
        long double acc = 0.0L;
        for (int i = 0; i <= M; ++i) {
            const double r = static_cast<double>(i * h);
            const long double f = part.shell(j, r) * part.shell(2, r);
            const long double wgt = (i == 0 || i == M) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
            acc += wgt * f * f * static_cast<long double>(r);
        }
        return static_cast<double>(acc * h / 3.0L / (2.0 * pi));
    };
    long double sum = 0.0L;
    for (int j = 0; j <= J; ++j) sum += std::pow(2.0L, 2.0L * j) * shell_sq(j);
    const double want = std::sqrt(static_cast<double>(sum));
    CHECK(got == Approx(want).epsilon(1e-8));
}

TEST_CASE("besov norm scaling consistency under a one-shell spectrum shift") {
    const Grid g = make_grid(2, 512, 40.0);  // Nyquist ~ 40 resolves J = 4
    const int J = 4;
    const DyadicPartition part = build_partition(g, J);
    // Radial profile living on shell 2; the shifted field has the profile at
    // half the radius (one shell up), L2-normalized by 2^{-n/2}.
    auto profile = [&part](double r) { return part.shell(2, r); };
    std::vector<cplx> a(g.size()), b(g.size());
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        a[flat] = profile(r);
        b[flat] = 0.5 * profile(0.5 * r);  // 2^{-n/2} with n = 2
    });
    SpectralField va = SpectralField::from_spectrum(g, std::move(a));
    SpectralField vb = SpectralField::from_spectrum(g, std::move(b));
    for (double sigma : {0.5, 1.0, 2.0}) {
        const double na = besov_norm(va, part, BesovParams{sigma, 2.0, 2.0, J});
        const double nb = besov_norm(vb, part, BesovParams{sigma, 2.0, 2.0, J});
        CHECK(nb / na == Approx(std::pow(2.0, sigma)).epsilon(0.02));
    }
}

TEST_CASE("besov norm axioms and leakage detection") {
    const Grid g = make_grid(2, 128, 32.0);
    const DyadicPartition part = build_partition(g, 2);
    auto band_limited = [&](std::uint64_t seed) {
        std::vector<cplx> s = oracles::random_values(g, seed);
        for_each_freq_radius(g, [&](std::size_t flat, double r) {
            if (r > 4.0) s[flat] = 0.0;
        });
        return SpectralField::from_spectrum(g, std::move(s));
    };
    const BesovParams bp{1.0, 1.5, 2.0, 2};
    SpectralField u = band_limited(1), v = band_limited(2);

    // Absolute homogeneity.
    std::vector<cplx> su = u.values();
    for (auto& z : su) z *= cplx(0.0, -3.0);
    CHECK(besov_norm(SpectralField(g, std::move(su)), part, bp) ==
          Approx(3.0 * besov_norm(u, part, bp)).epsilon(1e-12));

    // Triangle inequality on random pairs.
    std::vector<cplx> sum = u.values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v.values()[i];
    CHECK(besov_norm(SpectralField(g, std::move(sum)), part, bp) <=
          (besov_norm(u, part, bp) + besov_norm(v, part, bp)) * (1.0 + 1e-12));

    // Spectral leakage above 2^J errors out.
    std::vector<cplx> bad(g.size(), cplx(0.0));
    for_each_freq_radius(g, [&](std::size_t flat, double r) {
        if (r > 5.0 && r < 6.0) bad[flat] = 1.0;
    });
    SpectralField vb = SpectralField::from_spectrum(g, std::move(bad));
    CHECK_THROWS_AS(besov_norm(vb, part, bp), NumericalError);
}
