#pragma once

// Duhamel-solver experiments: `solve` (trajectory + diagnostics) and
// `convergence-study` (self-convergence order). Included by experiments.hpp.

#include "sdwave/experiments.hpp"

namespace sdwave {

namespace detail {

inline StateVector default_initial_state(const Grid& g) {
    SpectralField psi = make_gaussian(g, GaussianSpec{1.0, {0, 0, 0}, 1.0});
    SpectralField zero(g, std::vector<cplx>(g.size(), cplx(0.0)));
    return {std::move(psi), std::move(zero)};
}

}  // namespace detail

inline ExperimentResult run_solve(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    detail::Emitter out(cfg.experiment, cfg.output_dir);
    const Grid g = detail::grid_from(cfg);
    const NonlinearityParams params{cfg.nl_a, cfg.nl_b, cfg.nl_r};
    const SolverConfig solver{cfg.tau, cfg.picard_tol, cfg.picard_max};
    const StateVector initial = detail::default_initial_state(g);

    std::vector<std::pair<int, double>> snapshot_log;
    auto hook = [&](int step, double t, const StateVector& s) {
        if (cfg.snapshot_every <= 0 || step % cfg.snapshot_every != 0) return;
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06d.sdwf", step);
        write_snapshot(out.dir() / name, {s.psi, s.psi_t});
        out.note_file(name);
        snapshot_log.emplace_back(step, t);
    };
    const std::function<void(int, double, const StateVector&)> maybe_hook =
        cfg.snapshot_every > 0 ? std::function<void(int, double, const StateVector&)>(hook)
                               : nullptr;
    const Trajectory traj =
        evolve(initial, cfg.solver_delta, cfg.total_time, params, solver, maybe_hook);

    {
        auto csv = out.open_csv("trajectory.csv", "t,E,D,l2,linf");
        for (const auto& pt : traj.points)
            csv << format_double(pt.t) << ',' << format_double(pt.energy) << ','
                << format_double(pt.dissipation) << ',' << format_double(pt.l2) << ','
                << format_double(pt.linf) << '\n';
    }

    bool finite = true;
    for (const auto& pt : traj.points)
        if (!std::isfinite(pt.energy) || !std::isfinite(pt.l2)) finite = false;
    out.check("trajectory_finite", finite, finite ? 1.0 : 0.0, 1.0);

    if (cfg.solver_delta > 0.0 && cfg.nl_a == 0.0 && cfg.nl_b <= 0.0) {
        const double e0 = traj.points.front().energy;
        const double tol = cfg.tolerance("energy_tol", 1e-8) * std::abs(e0);
        int violations = 0;
        double worst = 0.0;
        for (std::size_t i = 1; i < traj.points.size(); ++i) {
            const double rise = traj.points[i].energy - traj.points[i - 1].energy;
            worst = std::max(worst, rise);
            if (rise > tol) ++violations;
        }
        out.check("energy_monotone", violations == 0, worst, tol,
                  "max per-step energy increase (defocusing, delta > 0)");
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out.finish(cfg, secs);
}

inline ExperimentResult run_convergence_study(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    detail::Emitter out(cfg.experiment, cfg.output_dir);
    const Grid g = detail::grid_from(cfg);
    const NonlinearityParams params{cfg.nl_a, cfg.nl_b, cfg.nl_r};
    const StateVector initial = detail::default_initial_state(g);
    const double T = cfg.total_time;

    auto final_state = [&](double tau) {
        SolverConfig sc{tau, cfg.picard_tol, cfg.picard_max};
        return evolve(initial, cfg.solver_delta, T, params, sc).final_state;
    };

    // Richardson-extrapolated reference from the two finest runs.
    const StateVector fine = final_state(T / 4096.0);
    const StateVector coarse2 = final_state(T / 2048.0);
    auto extrapolate = [&](const SpectralField& f, const SpectralField& c) {
        const auto& fv = f.values();
        const auto& cv = c.values();
        std::vector<cplx> outv(fv.size());
        for (std::size_t i = 0; i < fv.size(); ++i)
            outv[i] = fv[i] + (fv[i] - cv[i]) / 3.0;  // order-2 extrapolation
        return SpectralField(g, std::move(outv));
    };
    const StateVector reference{extrapolate(fine.psi, coarse2.psi),
                                extrapolate(fine.psi_t, coarse2.psi_t)};
    const double ref_norm = state_l2(reference);

    auto state_error = [&](const StateVector& s) {
        const auto &a = s.psi.values(), &b = reference.psi.values();
        const auto &at = s.psi_t.values(), &bt = reference.psi_t.values();
        KahanSum su;
        for (std::size_t i = 0; i < a.size(); ++i) {
            su.add(std::norm(a[i] - b[i]));
            su.add(std::norm(at[i] - bt[i]));
        }
        double hn = 1.0;
        for (int ax = 0; ax < g.n; ++ax) hn *= g.spacing();
        return std::sqrt(su.value() * hn) / ref_norm;
    };

    std::vector<double> taus, errors;
    for (int div : {64, 128, 256, 512, 1024}) {
        const double tau = T / div;
        taus.push_back(tau);
        errors.push_back(state_error(final_state(tau)));
    }

    {
        auto csv = out.open_csv("convergence.csv", "tau,error,observed_order");
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const double order =
                i + 1 < taus.size()
                    ? std::log(errors[i] / errors[i + 1]) / std::log(taus[i] / taus[i + 1])
                    : 0.0;
            csv << format_double(taus[i]) << ',' << format_double(errors[i]) << ','
                << format_double(order) << '\n';
        }
    }

    std::vector<double> lt, le;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        lt.push_back(std::log(taus[i]));
        le.push_back(std::log(errors[i]));
    }
    const double slope = line_fit(lt, le).slope;
    const double tol = cfg.tolerance("order_tol", 0.2);
    out.check("convergence_order", std::abs(slope - 2.0) <= tol, slope, tol,
              "log-log slope of endpoint error vs tau, target 2");

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out.finish(cfg, secs);
}

}  // namespace sdwave
