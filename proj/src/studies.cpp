#include "icesim/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icesim/errors.hpp"
#include "icesim/quadrature.hpp"

namespace icesim {

double l2_time_difference(const Grid& grid, const Trajectory& coarse, const Trajectory& fine, double tau_coarse) {
    if (coarse.size() < 2 || fine.size() < 2) return 0.0;
    const std::size_t r = (fine.size() - 1) / (coarse.size() - 1);
    if (r * (coarse.size() - 1) != fine.size() - 1) throw InputError("fine run does not refine the coarse run");
    const auto vol = grid.volumes();
    std::vector<double> per_step;
    for (std::size_t k = 1; k < coarse.size(); ++k) {
        const auto& a = coarse[k];
        const auto& b = fine[k * r];
        std::vector<double> cells(a.theta.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const double dt = a.theta[i] - b.theta[i];
            const double du = a.U[i] - b.U[i];
            const double dc = a.chi[i] - b.chi[i];
            cells[i] = vol[i] * (dt * dt + du * du + dc * dc);
        }
        per_step.push_back(tau_coarse * pairwise_sum(cells.data(), cells.size()));
    }
    return std::sqrt(pairwise_sum(per_step.data(), per_step.size()));
}

bool TauStudy::ratios_ok() const {
    if (!completed || ratios.empty()) return false;
    return std::all_of(ratios.begin(), ratios.end(), [&](double q) { return q <= ratio_limit; });
}

bool TauStudy::entropy_monotone() const {
    if (!completed || levels.size() < 2) return false;
    for (std::size_t j = 1; j < levels.size(); ++j) {
        if (!(levels[j].entropy_residual < levels[j - 1].entropy_residual)) return false;
    }
    return true;
}

TauStudy tau_convergence_study(const SimConfig& cfg, int levels) {
    if (levels < 2) throw InputError("tau study needs at least two halvings");
    TauStudy study;
    Trajectory previous;
    double previous_tau = 0.0;
    for (int j = 0; j <= levels; ++j) {
        SimConfig c = cfg;
        c.tau = cfg.tau / std::pow(2.0, j);
        const Stepper stepper = make_stepper(c);
        RunOutcome run = run_simulation(c, stepper);
        if (!run.completed) {
            study.completed = false;
            study.error = "tau = " + std::to_string(c.tau) + ": " + run.error;
            return study;
        }
        TauLevel level;
        level.tau = c.tau;
        level.seconds = run.seconds;
        level.entropy_residual = entropy_ledger(run.trajectory, stepper).residual_l1();
        level.energy_passed = energy_ledger_check(run.trajectory, stepper).passed();
        study.levels.push_back(level);
        if (j > 0) study.differences.push_back(l2_time_difference(stepper.grid(), previous, run.trajectory, previous_tau));
        previous = std::move(run.trajectory);
        previous_tau = c.tau;
    }
    for (std::size_t j = 1; j < study.differences.size(); ++j) {
        const double d0 = study.differences[j - 1];
        study.ratios.push_back(d0 > 0.0 ? study.differences[j] / d0 : 0.0);
    }
    return study;
}

namespace {

double l2_sq(std::span<const double> vol, std::span<const double> a, std::span<const double> b) {
    std::vector<double> cells(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) cells[i] = vol[i] * (a[i] - b[i]) * (a[i] - b[i]);
    return pairwise_sum(cells.data(), cells.size());
}

FieldSpec values_spec(Field values) {
    FieldSpec f;
    f.kind = "values";
    f.values = std::move(values);
    return f;
}

}  // namespace

PerturbationStudy perturbation_experiment(const SimConfig& cfg, const std::vector<double>& deltas,
                                          const PerturbMask& mask) {
    const MaterialModel model = build_material(cfg);
    if (!model.kappa_is_constant()) {
        throw InputError("perturbation experiment requires a constant conductivity kappa");
    }
    PerturbationStudy study;
    const Stepper base_stepper = make_stepper(cfg);
    const RunOutcome base = run_simulation(cfg, base_stepper);
    if (!base.completed) {
        study.completed = false;
        study.error = "baseline: " + base.error;
        return study;
    }
    const Grid& grid = base_stepper.grid();
    const auto vol = grid.volumes();
    const SimState& s0 = base.trajectory.front();
    const double tau = cfg.tau;
    const int n = cfg.steps();

    for (double delta : deltas) {
        SimConfig c = cfg;
        Field th = s0.theta, u = s0.U, ch = s0.chi;
        if (mask.theta0) {
            for (auto& v : th) v -= delta;
        }
        if (mask.chi0) {
            for (auto& v : ch) v = std::max(0.0, v - delta);
        }
        if (mask.U0) {
            for (auto& v : u) v += delta;
        }
        c.theta0 = values_spec(th);
        c.U0 = values_spec(u);
        c.chi0 = values_spec(ch);
        if (mask.P0) c.p0 = cfg.p0.shifted(delta);
        if (mask.theta_gamma) {
            for (auto& [side, ts] : c.theta_gamma) ts = ts.shifted(delta);
        }
        const Stepper stepper = make_stepper(c, base_stepper.c_R());
        const RunOutcome run = run_simulation(c, stepper);
        if (!run.completed) {
            study.completed = false;
            study.error = "delta = " + std::to_string(delta) + ": " + run.error;
            return study;
        }
        PerturbRow row;
        row.delta = delta;
        double theta_int = 0.0;
        double sup_mech = 0.0;
        for (int k = 0; k <= n; ++k) {
            const auto& a = base.trajectory[static_cast<std::size_t>(k)];
            const auto& b = run.trajectory[static_cast<std::size_t>(k)];
            if (k > 0) theta_int += tau * l2_sq(vol, a.theta, b.theta);
            sup_mech = std::max(sup_mech, l2_sq(vol, a.chi, b.chi) + l2_sq(vol, a.U, b.U));
        }
        row.numerator = theta_int + sup_mech;

        const auto& p0 = run.trajectory.front();
        double data = l2_sq(vol, s0.theta, p0.theta) + l2_sq(vol, s0.chi, p0.chi) + l2_sq(vol, s0.U, p0.U);
        const auto bfaces = grid.boundary();
        for (int k = 1; k <= n; ++k) {
            const double t = k * tau;
            const double dp = c.p0.value(t) - cfg.p0.value(t);
            data += tau * dp * dp;
            const auto ga = base_stepper.boundary().theta_gamma_at(t);
            const auto gb = stepper.boundary().theta_gamma_at(t);
            for (std::size_t b = 0; b < bfaces.size(); ++b) {
                const double d = gb[b] - ga[b];
                data += tau * base_stepper.boundary().heat_transfer[b] * bfaces[b].measure * d * d;
            }
        }
        row.denominator = data;
        row.Q = data > 0.0 ? row.numerator / data : 0.0;
        study.rows.push_back(row);
    }
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = 0.0;
    for (const auto& r : study.rows) {
        if (r.delta == 0.0 || r.denominator == 0.0) continue;
        qmin = std::min(qmin, r.Q);
        qmax = std::max(qmax, r.Q);
    }
    study.ratio = (qmax > 0.0 && std::isfinite(qmin)) ? qmax / qmin : 1.0;
    return study;
}

TruncationStudy truncation_study(const SimConfig& cfg) {
    TruncationStudy study;
    study.R = cfg.R;
    study.R2 = 2.0 * cfg.R;
    const MaterialModel model = build_material(cfg);
    study.c_R = compute_cR(TruncationFamily(model, study.R2));
    SimConfig c1 = cfg;
    SimConfig c2 = cfg;
    c2.R = study.R2;
    const Stepper s1 = make_stepper(c1, study.c_R);
    const Stepper s2 = make_stepper(c2, study.c_R);
    study.cutoff = s1.family().cutoff();
    const RunOutcome r1 = run_simulation(c1, s1);
    const RunOutcome r2 = run_simulation(c2, s2);
    if (!r1.completed || !r2.completed) {
        study.completed = false;
        study.error = r1.completed ? r2.error : r1.error;
        return study;
    }
    for (std::size_t k = 0; k < r1.trajectory.size(); ++k) {
        const auto& a = r1.trajectory[k];
        const auto& b = r2.trajectory[k];
        for (std::size_t i = 0; i < a.theta.size(); ++i) {
            study.sup_diff = std::max({study.sup_diff, std::abs(a.theta[i] - b.theta[i]), std::abs(a.U[i] - b.U[i]),
                                       std::abs(a.chi[i] - b.chi[i])});
            study.max_theta = std::max(study.max_theta, a.theta[i]);
        }
    }
    return study;
}

}  // namespace icesim
