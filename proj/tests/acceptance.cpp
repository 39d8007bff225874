// Acceptance checks 1-10 on the shipped scenarios. One PASS/FAIL line per criterion;
// the exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "cell_oracle.hpp"
#include "fixtures.hpp"
#include "icesim/diagnostics.hpp"
#include "icesim/simulation.hpp"
#include "icesim/studies.hpp"

using namespace icesim;

namespace {

// Tolerances.
constexpr double kComplementarityTol = 1e-10;
constexpr double kRuntimeLimit = 10.0;
constexpr double kEnergyTol = 1e-9;
constexpr double kClosedFormTol = 1e-10;
constexpr double kHalvingLow = 0.45;
constexpr double kHalvingHigh = 0.55;
constexpr int kCellInstances = 1000;
constexpr int kOracleGrid = 2000;
constexpr double kOracleTol = 2e-3;
constexpr double kStationaryTol = 1e-12;
constexpr int kStationarySteps = 1000;
constexpr double kJacobianTol = 1e-6;
constexpr int kJacobianStates = 100;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

template <class F>
void guarded(int id, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    const SimConfig freezing = fixture::load("freezing.json");
    const Stepper stepper = make_stepper(freezing);
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome run = run_simulation(freezing, stepper);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!run.completed) std::printf("freezing run failed: %s\n", run.error.c_str());

    guarded(1, [&] {
        double lo = 1.0, hi = 0.0;
        for (const auto& s : run.trajectory) {
            lo = std::min(lo, *std::min_element(s.chi.begin(), s.chi.end()));
            hi = std::max(hi, *std::max_element(s.chi.begin(), s.chi.end()));
        }
        const auto c = complementarity_check(run.trajectory, stepper);
        const bool ok = run.completed && lo >= 0.0 && hi <= 1.0 && c.max_phase_residual <= kComplementarityTol &&
                        c.max_volume_residual <= kComplementarityTol && seconds < kRuntimeLimit;
        report(1, ok,
               fmt("chi in [%g, %g], phase residual %.2e, volume residual %.2e", lo, hi, c.max_phase_residual,
                   c.max_volume_residual) +
                   fmt(", %.2f s", seconds));
    });

    guarded(2, [&] {
        const auto ledger = energy_ledger_check(run.trajectory, stepper, kEnergyTol);
        auto mutated = run.trajectory;
        const std::size_t k = mutated.size() / 2;
        for (auto& th : mutated[k].theta) th *= 1.1;
        const bool caught = !energy_ledger_check(mutated, stepper, kEnergyTol).passed();
        report(2, run.completed && ledger.passed() && caught,
               fmt("worst margin %.3e over %g rows; +10%% theta at step %g detected: ", ledger.worst_margin(),
                   static_cast<double>(ledger.rows().size()), static_cast<double>(k)) +
                   (caught ? "yes" : "no"));
    });

    guarded(3, [&] {
        const auto& fam = stepper.family();
        const auto& m = fam.model();
        const double v0 = m.constants().theta_lower;
        const double c_R = stepper.c_R();
        const auto v = lower_bound_sequence(v0, c_R, m.bounds().c_low, fam, freezing.tau, freezing.steps());
        const auto b = bounds_monitor(run.trajectory, stepper, v);
        double closed_err = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double closed = v0 * std::pow(1.0 + 2.0 * c_R * freezing.tau, -0.5 * static_cast<double>(k));
            closed_err = std::max(closed_err, std::abs(v[k] - closed) / closed);
        }
        // log v_n against log(v0 e^{-c_R T}) as tau halves
        const double taus[] = {1e-5, 5e-6, 2.5e-6};
        double err[3];
        for (int j = 0; j < 3; ++j) {
            const int n = static_cast<int>(std::lround(freezing.T / taus[j]));
            const auto vj = lower_bound_sequence(v0, c_R, m.bounds().c_low, fam, taus[j], n);
            err[j] = std::abs(std::log(vj.back()) - (std::log(v0) - c_R * freezing.T));
        }
        const double r1 = err[1] / err[0], r2 = err[2] / err[1];
        const bool halves = r1 >= kHalvingLow && r1 <= kHalvingHigh && r2 >= kHalvingLow && r2 <= kHalvingHigh;
        report(3, b.lower_bound_ok && closed_err <= kClosedFormTol && halves,
               fmt("min(theta_k - v_k) %.3e, closed-form rel err %.2e, log-error ratios %.4f %.4f",
                   b.min_lower_margin, closed_err, r1, r2));
    });

    guarded(4, [&] {
        const TruncationFamily fam(MaterialModel::reference(fixture::load("freezing.json").constants), 4.0);
        const TruncationFamily loaded(build_material(freezing), 4.0);
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        double m_min = std::numeric_limits<double>::infinity();
        for (int t = 0; t < kCellInstances; ++t) {
            const auto& f = (t % 2) ? loaded : fam;
            const CellData c = oracle::random_cell(rng, f);
            const auto s = solve_cell(c, f);
            const auto g = oracle::brute_force(c, f, kOracleGrid);
            worst = std::max({worst, std::abs(s.U - g.U), std::abs(s.chi - g.chi)});
            for (int p = 0; p < 10; ++p) {
                const double U1 = c.U_prev - 2 + 4 * u(rng), U2 = c.U_prev - 2 + 4 * u(rng);
                const double x1 = u(rng), x2 = u(rng);
                const auto a = cell_map(c, f, U1, x1);
                const auto b = cell_map(c, f, U2, x2);
                const double d2 = (U1 - U2) * (U1 - U2) + (x1 - x2) * (x1 - x2);
                if (d2 == 0.0) continue;
                m_min = std::min(m_min, ((a.first - b.first) * (U1 - U2) + (a.second - b.second) * (x1 - x2)) / d2);
            }
        }
        report(4, worst <= kOracleTol && m_min > 0.0,
               fmt("max |solver - grid search| %.2e over %g instances, min monotonicity modulus %.3e", worst,
                   kCellInstances, m_min));
    });

    guarded(5, [&] {
        auto cfg = fixture::load("stationary.json");
        cfg.T = kStationarySteps * cfg.tau;
        const Stepper st = make_stepper(cfg);
        SimState s = make_initial_state(cfg, st);
        double worst = 0.0;
        for (int k = 0; k < kStationarySteps; ++k) {
            const SimState next = st.step(s);
            for (std::size_t i = 0; i < s.theta.size(); ++i) {
                worst = std::max({worst, std::abs(next.theta[i] - s.theta[i]), std::abs(next.U[i] - s.U[i]),
                                  std::abs(next.chi[i] - s.chi[i])});
            }
            s = next;
        }
        report(5, worst <= kStationaryTol, fmt("max per-step change %.2e over %g steps", worst, kStationarySteps));
    });

    guarded(6, [&] {
        const auto t = truncation_study(freezing);
        report(6, t.passed(),
               fmt("R=%g vs %g (c_R=%.4f): sup diff %.2e", t.R, t.R2, t.c_R, t.sup_diff) +
                   fmt(", max theta %.6f < B(R)=%.4f", t.max_theta, t.cutoff));
    });

    guarded(7, [&] {
        const auto cfg = fixture::load("freezing_const_kappa.json");
        const auto p = perturbation_experiment(cfg, {0.0, 1e-2, 1e-3, 1e-4});
        double zero = -1.0;
        std::string qs;
        for (const auto& r : p.rows) {
            if (r.delta == 0.0) zero = r.numerator;
            else qs += fmt(" Q(%g)=%.4f", r.delta, r.Q);
        }
        report(7, p.passed() && zero == 0.0, fmt("ratio %.4f, Q(0) numerator %.1e;", p.ratio, zero) + qs);
    });

    TauStudy tau;
    guarded(8, [&] {
        tau = tau_convergence_study(freezing, 3);
        std::string ds;
        for (double r : tau.ratios) ds += fmt(" %.4f", r);
        report(8, tau.ratios_ok(), fmt("d = %.3e %.3e %.3e; ratios", tau.differences.size() > 2 ? tau.differences[0] : 0.0,
                                       tau.differences.size() > 2 ? tau.differences[1] : 0.0,
                                       tau.differences.size() > 2 ? tau.differences[2] : 0.0) +
                                       ds);
    });

    guarded(9, [&] {
        std::mt19937_64 rng(77);
        const TruncationFamily blend(MaterialModel::convex_blend(), 4.0);
        const Grid& g = stepper.grid();
        double worst = 0.0;
        for (int t = 0; t < kJacobianStates; ++t) {
            const auto& f = (t % 2) ? blend : stepper.family();
            const auto sys = fixture::random_theta_system(rng, g, f, stepper.c_R(), freezing.tau);
            worst = std::max(worst, fixture::jacobian_fd_error(sys, rng));
        }
        report(9, worst <= kJacobianTol, fmt("max relative mismatch %.2e over %g states", worst, kJacobianStates));
    });

    guarded(10, [&] {
        double min_sample = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < run.trajectory.size(); ++k) {
            for (double d : dissipation_samples(stepper, run.trajectory[k - 1], run.trajectory[k])) {
                min_sample = std::min(min_sample, d);
            }
        }
        std::string rs;
        for (const auto& l : tau.levels) rs += fmt(" %.3e", l.entropy_residual);
        report(10, min_sample >= 0.0 && tau.entropy_monotone(),
               fmt("min dissipation sample %.2e; entropy residual by level", min_sample) + rs);
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
