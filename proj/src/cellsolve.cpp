#include "icesim/cellsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "icesim/errors.hpp"
#include "icesim/parallel.hpp"

namespace icesim {

namespace {

constexpr double kInclusionTol = 1e-12;
constexpr double kPairTol = 1e-12;

/// Quantities of one cell that do not depend on (U, chi).
struct FrozenCell {
    double lambda_prev;
    double gamma_prev;
    double q_prev;
    double delta_f;  ///< f1^R(theta_prev) - f1(theta_c)
    double forcing;  ///< K(U_Omega + p) + g(zeta - x3) + 1
};

FrozenCell freeze(const CellData& cell, const TruncationFamily& family) {
    const auto& m = family.model();
    const auto& k = m.constants();
    return {m.lambda(cell.chi_prev), m.gamma(cell.theta_prev), family.qr(cell.theta_prev),
            family.f1r(cell.theta_prev) - family.f1_critical(),
            k.k_gamma * (cell.U_Omega + cell.p_k) + k.g * (k.zeta_gamma - cell.x3) + 1.0};
}

double phase_residual(const MaterialModel& m, const CellData& cell, const FrozenCell& fc, double U, double chi) {
    const double s = U - 1.0 + chi;
    return fc.gamma_prev * (chi - cell.chi_prev) / cell.tau + m.c_prime(chi) * fc.delta_f - 2.0 * fc.q_prev +
           0.5 * m.lambda_prime(chi) * s * s + fc.lambda_prev * s + 2.0;
}

double volume_residual(const CellData& cell, const FrozenCell& fc, double U, double chi) {
    return (U - cell.U_prev) / cell.tau - fc.q_prev + fc.lambda_prev * (U - 1.0 + chi) + fc.forcing;
}

/// U solving the volume equation for fixed chi (it is affine in U).
double slaved_volume(const CellData& cell, const FrozenCell& fc, double chi) {
    return (cell.U_prev / cell.tau + fc.q_prev - fc.lambda_prev * (chi - 1.0) - fc.forcing) /
           (1.0 / cell.tau + fc.lambda_prev);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

/// Scaled pair residual used to accept a solution: tau*Phi_1 and the natural residual with step tau/gamma.
double pair_residual(const MaterialModel& m, const CellData& cell, const FrozenCell& fc, double U, double chi) {
    const double r1 = cell.tau * volume_residual(cell, fc, U, chi);
    const double step = cell.tau / fc.gamma_prev;
    const double r2 = chi - clamp01(chi - step * phase_residual(m, cell, fc, U, chi));
    return std::max(std::abs(r1), std::abs(r2));
}

ActiveSet classify(double chi) {
    if (chi == 0.0) return ActiveSet::Lower;
    if (chi == 1.0) return ActiveSet::Upper;
    return ActiveSet::Interior;
}

CellSolution finish(const MaterialModel& m, const CellData& cell, const FrozenCell& fc, double U, double chi,
                    ActiveSet active, bool fallback) {
    const double r1 = std::abs(volume_residual(cell, fc, U, chi));
    const double r2 = complementarity_residual(chi, phase_residual(m, cell, fc, U, chi));
    return {U, chi, active, std::max(r1, r2), fallback};
}

/// 2x2 semismooth Newton on (tau Phi_1, chi - clamp(chi - s Phi_2)).
CellSolution semismooth_fallback(const MaterialModel& m, const CellData& cell, const FrozenCell& fc, double U,
                                 double chi) {
    const double step = cell.tau / fc.gamma_prev;
    auto residual = [&](double u, double x) {
        const double r1 = cell.tau * volume_residual(cell, fc, u, x);
        const double r2 = x - clamp01(x - step * phase_residual(m, cell, fc, u, x));
        return std::pair{r1, r2};
    };
    for (int it = 0; it < 100; ++it) {
        auto [r1, r2] = residual(U, chi);
        const double norm = std::max(std::abs(r1), std::abs(r2));
        if (norm <= kPairTol) return finish(m, cell, fc, U, chi, classify(chi), true);
        const double s = U - 1.0 + chi;
        const double a11 = 1.0 + cell.tau * fc.lambda_prev;
        const double a12 = cell.tau * fc.lambda_prev;
        double a21 = 0.0;
        double a22 = 1.0;
        const double trial = chi - step * phase_residual(m, cell, fc, U, chi);
        if (trial > 0.0 && trial < 1.0) {
            a21 = step * (m.lambda_prime(chi) * s + fc.lambda_prev);
            a22 = step * (fc.gamma_prev / cell.tau + m.c_second(chi) * fc.delta_f + 0.5 * m.lambda_second(chi) * s * s +
                          m.lambda_prime(chi) * s + fc.lambda_prev);
        }
        const double det = a11 * a22 - a12 * a21;
        if (!(std::abs(det) > 0.0)) break;
        const double du = -(a22 * r1 - a12 * r2) / det;
        const double dx = -(-a21 * r1 + a11 * r2) / det;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const double nu = U + alpha * du;
            const double nx = clamp01(chi + alpha * dx);
            auto [q1, q2] = residual(nu, nx);
            if (std::max(std::abs(q1), std::abs(q2)) < (1.0 - 1e-4 * alpha) * norm) {
                U = nu;
                chi = nx;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    std::ostringstream os;
    os << "cell solve failed to converge (theta_prev=" << cell.theta_prev << ", U_prev=" << cell.U_prev
       << ", chi_prev=" << cell.chi_prev << ", tau=" << cell.tau << "); reduce the time step";
    throw TauTooLargeError(os.str());
}

}  // namespace

const char* active_set_name(ActiveSet a) {
    switch (a) {
        case ActiveSet::Interior: return "interior";
        case ActiveSet::Lower: return "lower";
        case ActiveSet::Upper: return "upper";
    }
    return "?";
}

CouplingTerms coupling_terms(double U, double chi, double chi_prev, double theta_prev, double x3, double U_Omega,
                             double p_k, const TruncationFamily& family) {
    if (chi < 0.0 || chi > 1.0 || chi_prev < 0.0 || chi_prev > 1.0) {
        throw InputError("coupling_terms: phase fractions must lie in [0, 1]");
    }
    const auto& m = family.model();
    const auto& k = m.constants();
    const double s = U - 1.0 + chi;
    const double lambda_prev = m.lambda(chi_prev);
    const double A = lambda_prev * s + k.k_gamma * (U_Omega + p_k) + k.g * (k.zeta_gamma - x3) + 1.0;
    const double B = m.c_prime(chi) * (family.f1r(theta_prev) - family.f1_critical()) - 2.0 * family.qr(theta_prev);
    const double C = 0.5 * m.lambda_prime(chi) * s * s + lambda_prev * s + 2.0;
    return {A, B, C};
}

std::pair<double, double> cell_map(const CellData& cell, const TruncationFamily& family, double U, double chi) {
    const FrozenCell fc = freeze(cell, family);
    return {volume_residual(cell, fc, U, chi), phase_residual(family.model(), cell, fc, U, chi)};
}

double complementarity_residual(double chi, double F) { return std::abs(chi - clamp01(chi - F)); }

ScalarInclusionResult solve_scalar_inclusion(const ScalarResidual& F) {
    const double f0 = F(0.0).first;
    const double f1 = F(1.0).first;
    if (!std::isfinite(f0) || !std::isfinite(f1)) throw SolverError("phase residual is not finite");
    if (f0 > 0.0 && f1 < 0.0) {
        throw TauTooLargeError("phase residual is not increasing on [0, 1] (F(0) > 0 > F(1)); reduce the time step");
    }
    if (f0 >= 0.0) return {0.0, ActiveSet::Lower, 0.0};
    if (f1 <= 0.0) return {1.0, ActiveSet::Upper, 0.0};

    double lo = 0.0;
    double hi = 1.0;
    double flo = f0;
    double fhi = f1;
    double x = lo - flo * (hi - lo) / (fhi - flo);
    double fx = 0.0;
    for (int it = 0; it < 200; ++it) {
        const auto [value, slope] = F(x);
        fx = value;
        if (std::abs(fx) <= kInclusionTol) break;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
        double next = (slope > 0.0) ? x - fx / slope : -1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    if (x <= 0.0 || x >= 1.0) x = std::min(std::max(x, std::nextafter(0.0, 1.0)), std::nextafter(1.0, 0.0));
    return {x, ActiveSet::Interior, std::abs(fx)};
}

CellSolution solve_cell(const CellData& cell, const TruncationFamily& family) {
    if (!(cell.tau > 0.0)) throw InputError("solve_cell: tau must be positive");
    if (cell.chi_prev < 0.0 || cell.chi_prev > 1.0) throw InputError("solve_cell: chi_prev outside [0, 1]");
    if (!std::isfinite(cell.theta_prev) || !std::isfinite(cell.U_prev) || !std::isfinite(cell.U_Omega) ||
        !std::isfinite(cell.p_k)) {
        throw InputError("solve_cell: non-finite cell data");
    }
    const auto& m = family.model();
    const FrozenCell fc = freeze(cell, family);
    const double du_dchi = -fc.lambda_prev / (1.0 / cell.tau + fc.lambda_prev);
    const double ds_dchi = du_dchi + 1.0;

    const ScalarResidual reduced = [&](double chi) {
        const double U = slaved_volume(cell, fc, chi);
        const double s = U - 1.0 + chi;
        const double value = phase_residual(m, cell, fc, U, chi);
        const double slope = fc.gamma_prev / cell.tau + m.c_second(chi) * fc.delta_f +
                             0.5 * m.lambda_second(chi) * s * s + m.lambda_prime(chi) * s * ds_dchi +
                             fc.lambda_prev * ds_dchi;
        return std::pair{value, slope};
    };

    ScalarInclusionResult phase = solve_scalar_inclusion(reduced);
    const double U = slaved_volume(cell, fc, phase.chi);
    if (pair_residual(m, cell, fc, U, phase.chi) <= kPairTol) {
        return finish(m, cell, fc, U, phase.chi, phase.active, false);
    }
    return semismooth_fallback(m, cell, fc, U, phase.chi);
}

double max_stable_tau(const TruncationFamily& family, double strain_bound) {
    const auto& b = family.model().bounds();
    const double s = std::abs(strain_bound);
    const double delta_f = std::abs(family.f1r(family.cutoff())) + std::abs(family.f1_critical());
    const double off = b.lambda_high + 0.5 * b.lambda_prime_max * s;
    const double drift = b.c_second_max * delta_f + 0.5 * b.lambda_second_max * s * s + b.lambda_prime_max * s;
    double limit = std::numeric_limits<double>::infinity();
    if (off > 0.0) limit = std::min(limit, 1.0 / off);
    if (drift + off > 0.0) limit = std::min(limit, b.gamma_low / (drift + off));
    return 0.5 * limit;
}

std::vector<CellSolution> solve_cells_at(std::span<const CellData> cells, double U_Omega,
                                         const TruncationFamily& family) {
    std::vector<CellSolution> out(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        CellData c = cells[i];
        c.U_Omega = U_Omega;
        out[i] = solve_cell(c, family);
    });
    return out;
}

VolumeCoupling solve_volume_coupling(std::span<const CellData> cells, const Grid& grid,
                                     const TruncationFamily& family) {
    if (cells.size() != static_cast<std::size_t>(grid.cell_count())) {
        throw InputError("solve_volume_coupling: one CellData per grid cell required");
    }
    const double k_gamma = family.model().constants().k_gamma;
    if (k_gamma < 0.0) throw InputError("solve_volume_coupling: K_Gamma must be non-negative");

    VolumeCoupling result;
    Field u(cells.size());
    auto psi = [&](double m, std::vector<CellSolution>& sols) {
        sols = solve_cells_at(cells, m, family);
        for (std::size_t i = 0; i < sols.size(); ++i) u[i] = sols[i].U;
        ++result.evaluations;
        return integrate_field(grid, u) - m;
    };

    Field u_prev(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) u_prev[i] = cells[i].U_prev;
    double m0 = integrate_field(grid, u_prev);
    std::vector<CellSolution> sols;
    double psi0 = psi(m0, sols);
    if (k_gamma == 0.0) {
        result.U_Omega = m0 + psi0;
        result.psi = 0.0;
        result.solutions = std::move(sols);
        return result;
    }
    const double tol = 1e-11 * grid.measure();
    if (std::abs(psi0) <= tol) {
        result.U_Omega = m0;
        result.psi = psi0;
        result.solutions = std::move(sols);
        return result;
    }

    // psi is strictly decreasing with slope at most -1; expand a bracket from m0.
    double a = m0, fa = psi0;
    double step = psi0;
    double b = m0 + step, fb = 0.0;
    std::vector<CellSolution> scratch;
    for (int expand = 0;; ++expand) {
        fb = psi(b, scratch);
        if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) break;
        if (expand > 60) throw SolverError("solve_volume_coupling: failed to bracket the total volume increment");
        a = b;
        fa = fb;
        step *= 2.0;
        b = a + step;
    }
    std::vector<CellSolution> best_sols;
    double best_m = b, best_psi = fb;
    if (std::abs(fb) > tol) {
        boost::uintmax_t max_iter = 100;
        auto f = [&](double m) {
            const double v = psi(m, scratch);
            if (std::abs(v) < std::abs(best_psi)) {
                best_psi = v;
                best_m = m;
            }
            return v;
        };
        if (std::abs(fa) < std::abs(best_psi)) {
            best_psi = fa;
            best_m = a;
        }
        const double lo = std::min(a, b), hi = std::max(a, b);
        const double flo = (lo == a) ? fa : fb, fhi = (lo == a) ? fb : fa;
        auto stop = [&](double x, double y) {
            return std::abs(best_psi) <= tol || std::abs(y - x) <= 1e-15 * std::max(1.0, std::abs(x));
        };
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, max_iter);
    }
    best_psi = psi(best_m, best_sols);
    if (std::abs(best_psi) > tol) {
        std::ostringstream os;
        os << "solve_volume_coupling: |psi| = " << std::abs(best_psi) << " above tolerance " << tol;
        throw SolverError(os.str());
    }
    result.U_Omega = best_m;
    result.psi = best_psi;
    result.solutions = std::move(best_sols);
    return result;
}

}  // namespace icesim
