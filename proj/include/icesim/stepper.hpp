#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "icesim/boundary.hpp"
#include "icesim/cellsolve.hpp"
#include "icesim/grid.hpp"
#include "icesim/materials.hpp"

namespace icesim {

struct StepperConfig {
    double tau = 1e-3;
    double R = 4.0;
    std::optional<double> c_R_override;
    double newton_tol = 1e-11;
    int max_newton = 50;
    double armijo = 1e-4;
    int max_backtracks = 30;
    bool implicit_volume = true;
    int cR_points = 4000;
};

/// Discrete state (theta_k, U_k, chi_k) plus the scalars needed by the ledgers.
struct SimState {
    int k = 0;
    double t = 0.0;
    Field theta;
    Field U;
    Field chi;
    double U_Omega = 0.0;        ///< value used in the pressure coupling at this step
    double p = 0.0;              ///< P0(k tau)
    double boundary_flux = 0.0;  ///< boundary integral of h (theta_k - theta_Gamma(k tau))
    double cell_residual = 0.0;  ///< worst per-cell residual of the phase/volume solve
    int newton_iterations = 0;
    int volume_evaluations = 0;
    int lower_active = 0;
    int upper_active = 0;
};

/// sup over theta > 0 of [Q^2/4 + (c_hi (e1^R - f1^R) + 2Q)^2 / (4 gamma_*)] / theta^2 on a log grid;
/// the value the stabilization constant must dominate.
double minimal_cR(const TruncationFamily& family, int points = 4000);
/// Twice minimal_cR.
double compute_cR(const TruncationFamily& family, int points = 4000);

/// Nonlinear finite-volume system for theta_k with every (U, chi) quantity frozen.
/// Residual per cell i (mass-lumped):
///   V_i [c(chi_k)(e1^R(theta) - e1^R(theta_prev))/tau + c_R(theta theta+ - theta_prev theta_prev+) - S_i]
///   + (K theta)_i + sum_b h sigma (theta_i - theta_Gamma)
class ThetaSystem {
public:
    struct Inputs {
        const Grid* grid = nullptr;
        const TruncationFamily* family = nullptr;
        double c_R = 0.0;
        double tau = 1e-3;
        Field theta_prev;
        Field chi_now;      ///< chi_k, enters c
        Field chi_prev;     ///< chi_{k-1}, enters kappa
        Field source;       ///< S_i per unit volume
        std::vector<double> heat_transfer;
        Field theta_gamma;  ///< per boundary face at k tau
    };

    explicit ThetaSystem(Inputs in);

    [[nodiscard]] Field residual(std::span<const double> theta) const;
    [[nodiscard]] Eigen::SparseMatrix<double> jacobian(std::span<const double> theta) const;
    /// Scaled residual norm max_i |r_i| / V_i.
    [[nodiscard]] double residual_norm(std::span<const double> residual) const;
    /// Sup norm, per unit volume, of every known term (previous step, source, boundary data).
    [[nodiscard]] double rhs_norm() const;
    [[nodiscard]] const Inputs& inputs() const { return in_; }

private:
    Inputs in_;
    Field heat_capacity_;  ///< c(chi_k)
    Field e1_prev_;
    Field stab_prev_;      ///< theta_prev theta_prev+
    Field face_coeff_;     ///< kappa_f g_f
    Field boundary_diag_;  ///< sum of h sigma per cell
    Field boundary_rhs_;   ///< sum of h sigma theta_Gamma per cell
};

struct ThetaSolve {
    Field theta;
    int iterations = 0;
    double residual = 0.0;
};

/// Damped Newton from theta_prev with Armijo backtracking on the convex potential
/// whose gradient is the residual. Throws SolverError on divergence or loss of SPD.
ThetaSolve solve_theta_step(const ThetaSystem& system, const StepperConfig& config);

/// One semi-implicit step of the truncated scheme.
class Stepper {
public:
    Stepper(Grid grid, const MaterialModel& model, BoundaryData boundary, StepperConfig config);

    [[nodiscard]] SimState initial_state(Field theta0, Field U0, Field chi0) const;
    [[nodiscard]] SimState step(const SimState& prev) const;

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] const TruncationFamily& family() const { return family_; }
    [[nodiscard]] const BoundaryData& boundary() const { return boundary_; }
    [[nodiscard]] const StepperConfig& config() const { return config_; }
    [[nodiscard]] double c_R() const { return c_R_; }
    [[nodiscard]] double c_R_min() const { return c_R_min_; }
    /// True when an override pushed c_R below the value the lower bound needs.
    [[nodiscard]] bool c_R_below_min() const { return c_R_ < c_R_min_; }

    /// Sources and coupling quantities of the step prev -> next, as used by the theta solve.
    struct StepTerms {
        Field U_dot, chi_dot, A, C, source;
    };
    [[nodiscard]] StepTerms step_terms(const SimState& prev, const SimState& next) const;

private:
    Grid grid_;
    TruncationFamily family_;
    BoundaryData boundary_;
    StepperConfig config_;
    double c_R_min_ = 0.0;
    double c_R_ = 0.0;
};

using Trajectory = std::vector<SimState>;

/// Runs n steps; `observer` sees every new state and may stop the run by returning false.
Trajectory run_steps(const Stepper& stepper, SimState initial, int steps,
                     const std::function<bool(const SimState&)>& observer = {});

}  // namespace icesim
