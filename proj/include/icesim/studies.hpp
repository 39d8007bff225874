#pragma once

#include <string>
#include <vector>

#include "icesim/config.hpp"
#include "icesim/simulation.hpp"

namespace icesim {

/// sqrt(tau_c sum_k int (|a_k - b_{rk}|^2) dx) over theta, U and chi, comparing the coarse run `a`
/// with the fine run `b` at the coarse time levels (r = number of fine steps per coarse step).
double l2_time_difference(const Grid& grid, const Trajectory& coarse, const Trajectory& fine, double tau_coarse);

struct TauLevel {
    double tau = 0.0;
    double seconds = 0.0;
    double entropy_residual = 0.0;  ///< tau sum |entropy balance residual|
    bool energy_passed = true;
};

struct TauStudy {
    std::vector<TauLevel> levels;
    std::vector<double> differences;  ///< d_j between level j and j+1
    std::vector<double> ratios;       ///< d_{j+1}/d_j
    double ratio_limit = 0.67;
    bool completed = true;
    std::string error;

    [[nodiscard]] bool ratios_ok() const;
    [[nodiscard]] bool entropy_monotone() const;
};

/// Runs tau, tau/2, ..., tau/2^levels; requires levels >= 2.
TauStudy tau_convergence_study(const SimConfig& cfg, int levels);

/// Which data the perturbation experiment shifts.
struct PerturbMask {
    bool theta0 = true;
    bool chi0 = true;
    bool U0 = true;
    bool P0 = true;
    bool theta_gamma = true;
};

struct PerturbRow {
    double delta = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double Q = 0.0;  ///< numerator / denominator (0 when both vanish)
};

struct PerturbationStudy {
    std::vector<PerturbRow> rows;
    double ratio = 0.0;  ///< max Q / min Q over the nonzero deltas
    double ratio_limit = 10.0;
    bool completed = true;
    std::string error;

    [[nodiscard]] bool passed() const { return completed && ratio <= ratio_limit; }
};

/// Perturbs the data by delta (theta0 down, chi0 down, U0 up, P0 up, theta_Gamma up), runs both
/// trajectories and reports Q(delta). Refuses non-constant kappa (InputError).
PerturbationStudy perturbation_experiment(const SimConfig& cfg, const std::vector<double>& deltas,
                                          const PerturbMask& mask = {});

struct TruncationStudy {
    double R = 0.0;
    double R2 = 0.0;
    double cutoff = 0.0;     ///< B(R)
    double c_R = 0.0;        ///< pinned value used by both runs
    double sup_diff = 0.0;   ///< sup over steps and cells of |theta^R - theta^2R|
    double max_theta = 0.0;  ///< over the R run
    double tolerance = 1e-8;
    bool completed = true;
    std::string error;

    [[nodiscard]] bool passed() const { return completed && sup_diff <= tolerance && max_theta < cutoff; }
};

/// Runs the configuration at R and 2R with c_R pinned to the 2R value.
TruncationStudy truncation_study(const SimConfig& cfg);

}  // namespace icesim
