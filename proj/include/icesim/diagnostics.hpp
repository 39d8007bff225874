#pragma once

#include <string>
#include <vector>

#include "icesim/stepper.hpp"

namespace icesim {

/// Cell integral of c(chi)E + lambda(chi) S^2/2 - g x3 U + U + 2 chi + c_R tau theta theta+,
/// with E = e1^R(theta) - f1(theta_c) and S = U + chi - 1.
double energy_bulk(const Stepper& stepper, std::span<const double> theta, std::span<const double> U,
                   std::span<const double> chi);

/// (K/2) y^2 + g zeta y with y = U_Omega + p; equals the boundary energy up to a constant.
double boundary_energy(const ModelConstants& k, double U_Omega, double p);

struct EnergyRow {
    int k = 0;
    double t = 0.0;
    double bulk = 0.0;
    double boundary = 0.0;
    double flux_sum = 0.0;   ///< tau * sum_{j<=k} boundary integral of h (theta_j - theta_Gamma)
    double load_term = 0.0;  ///< P0 variation bound
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

/// Discrete energy inequality, one row per step, built incrementally.
class EnergyLedger {
public:
    explicit EnergyLedger(double tol_rel = 1e-9) : tol_(tol_rel) {}

    void append(const Stepper& stepper, const SimState& state);
    /// Appends from stored scalars (used when replaying a run from disk).
    void append(int k, double t, double bulk, double U_Omega, double p, double flux, const ModelConstants& constants,
                double tau);

    [[nodiscard]] const std::vector<EnergyRow>& rows() const { return rows_; }
    [[nodiscard]] bool passed() const;
    /// min over rows of (RHS + tol |RHS| - LHS); negative means a violation.
    [[nodiscard]] double worst_margin() const;
    [[nodiscard]] int first_failure() const;
    [[nodiscard]] double tolerance() const { return tol_; }

private:
    double tol_;
    std::vector<EnergyRow> rows_;
    double initial_ = 0.0;
    double flux_sum_ = 0.0;
    double dp_sum_ = 0.0;
    double load_max_ = 0.0;
    double p_last_ = 0.0;
};

EnergyLedger energy_ledger_check(const Trajectory& trajectory, const Stepper& stepper, double tol_rel = 1e-9);

/// Cell integral of c(chi) s1^R(theta) + 2 chi + U.
double entropy_total(const Stepper& stepper, std::span<const double> theta, std::span<const double> U,
                     std::span<const double> chi);

struct EntropyRow {
    int k = 0;
    double t = 0.0;
    double entropy = 0.0;
    double production = 0.0;     ///< integrated dissipation rate
    double boundary_flux = 0.0;  ///< boundary integral of h (theta_Gamma - theta)/theta
    double residual = 0.0;       ///< dS/dt - production - boundary_flux
    double min_integrand = 0.0;  ///< smallest face or cell dissipation sample
};

/// Per-step discrete counterpart of the entropy balance.
class EntropyLedger {
public:
    void append(const Stepper& stepper, const SimState& prev, const SimState& next);
    void start(const Stepper& stepper, const SimState& initial);

    [[nodiscard]] const std::vector<EntropyRow>& rows() const { return rows_; }
    /// tau * sum |residual|.
    [[nodiscard]] double residual_l1() const;
    [[nodiscard]] double min_integrand() const;

private:
    std::vector<EntropyRow> rows_;
    double tau_ = 0.0;
};

EntropyLedger entropy_ledger(const Trajectory& trajectory, const Stepper& stepper);

/// Dissipation samples of one step: face terms kappa(chi_prev) g (d theta)^2/(theta_a theta_b) per face,
/// then cell terms gamma(theta_prev) chi_dot^2/theta + U_dot^2/theta per cell (both per unit measure).
std::vector<double> dissipation_samples(const Stepper& stepper, const SimState& prev, const SimState& next);

/// v_0 = theta_lower, c_low (e1^R(v_k) - e1^R(v_{k-1})) = -tau c_R v_k^2.
std::vector<double> lower_bound_sequence(double theta_lower, double c_R, double c_low, const TruncationFamily& family,
                                         double tau, int n);

struct BoundsReport {
    bool lower_bound_ok = true;
    bool phase_ok = true;
    bool below_cutoff = true;
    double min_lower_margin = 0.0;  ///< min_k (min theta_k - v_k)
    int worst_step = 0;
    double min_chi = 1.0;
    double max_chi = 0.0;
    double max_theta = 0.0;
    double cutoff = 0.0;
    double max_abs_U = 0.0;
    double max_abs_U_dot = 0.0;
    double max_abs_chi_dot = 0.0;
    [[nodiscard]] bool passed() const { return lower_bound_ok && phase_ok && below_cutoff; }
};

BoundsReport bounds_monitor(const Trajectory& trajectory, const Stepper& stepper, std::span<const double> v);

struct ComplementarityReport {
    double max_phase_residual = 0.0;   ///< |chi - P(chi - tau F / gamma)|
    double max_volume_residual = 0.0;  ///< |U - U_prev - tau (Q - A)|
    int worst_step = 0;
};

/// Re-evaluates the phase inclusion and volume equation of every cell from the stored states.
ComplementarityReport complementarity_check(const Trajectory& trajectory, const Stepper& stepper);

struct ExtendedEnergyRow {
    int k = 0;
    double t = 0.0;
    double energy = 0.0;
    double entropy = 0.0;
    double dissipation = 0.0;  ///< cumulative, with the truncated temperature
    double boundary = 0.0;     ///< cumulative boundary term
    double balance_gap = 0.0;  ///< LHS - RHS of the extended balance
    double combination = 0.0;  ///< int (e1^R + U^2) + dissipation + squared boundary term
};

/// Time average of the boundary mean of theta_Gamma over [0, T], clipped to [theta_lower, theta_upper].
double default_theta_gamma_bar(const Stepper& stepper, double T);

std::vector<ExtendedEnergyRow> extended_energy_monitor(const Trajectory& trajectory, const Stepper& stepper,
                                                       double theta_gamma_bar);

/// (theta - a)(theta - b)/theta - [(theta - sqrt(ab))^2/theta - (sqrt(b) - sqrt(a))^2].
double quadratic_identity_gap(double theta, double a, double b);

}  // namespace icesim
