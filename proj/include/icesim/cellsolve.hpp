#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "icesim/grid.hpp"
#include "icesim/materials.hpp"

namespace icesim {

/// Inputs of the per-cell phase/volume system at step k.
struct CellData {
    double theta_prev = 1.0;
    double U_prev = 0.0;
    double chi_prev = 1.0;
    double x3 = 0.0;
    double tau = 1e-3;
    double U_Omega = 0.0;  ///< total volume increment used in the pressure term
    double p_k = 0.0;      ///< P0(k tau)
};

enum class ActiveSet { Interior, Lower, Upper };

const char* active_set_name(ActiveSet a);

struct CellSolution {
    double U = 0.0;
    double chi = 1.0;
    ActiveSet active = ActiveSet::Interior;
    double residual = 0.0;  ///< max of volume-equation and complementarity residuals
    bool used_fallback = false;
};

struct CouplingTerms {
    double A;
    double B;
    double C;
};

/// A_k, B_k, C_k with the normalized constants built in.
CouplingTerms coupling_terms(double U, double chi, double chi_prev, double theta_prev, double x3, double U_Omega,
                             double p_k, const TruncationFamily& family);

/// Residual pair (Phi_1, Phi_2) of the cell system without the obstacle term:
/// Phi_1 = (U - U_prev)/tau - Q_R(theta_prev) + A_k,
/// Phi_2 = gamma(theta_prev)(chi - chi_prev)/tau + B_k + C_k.
std::pair<double, double> cell_map(const CellData& cell, const TruncationFamily& family, double U, double chi);

/// Natural residual |chi - clamp(chi - F, 0, 1)| of the inclusion F(chi) + dI(chi) ∋ 0.
double complementarity_residual(double chi, double F);

struct ScalarInclusionResult {
    double chi;
    ActiveSet active;
    double residual;
};

/// F(chi) and dF/dchi.
using ScalarResidual = std::function<std::pair<double, double>(double)>;

/// Solves F(chi) + dI_[0,1](chi) ∋ 0 for increasing F: endpoint when its sign allows,
/// otherwise safeguarded Newton/bisection to |F| <= 1e-12.
/// Throws TauTooLargeError if F(0) > 0 > F(1).
ScalarInclusionResult solve_scalar_inclusion(const ScalarResidual& F);

/// Solves the coupled (U_k, chi_k) system of one cell for the given U_Omega.
CellSolution solve_cell(const CellData& cell, const TruncationFamily& family);

/// Largest time step for which the per-cell map stays strongly monotone when
/// |U - 1 + chi| <= strain_bound (Gershgorin bound, safety factor 2).
double max_stable_tau(const TruncationFamily& family, double strain_bound);

struct VolumeCoupling {
    double U_Omega = 0.0;
    double psi = 0.0;  ///< int U_k[U_Omega] dx - U_Omega at the returned value
    int evaluations = 0;
    std::vector<CellSolution> solutions;
};

/// Solves all cells with the total volume increment treated implicitly: finds m
/// with int U_k[m] dx = m. The U_Omega field of `cells` is ignored.
VolumeCoupling solve_volume_coupling(std::span<const CellData> cells, const Grid& grid,
                                     const TruncationFamily& family);

/// Solves all cells at a fixed U_Omega (explicit coupling or a single psi evaluation).
std::vector<CellSolution> solve_cells_at(std::span<const CellData> cells, double U_Omega,
                                         const TruncationFamily& family);

}  // namespace icesim
