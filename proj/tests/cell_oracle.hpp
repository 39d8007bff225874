#pragma once

// Brute-force reference for the per-cell (U, chi) system, written from the model
// functions directly rather than through the cell solver.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "icesim/cellsolve.hpp"
#include "icesim/materials.hpp"

namespace oracle {

struct CellPair {
    double phi1;
    double phi2;
};

inline CellPair cell_residual(const icesim::CellData& c, const icesim::TruncationFamily& fam, double U, double chi) {
    const auto& m = fam.model();
    const auto& k = m.constants();
    const double S = U - 1.0 + chi;
    const double lp = m.lambda(c.chi_prev);
    const double q = fam.qr(c.theta_prev);
    const double A = lp * S + k.k_gamma * (c.U_Omega + c.p_k) + k.g * (k.zeta_gamma - c.x3) + 1.0;
    const double B = m.c_prime(chi) * (fam.f1r(c.theta_prev) - fam.f1_critical()) - 2.0 * q;
    const double C = 0.5 * m.lambda_prime(chi) * S * S + lp * S + 2.0;
    return {(U - c.U_prev) / c.tau - q + A, m.gamma(c.theta_prev) * (chi - c.chi_prev) / c.tau + B + C};
}

/// Squared natural residual (tau Phi1)^2 + (chi - P[0,1](chi - tau Phi2/gamma))^2.
inline double merit(const icesim::CellData& c, const icesim::TruncationFamily& fam, double U, double chi) {
    const auto r = cell_residual(c, fam, U, chi);
    const double step = c.tau / fam.model().gamma(c.theta_prev);
    const double a = c.tau * r.phi1;
    const double b = chi - std::clamp(chi - step * r.phi2, 0.0, 1.0);
    return a * a + b * b;
}

struct GridMin {
    double U;
    double chi;
    double value;
};

/// Exact argmin of the merit over an n x n grid on [U_prev - 2, U_prev + 2] x [0, 1].
/// tau Phi1 is affine in U, so rows whose best possible (tau Phi1)^2 already exceeds
/// the incumbent are skipped and, inside a row, only the U window where (tau Phi1)^2
/// can beat the incumbent is scanned.
inline GridMin brute_force(const icesim::CellData& c, const icesim::TruncationFamily& fam, int n = 2000) {
    const double u0 = c.U_prev - 2.0;
    const double du = 4.0 / (n - 1);
    const double dchi = 1.0 / (n - 1);
    const double lp = fam.model().lambda(c.chi_prev);
    const double slope = 1.0 + c.tau * lp;  // d(tau Phi1)/dU
    GridMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (int j = 0; j < n; ++j) {
        const double chi = j * dchi;
        const double offset = c.tau * cell_residual(c, fam, 0.0, chi).phi1;  // tau Phi1 at U = 0
        const double root = -offset / slope;
        int lo = 0, hi = n - 1;
        if (std::isfinite(best.value)) {
            const double radius = std::sqrt(best.value) / slope;
            lo = static_cast<int>(std::clamp(std::floor((root - radius - u0) / du) - 1.0, 0.0, n - 1.0));
            hi = static_cast<int>(std::clamp(std::ceil((root + radius - u0) / du) + 1.0, 0.0, n - 1.0));
        }
        for (int i = lo; i <= hi; ++i) {
            const double U = u0 + i * du;
            const double v = merit(c, fam, U, chi);
            if (v < best.value) best = {U, chi, v};
        }
    }
    return best;
}

/// Random admissible cell instance with tau inside the monotonicity guard.
inline icesim::CellData random_cell(std::mt19937_64& rng, const icesim::TruncationFamily& fam) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    icesim::CellData c;
    c.theta_prev = 0.3 + 1.5 * u(rng);
    c.U_prev = -0.8 + 1.6 * u(rng);
    c.chi_prev = u(rng) < 0.2 ? (u(rng) < 0.5 ? 0.0 : 1.0) : u(rng);
    c.x3 = u(rng);
    c.U_Omega = -0.2 + 0.4 * u(rng);
    c.p_k = -0.1 + 0.2 * u(rng);
    const double guard = icesim::max_stable_tau(fam, std::abs(c.U_prev) + 3.0);
    c.tau = std::min(guard, std::pow(10.0, -3.0 + 2.0 * u(rng)));
    return c;
}

}  // namespace oracle
