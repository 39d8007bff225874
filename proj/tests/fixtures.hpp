#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "icesim/config.hpp"
#include "icesim/stepper.hpp"

#ifndef ICESIM_CONFIG_DIR
#define ICESIM_CONFIG_DIR "configs"
#endif

namespace fixture {

inline icesim::SimConfig load(const std::string& name) {
    return icesim::parse_config(std::filesystem::path(ICESIM_CONFIG_DIR) / name);
}

/// Random theta-system instance on a slab: temperatures in [0.4, 1.8], mixed phases, Robin data.
inline icesim::ThetaSystem random_theta_system(std::mt19937_64& rng, const icesim::Grid& grid,
                                               const icesim::TruncationFamily& family, double c_R, double tau) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    icesim::ThetaSystem::Inputs in;
    in.grid = &grid;
    in.family = &family;
    in.c_R = c_R;
    in.tau = tau;
    const auto n = static_cast<std::size_t>(grid.cell_count());
    for (std::size_t i = 0; i < n; ++i) {
        in.theta_prev.push_back(0.4 + 1.4 * u(rng));
        in.chi_now.push_back(u(rng));
        in.chi_prev.push_back(u(rng));
        in.source.push_back(-2.0 + 4.0 * u(rng));
    }
    for (std::size_t b = 0; b < grid.boundary().size(); ++b) {
        in.heat_transfer.push_back(2.0 * u(rng));
        in.theta_gamma.push_back(0.5 + 0.5 * u(rng));
    }
    return icesim::ThetaSystem(std::move(in));
}

/// Worst relative mismatch between J v and the central difference of the residual along v.
inline double jacobian_fd_error(const icesim::ThetaSystem& sys, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto n = sys.inputs().theta_prev.size();
    icesim::Field theta(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        theta[i] = sys.inputs().theta_prev[i] * (1.0 + 0.2 * u(rng));
        v[i] = u(rng);
    }
    const auto J = sys.jacobian(theta);
    Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd Jv = J * ev;
    const double h = 1e-6;
    icesim::Field plus(theta), minus(theta);
    for (std::size_t i = 0; i < n; ++i) {
        plus[i] += h * v[i];
        minus[i] -= h * v[i];
    }
    const auto rp = sys.residual(plus);
    const auto rm = sys.residual(minus);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fd = (rp[i] - rm[i]) / (2.0 * h);
        num = std::max(num, std::abs(fd - Jv[static_cast<Eigen::Index>(i)]));
        den = std::max(den, std::abs(Jv[static_cast<Eigen::Index>(i)]));
    }
    return num / std::max(den, 1e-300);
}

}  // namespace fixture
