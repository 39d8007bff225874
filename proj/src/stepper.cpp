#include "icesim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "icesim/errors.hpp"

namespace icesim {

double minimal_cR(const TruncationFamily& family, int points) {
    if (points < 2) throw InputError("compute_cR needs at least two grid points");
    const auto& b = family.model().bounds();
    const double lo = std::log(1e-6);
    const double hi = std::log(1e3 * family.cutoff());
    double sup = 0.0;
    for (int i = 0; i < points; ++i) {
        const double theta = std::exp(lo + (hi - lo) * i / (points - 1));
        const double q = family.qr(theta);
        const double latent = b.cprime_high * (family.e1r(theta) - family.f1r(theta)) + 2.0 * q;
        const double bound = 0.25 * q * q + latent * latent / (4.0 * b.gamma_low);
        sup = std::max(sup, bound / (theta * theta));
    }
    return sup;
}

double compute_cR(const TruncationFamily& family, int points) { return 2.0 * minimal_cR(family, points); }

ThetaSystem::ThetaSystem(Inputs in) : in_(std::move(in)) {
    const Grid& g = *in_.grid;
    const auto& fam = *in_.family;
    const auto& model = fam.model();
    g.require_matches(in_.theta_prev, "theta system theta_prev");
    g.require_matches(in_.chi_now, "theta system chi_k");
    g.require_matches(in_.chi_prev, "theta system chi_{k-1}");
    g.require_matches(in_.source, "theta system source");
    const std::size_t n = in_.theta_prev.size();
    heat_capacity_.resize(n);
    e1_prev_.resize(n);
    stab_prev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        heat_capacity_[i] = model.c(in_.chi_now[i]);
        e1_prev_[i] = fam.e1r(in_.theta_prev[i]);
        stab_prev_[i] = in_.theta_prev[i] * std::max(in_.theta_prev[i], 0.0);
    }
    Field kappa(n);
    for (std::size_t i = 0; i < n; ++i) kappa[i] = model.kappa(in_.chi_prev[i]);
    for (const auto& f : g.faces()) face_coeff_.push_back(0.5 * (kappa[f.a] + kappa[f.b]) * f.geometric);
    boundary_diag_.assign(n, 0.0);
    boundary_rhs_.assign(n, 0.0);
    const auto faces = g.boundary();
    if (in_.heat_transfer.size() != faces.size() || in_.theta_gamma.size() != faces.size()) {
        throw InputError("theta system: boundary data missing for some boundary faces");
    }
    for (std::size_t b = 0; b < faces.size(); ++b) {
        const double hs = in_.heat_transfer[b] * faces[b].measure;
        boundary_diag_[faces[b].cell] += hs;
        boundary_rhs_[faces[b].cell] += hs * in_.theta_gamma[b];
    }
}

Field ThetaSystem::residual(std::span<const double> theta) const {
    const Grid& g = *in_.grid;
    const auto& fam = *in_.family;
    const auto vol = g.volumes();
    const std::size_t n = theta.size();
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = theta[i];
        r[i] = vol[i] * (heat_capacity_[i] * (fam.e1r(th) - e1_prev_[i]) / in_.tau +
                         in_.c_R * (th * std::max(th, 0.0) - stab_prev_[i]) - in_.source[i]) +
               boundary_diag_[i] * th - boundary_rhs_[i];
    }
    const auto faces = g.faces();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const double flux = face_coeff_[f] * (theta[faces[f].a] - theta[faces[f].b]);
        r[faces[f].a] += flux;
        r[faces[f].b] -= flux;
    }
    return r;
}

Eigen::SparseMatrix<double> ThetaSystem::jacobian(std::span<const double> theta) const {
    const Grid& g = *in_.grid;
    const auto& fam = *in_.family;
    const auto vol = g.volumes();
    const auto n = static_cast<Eigen::Index>(theta.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(theta.size() + 4 * g.faces().size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double th = theta[i];
        trip.emplace_back(i, i,
                          vol[i] * (heat_capacity_[i] * fam.c1r(th) / in_.tau + 2.0 * in_.c_R * std::max(th, 0.0)) +
                              boundary_diag_[i]);
    }
    const auto faces = g.faces();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const double k = face_coeff_[f];
        trip.emplace_back(faces[f].a, faces[f].a, k);
        trip.emplace_back(faces[f].b, faces[f].b, k);
        trip.emplace_back(faces[f].a, faces[f].b, -k);
        trip.emplace_back(faces[f].b, faces[f].a, -k);
    }
    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

double ThetaSystem::residual_norm(std::span<const double> residual) const {
    const auto vol = in_.grid->volumes();
    double norm = 0.0;
    for (std::size_t i = 0; i < residual.size(); ++i) norm = std::max(norm, std::abs(residual[i]) / vol[i]);
    return norm;
}

double ThetaSystem::rhs_norm() const {
    const auto vol = in_.grid->volumes();
    double norm = 0.0;
    for (std::size_t i = 0; i < in_.source.size(); ++i) {
        const double known = heat_capacity_[i] * e1_prev_[i] / in_.tau + in_.c_R * stab_prev_[i] + in_.source[i] +
                             boundary_rhs_[i] / vol[i];
        norm = std::max(norm, std::abs(known));
    }
    return norm;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Potential change Pi(theta + alpha d) - Pi(theta) = int_0^alpha r(theta + s d) . d ds,
/// two-panel 3-point Gauss-Legendre.
double potential_change(const ThetaSystem& sys, std::span<const double> theta, std::span<const double> d,
                        double alpha) {
    static constexpr double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    Field probe(theta.size());
    double total = 0.0;
    for (int panel = 0; panel < 2; ++panel) {
        const double lo = 0.5 * alpha * panel;
        const double half = 0.25 * alpha;
        for (int q = 0; q < 3; ++q) {
            const double s = lo + half * (1.0 + nodes[q]);
            for (std::size_t i = 0; i < theta.size(); ++i) probe[i] = theta[i] + s * d[i];
            total += half * weights[q] * dot(sys.residual(probe), d);
        }
    }
    return total;
}

}  // namespace

ThetaSolve solve_theta_step(const ThetaSystem& system, const StepperConfig& config) {
    ThetaSolve out;
    out.theta = system.inputs().theta_prev;
    const double target = config.newton_tol * (1.0 + system.rhs_norm());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    bool analysed = false;
    const auto n = static_cast<Eigen::Index>(out.theta.size());
    Field r = system.residual(out.theta);
    double norm = system.residual_norm(r);
    for (int it = 0; it < config.max_newton; ++it) {
        if (norm <= target) {
            out.residual = norm;
            return out;
        }
        const auto J = system.jacobian(out.theta);
        if (!analysed) {
            llt.analyzePattern(J);
            analysed = true;
        }
        llt.factorize(J);
        if (llt.info() != Eigen::Success) throw SolverError("theta Jacobian is not positive definite");
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
        const Eigen::VectorXd step = -llt.solve(rhs);
        Field d(step.data(), step.data() + n);
        const double slope = dot(r, d);

        double alpha = 1.0;
        Field trial(out.theta.size());
        bool accepted = false;
        for (int bt = 0; bt <= config.max_backtracks; ++bt) {
            if (potential_change(system, out.theta, d, alpha) <= config.armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // Round-off dominates the potential near the solution; take the full step if it helps.
            alpha = 1.0;
        }
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.theta[i] + alpha * d[i];
        Field r_trial = system.residual(trial);
        const double trial_norm = system.residual_norm(r_trial);
        if (!accepted && !(trial_norm < norm)) {
            std::ostringstream os;
            os << "theta Newton stalled at iteration " << it << " with residual " << norm;
            throw SolverError(os.str());
        }
        out.theta = std::move(trial);
        r = std::move(r_trial);
        norm = trial_norm;
        out.iterations = it + 1;
    }
    if (norm <= target) {
        out.residual = norm;
        return out;
    }
    std::ostringstream os;
    os << "theta Newton did not converge in " << config.max_newton << " iterations (residual " << norm << ")";
    throw SolverError(os.str());
}

Stepper::Stepper(Grid grid, const MaterialModel& model, BoundaryData boundary, StepperConfig config)
    : grid_(std::move(grid)), family_(model, config.R), boundary_(std::move(boundary)), config_(config) {
    if (!(config_.tau > 0.0)) throw InputError("tau must be positive");
    boundary_.require_matches(grid_);
    c_R_min_ = minimal_cR(family_, config_.cR_points);
    c_R_ = config_.c_R_override ? *config_.c_R_override : 2.0 * c_R_min_;
    if (!(c_R_ >= 0.0)) throw InputError("c_R must be non-negative");
}

SimState Stepper::initial_state(Field theta0, Field U0, Field chi0) const {
    grid_.require_matches(theta0, "initial theta");
    grid_.require_matches(U0, "initial U");
    grid_.require_matches(chi0, "initial chi");
    for (double c : chi0) {
        if (c < 0.0 || c > 1.0) throw InputError("initial chi outside [0, 1]");
    }
    SimState s;
    s.k = 0;
    s.t = 0.0;
    s.theta = std::move(theta0);
    s.U = std::move(U0);
    s.chi = std::move(chi0);
    s.U_Omega = integrate_field(grid_, s.U);
    s.p = boundary_.p0.value(0.0);
    s.boundary_flux =
        boundary_exchange(grid_, s.theta, boundary_.heat_transfer, boundary_.theta_gamma_at(0.0)).total;
    return s;
}

Stepper::StepTerms Stepper::step_terms(const SimState& prev, const SimState& next) const {
    const auto& model = family_.model();
    const std::size_t n = prev.theta.size();
    StepTerms terms{Field(n), Field(n), Field(n), Field(n), Field(n)};
    const auto x3 = grid_.x3();
    for (std::size_t i = 0; i < n; ++i) {
        terms.U_dot[i] = (next.U[i] - prev.U[i]) / config_.tau;
        terms.chi_dot[i] = (next.chi[i] - prev.chi[i]) / config_.tau;
        const auto ct = coupling_terms(next.U[i], next.chi[i], prev.chi[i], prev.theta[i], x3[i], next.U_Omega,
                                       next.p, family_);
        terms.A[i] = ct.A;
        terms.C[i] = ct.C;
        terms.source[i] =
            -(model.c_prime(next.chi[i]) * terms.chi_dot[i] * (family_.e1r(prev.theta[i]) - family_.f1_critical()) +
              terms.U_dot[i] * ct.A + terms.chi_dot[i] * ct.C);
    }
    return terms;
}

SimState Stepper::step(const SimState& prev) const {
    const std::size_t n = prev.theta.size();
    SimState next;
    next.k = prev.k + 1;
    next.t = next.k * config_.tau;
    next.p = boundary_.p0.value(next.t);

    double strain = 0.0;
    for (double u : prev.U) strain = std::max(strain, std::abs(u));
    const double tau_max = max_stable_tau(family_, strain + 2.0);
    if (config_.tau > tau_max) {
        std::ostringstream os;
        os << "tau = " << config_.tau << " exceeds the monotonicity guard " << tau_max << " at step " << next.k;
        throw TauTooLargeError(os.str());
    }

    std::vector<CellData> cells(n);
    const auto x3 = grid_.x3();
    for (std::size_t i = 0; i < n; ++i) {
        cells[i] = {prev.theta[i], prev.U[i], prev.chi[i], x3[i], config_.tau, 0.0, next.p};
    }
    std::vector<CellSolution> sols;
    if (config_.implicit_volume) {
        auto vc = solve_volume_coupling(cells, grid_, family_);
        next.U_Omega = vc.U_Omega;
        next.volume_evaluations = vc.evaluations;
        sols = std::move(vc.solutions);
    } else {
        next.U_Omega = prev.U_Omega;
        next.volume_evaluations = 1;
        sols = solve_cells_at(cells, prev.U_Omega, family_);
    }
    next.U.resize(n);
    next.chi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        next.U[i] = sols[i].U;
        next.chi[i] = sols[i].chi;
        next.cell_residual = std::max(next.cell_residual, sols[i].residual);
        if (sols[i].active == ActiveSet::Lower) ++next.lower_active;
        if (sols[i].active == ActiveSet::Upper) ++next.upper_active;
    }

    next.theta = prev.theta;  // placeholder for step_terms, which reads prev.theta only
    const auto terms = step_terms(prev, next);
    const Field theta_gamma = boundary_.theta_gamma_at(next.t);
    ThetaSystem::Inputs in;
    in.grid = &grid_;
    in.family = &family_;
    in.c_R = c_R_;
    in.tau = config_.tau;
    in.theta_prev = prev.theta;
    in.chi_now = next.chi;
    in.chi_prev = prev.chi;
    in.source = terms.source;
    in.heat_transfer = boundary_.heat_transfer;
    in.theta_gamma = theta_gamma;
    const ThetaSystem system(std::move(in));
    auto solved = solve_theta_step(system, config_);
    next.theta = std::move(solved.theta);
    next.newton_iterations = solved.iterations;
    next.boundary_flux = boundary_exchange(grid_, next.theta, boundary_.heat_transfer, theta_gamma).total;
    for (double th : next.theta) {
        if (!std::isfinite(th)) throw SolverError("non-finite temperature after step " + std::to_string(next.k));
    }
    return next;
}

Trajectory run_steps(const Stepper& stepper, SimState initial, int steps,
                     const std::function<bool(const SimState&)>& observer) {
    Trajectory traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);
    traj.push_back(std::move(initial));
    for (int s = 0; s < steps; ++s) {
        traj.push_back(stepper.step(traj.back()));
        if (observer && !observer(traj.back())) break;
    }
    return traj;
}

}  // namespace icesim
