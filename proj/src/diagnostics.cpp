#include "icesim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "icesim/errors.hpp"
#include "icesim/quadrature.hpp"

namespace icesim {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double face_conductivity(const MaterialModel& m, std::span<const double> chi, const Face& f) {
    return 0.5 * (m.kappa(chi[static_cast<std::size_t>(f.a)]) + m.kappa(chi[static_cast<std::size_t>(f.b)]));
}

}  // namespace

double energy_bulk(const Stepper& stepper, std::span<const double> theta, std::span<const double> U,
                   std::span<const double> chi) {
    const auto& grid = stepper.grid();
    const auto& fam = stepper.family();
    const auto& m = fam.model();
    const double g = m.constants().g;
    const double ct = stepper.c_R() * stepper.config().tau;
    const auto x3 = grid.x3();
    const auto vol = grid.volumes();
    std::vector<double> cells(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double E = fam.e1r(theta[i]) - fam.f1_critical();
        const double S = U[i] + chi[i] - 1.0;
        const double th = theta[i];
        cells[i] = vol[i] * (m.c(chi[i]) * E + 0.5 * S * S * m.lambda(chi[i]) - g * x3[i] * U[i] + U[i] + 2.0 * chi[i] +
                             ct * th * std::max(th, 0.0));
    }
    return pairwise_sum(cells.data(), cells.size());
}

double boundary_energy(const ModelConstants& k, double U_Omega, double p) {
    const double y = U_Omega + p;
    return 0.5 * k.k_gamma * y * y + k.g * k.zeta_gamma * y;
}

void EnergyLedger::append(const Stepper& stepper, const SimState& s) {
    append(s.k, s.t, energy_bulk(stepper, s.theta, s.U, s.chi), s.U_Omega, s.p, s.boundary_flux,
           stepper.family().model().constants(), stepper.config().tau);
}

void EnergyLedger::append(int k, double t, double bulk, double U_Omega, double p, double flux,
                          const ModelConstants& constants, double tau) {
    EnergyRow row;
    row.k = k;
    row.t = t;
    row.bulk = bulk;
    row.boundary = boundary_energy(constants, U_Omega, p);
    const double load = std::abs(constants.k_gamma * (U_Omega + p) + constants.g * constants.zeta_gamma);
    if (rows_.empty()) {
        initial_ = row.bulk + row.boundary;
        load_max_ = load;
    } else {
        flux_sum_ += tau * flux;
        dp_sum_ += std::abs(p - p_last_);
        load_max_ = std::max(load_max_, load);
    }
    p_last_ = p;
    row.flux_sum = flux_sum_;
    row.load_term = dp_sum_ * load_max_;
    row.lhs = row.bulk + row.boundary + row.flux_sum;
    row.rhs = initial_ + row.load_term;
    row.pass = row.lhs <= row.rhs + tol_ * std::abs(row.rhs);
    rows_.push_back(row);
}

bool EnergyLedger::passed() const { return first_failure() < 0; }

double EnergyLedger::worst_margin() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& r : rows_) w = std::min(w, r.rhs + tol_ * std::abs(r.rhs) - r.lhs);
    return w;
}

int EnergyLedger::first_failure() const {
    for (const auto& r : rows_) {
        if (!r.pass) return r.k;
    }
    return -1;
}

EnergyLedger energy_ledger_check(const Trajectory& trajectory, const Stepper& stepper, double tol_rel) {
    EnergyLedger ledger(tol_rel);
    for (const auto& s : trajectory) ledger.append(stepper, s);
    return ledger;
}

double entropy_total(const Stepper& stepper, std::span<const double> theta, std::span<const double> U,
                     std::span<const double> chi) {
    const auto& fam = stepper.family();
    const auto& m = fam.model();
    const auto vol = stepper.grid().volumes();
    std::vector<double> cells(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        cells[i] = vol[i] * (m.c(chi[i]) * fam.s1r(theta[i]) + 2.0 * chi[i] + U[i]);
    }
    return pairwise_sum(cells.data(), cells.size());
}

std::vector<double> dissipation_samples(const Stepper& stepper, const SimState& prev, const SimState& next) {
    const auto& grid = stepper.grid();
    const auto& m = stepper.family().model();
    const double tau = stepper.config().tau;
    std::vector<double> out;
    out.reserve(grid.faces().size() + next.theta.size());
    for (const auto& f : grid.faces()) {
        const double ta = next.theta[static_cast<std::size_t>(f.a)];
        const double tb = next.theta[static_cast<std::size_t>(f.b)];
        out.push_back(face_conductivity(m, prev.chi, f) * (ta - tb) * (ta - tb) / (ta * tb));
    }
    for (std::size_t i = 0; i < next.theta.size(); ++i) {
        const double cd = (next.chi[i] - prev.chi[i]) / tau;
        const double ud = (next.U[i] - prev.U[i]) / tau;
        out.push_back((m.gamma(prev.theta[i]) * cd * cd + ud * ud) / next.theta[i]);
    }
    return out;
}

void EntropyLedger::start(const Stepper& stepper, const SimState& initial) {
    rows_.clear();
    tau_ = stepper.config().tau;
    EntropyRow row;
    row.k = initial.k;
    row.t = initial.t;
    row.entropy = entropy_total(stepper, initial.theta, initial.U, initial.chi);
    rows_.push_back(row);
}

void EntropyLedger::append(const Stepper& stepper, const SimState& prev, const SimState& next) {
    if (rows_.empty()) start(stepper, prev);
    const auto& grid = stepper.grid();
    const auto vol = grid.volumes();
    const auto samples = dissipation_samples(stepper, prev, next);
    const std::size_t nf = grid.faces().size();
    std::vector<double> weighted(samples.size());
    for (std::size_t j = 0; j < nf; ++j) weighted[j] = samples[j] * grid.faces()[j].geometric;
    for (std::size_t i = 0; i < next.theta.size(); ++i) weighted[nf + i] = samples[nf + i] * vol[i];

    const auto tg = stepper.boundary().theta_gamma_at(next.t);
    const auto& h = stepper.boundary().heat_transfer;
    double flux = 0.0;
    const auto bfaces = grid.boundary();
    for (std::size_t b = 0; b < bfaces.size(); ++b) {
        const double th = next.theta[static_cast<std::size_t>(bfaces[b].cell)];
        flux += h[b] * bfaces[b].measure * (tg[b] - th) / th;
    }

    EntropyRow row;
    row.k = next.k;
    row.t = next.t;
    row.entropy = entropy_total(stepper, next.theta, next.U, next.chi);
    row.production = pairwise_sum(weighted.data(), weighted.size());
    row.boundary_flux = flux;
    row.residual = (row.entropy - rows_.back().entropy) / tau_ - row.production - row.boundary_flux;
    row.min_integrand = samples.empty() ? 0.0 : *std::min_element(samples.begin(), samples.end());
    if (!std::isfinite(row.min_integrand)) row.min_integrand = -std::numeric_limits<double>::infinity();
    rows_.push_back(row);
}

double EntropyLedger::residual_l1() const {
    double s = 0.0;
    for (std::size_t k = 1; k < rows_.size(); ++k) s += tau_ * std::abs(rows_[k].residual);
    return s;
}

double EntropyLedger::min_integrand() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < rows_.size(); ++k) m = std::min(m, rows_[k].min_integrand);
    return m;
}

EntropyLedger entropy_ledger(const Trajectory& trajectory, const Stepper& stepper) {
    EntropyLedger ledger;
    if (trajectory.empty()) return ledger;
    ledger.start(stepper, trajectory.front());
    for (std::size_t k = 1; k < trajectory.size(); ++k) ledger.append(stepper, trajectory[k - 1], trajectory[k]);
    return ledger;
}

std::vector<double> lower_bound_sequence(double theta_lower, double c_R, double c_low, const TruncationFamily& family,
                                         double tau, int n) {
    if (!(theta_lower > 0.0)) throw InputError("lower bound sequence needs v0 > 0");
    if (!(c_low > 0.0)) throw InputError("lower bound sequence needs c_* > 0");
    std::vector<double> v{theta_lower};
    v.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 1; k <= n; ++k) {
        const double vp = v.back();
        if (c_R == 0.0) {
            v.push_back(vp);
            continue;
        }
        const double ep = family.e1r(vp);
        auto f = [&](double z) { return c_low * (family.e1r(z) - ep) + tau * c_R * z * z; };
        const double f0 = f(0.0);
        const double f1 = f(vp);
        if (!(f0 < 0.0 && f1 > 0.0)) {
            throw SolverError("lower bound recurrence could not bracket a root at step " + std::to_string(k));
        }
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(f, 0.0, vp, f0, f1,
                                                         boost::math::tools::eps_tolerance<double>(52), iters);
        v.push_back(0.5 * (r.first + r.second));
    }
    return v;
}

BoundsReport bounds_monitor(const Trajectory& trajectory, const Stepper& stepper, std::span<const double> v) {
    BoundsReport rep;
    rep.cutoff = stepper.family().cutoff();
    rep.min_lower_margin = std::numeric_limits<double>::infinity();
    const double tau = stepper.config().tau;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const auto& s = trajectory[k];
        const double tmin = *std::min_element(s.theta.begin(), s.theta.end());
        const double tmax = *std::max_element(s.theta.begin(), s.theta.end());
        if (static_cast<std::size_t>(s.k) < v.size()) {
            const double margin = tmin - v[static_cast<std::size_t>(s.k)];
            if (margin < rep.min_lower_margin) {
                rep.min_lower_margin = margin;
                rep.worst_step = s.k;
            }
        }
        rep.max_theta = std::max(rep.max_theta, tmax);
        for (std::size_t i = 0; i < s.chi.size(); ++i) {
            rep.min_chi = std::min(rep.min_chi, s.chi[i]);
            rep.max_chi = std::max(rep.max_chi, s.chi[i]);
            rep.max_abs_U = std::max(rep.max_abs_U, std::abs(s.U[i]));
            if (k > 0) {
                const auto& p = trajectory[k - 1];
                rep.max_abs_U_dot = std::max(rep.max_abs_U_dot, std::abs(s.U[i] - p.U[i]) / tau);
                rep.max_abs_chi_dot = std::max(rep.max_abs_chi_dot, std::abs(s.chi[i] - p.chi[i]) / tau);
            }
        }
    }
    rep.lower_bound_ok = rep.min_lower_margin >= 0.0;
    rep.phase_ok = rep.min_chi >= 0.0 && rep.max_chi <= 1.0;
    rep.below_cutoff = rep.max_theta < rep.cutoff;
    return rep;
}

ComplementarityReport complementarity_check(const Trajectory& trajectory, const Stepper& stepper) {
    ComplementarityReport rep;
    const auto& fam = stepper.family();
    const auto& m = fam.model();
    const auto& k = m.constants();
    const double tau = stepper.config().tau;
    const auto x3 = stepper.grid().x3();
    for (std::size_t step = 1; step < trajectory.size(); ++step) {
        const auto& p = trajectory[step - 1];
        const auto& s = trajectory[step];
        for (std::size_t i = 0; i < s.chi.size(); ++i) {
            const double chi = s.chi[i];
            const double U = s.U[i];
            const double S = U - 1.0 + chi;
            const double lp = m.lambda(p.chi[i]);
            const double q = fam.qr(p.theta[i]);
            const double A =
                lp * S + k.k_gamma * (s.U_Omega + s.p) + k.g * (k.zeta_gamma - x3[i]) + 1.0;
            const double B = m.c_prime(chi) * (fam.f1r(p.theta[i]) - fam.f1_critical()) - 2.0 * q;
            const double C = 0.5 * m.lambda_prime(chi) * S * S + lp * S + 2.0;
            const double gam = m.gamma(p.theta[i]);
            const double F = gam * (chi - p.chi[i]) / tau + B + C;
            const double r_phase = std::abs(chi - clamp01(chi - tau * F / gam));
            const double r_vol = std::abs(U - p.U[i] - tau * (q - A));
            if (std::max(r_phase, r_vol) > std::max(rep.max_phase_residual, rep.max_volume_residual)) {
                rep.worst_step = s.k;
            }
            rep.max_phase_residual = std::max(rep.max_phase_residual, r_phase);
            rep.max_volume_residual = std::max(rep.max_volume_residual, r_vol);
        }
    }
    return rep;
}

double default_theta_gamma_bar(const Stepper& stepper, double T) {
    const auto& grid = stepper.grid();
    const auto& bd = stepper.boundary();
    const auto& k = stepper.family().model().constants();
    const double total = grid.boundary_measure();
    auto mean_at = [&](double t) {
        const auto tg = bd.theta_gamma_at(t);
        double s = 0.0;
        const auto faces = grid.boundary();
        for (std::size_t b = 0; b < faces.size(); ++b) s += faces[b].measure * tg[b];
        return s / total;
    };
    double avg = mean_at(0.0);
    if (T > 0.0) avg = adaptive_simpson(mean_at, 0.0, T, 1e-10) / T;
    return std::clamp(avg, k.theta_lower, k.theta_upper);
}

std::vector<ExtendedEnergyRow> extended_energy_monitor(const Trajectory& trajectory, const Stepper& stepper,
                                                       double theta_gamma_bar) {
    std::vector<ExtendedEnergyRow> out;
    if (trajectory.empty()) return out;
    const auto& grid = stepper.grid();
    const auto& fam = stepper.family();
    const auto& m = fam.model();
    const auto& k = m.constants();
    const double tau = stepper.config().tau;
    const double ct = stepper.c_R() * tau;
    const auto vol = grid.volumes();
    const auto bfaces = grid.boundary();
    const auto& h = stepper.boundary().heat_transfer;

    auto energy_of = [&](const SimState& s) {
        double stab = 0.0;
        for (std::size_t i = 0; i < s.theta.size(); ++i) stab += vol[i] * s.theta[i] * std::max(s.theta[i], 0.0);
        return energy_bulk(stepper, s.theta, s.U, s.chi) - ct * stab + boundary_energy(k, s.U_Omega, s.p);
    };
    auto base_of = [&](const SimState& s) {
        double b = 0.0;
        for (std::size_t i = 0; i < s.theta.size(); ++i) b += vol[i] * (fam.e1r(s.theta[i]) + s.U[i] * s.U[i]);
        return b;
    };

    const SimState& first = trajectory.front();
    const double E0 = energy_of(first);
    const double S0 = entropy_total(stepper, first.theta, first.U, first.chi);
    double dissipation = 0.0;
    double boundary = 0.0;
    double squared_boundary = 0.0;
    double load = 0.0;
    ExtendedEnergyRow row0;
    row0.k = first.k;
    row0.t = first.t;
    row0.energy = E0;
    row0.entropy = S0;
    row0.combination = base_of(first);
    out.push_back(row0);

    for (std::size_t step = 1; step < trajectory.size(); ++step) {
        const auto& p = trajectory[step - 1];
        const auto& s = trajectory[step];
        double rate = 0.0;
        for (const auto& f : grid.faces()) {
            const double qa = fam.qr(s.theta[static_cast<std::size_t>(f.a)]);
            const double qb = fam.qr(s.theta[static_cast<std::size_t>(f.b)]);
            rate += face_conductivity(m, p.chi, f) * f.geometric * (qa - qb) * (qa - qb) / (qa * qb);
        }
        for (std::size_t i = 0; i < s.theta.size(); ++i) {
            const double q = fam.qr(s.theta[i]);
            const double cd = (s.chi[i] - p.chi[i]) / tau;
            const double ud = (s.U[i] - p.U[i]) / tau;
            rate += vol[i] * (m.gamma(p.theta[i]) * cd * cd + ud * ud) / q;
        }
        dissipation += tau * rate;
        const auto tg = stepper.boundary().theta_gamma_at(s.t);
        for (std::size_t b = 0; b < bfaces.size(); ++b) {
            const double th = s.theta[static_cast<std::size_t>(bfaces[b].cell)];
            const double q = fam.qr(th);
            const double w = h[b] * bfaces[b].measure / q;
            boundary += tau * w * (th - tg[b]) * (q - theta_gamma_bar);
            const double d = q - std::sqrt(theta_gamma_bar * tg[b]);
            squared_boundary += tau * w * d * d;
        }
        load += (s.p - p.p) * (k.k_gamma * (s.U_Omega + s.p) + k.g * k.zeta_gamma);

        ExtendedEnergyRow row;
        row.k = s.k;
        row.t = s.t;
        row.energy = energy_of(s);
        row.entropy = entropy_total(stepper, s.theta, s.U, s.chi);
        row.dissipation = theta_gamma_bar * dissipation;
        row.boundary = boundary;
        const double lhs = row.energy + row.dissipation + row.boundary;
        const double rhs = E0 - theta_gamma_bar * S0 + theta_gamma_bar * row.entropy + load;
        row.balance_gap = lhs - rhs;
        row.combination = base_of(s) + dissipation + squared_boundary;
        out.push_back(row);
    }
    return out;
}

double quadratic_identity_gap(double theta, double a, double b) {
    const double lhs = (theta - a) * (theta - b) / theta;
    const double r = theta - std::sqrt(a * b);
    const double d = std::sqrt(b) - std::sqrt(a);
    return lhs - (r * r / theta - d * d);
}

}  // namespace icesim
