#include "icesim/simulation.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icesim/errors.hpp"
#include "icesim/io.hpp"
#include "icesim/svg.hpp"

namespace icesim {

namespace fs = std::filesystem;
using nlohmann::json;

Stepper make_stepper(const SimConfig& cfg, std::optional<double> c_R_override) {
    Grid grid = build_grid(cfg);
    const MaterialModel model = build_material(cfg);
    BoundaryData boundary = build_boundary(cfg, grid);
    StepperConfig sc = build_stepper_config(cfg);
    if (c_R_override) sc.c_R_override = c_R_override;
    return Stepper(std::move(grid), model, std::move(boundary), sc);
}

SimState make_initial_state(const SimConfig& cfg, const Stepper& stepper) {
    const Grid& grid = stepper.grid();
    return stepper.initial_state(build_field(cfg.theta0, grid, cfg.base_dir, "/initial/theta"),
                                 build_field(cfg.U0, grid, cfg.base_dir, "/initial/U"),
                                 build_field(cfg.chi0, grid, cfg.base_dir, "/initial/chi"));
}

RunOutcome run_simulation(const SimConfig& cfg, const Stepper& stepper,
                          const std::function<void(const SimState&)>& observer) {
    RunOutcome out;
    const auto start = std::chrono::steady_clock::now();
    const int n = cfg.steps();
    out.trajectory.reserve(static_cast<std::size_t>(n) + 1);
    out.trajectory.push_back(make_initial_state(cfg, stepper));
    if (observer) observer(out.trajectory.back());
    try {
        for (int k = 0; k < n; ++k) {
            out.trajectory.push_back(stepper.step(out.trajectory.back()));
            if (observer) observer(out.trajectory.back());
        }
    } catch (const SolverError& e) {
        out.completed = false;
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

bool RunChecks::passed(double complementarity_tol) const {
    return energy.passed() && bounds.passed() &&
           std::max(complementarity.max_phase_residual, complementarity.max_volume_residual) <= complementarity_tol &&
           entropy.min_integrand() >= 0.0;
}

RunChecks check_run(const SimConfig& cfg, const Stepper& stepper, const Trajectory& trajectory) {
    RunChecks c;
    c.energy = energy_ledger_check(trajectory, stepper);
    c.entropy = entropy_ledger(trajectory, stepper);
    const int n = trajectory.empty() ? 0 : trajectory.back().k;
    c.lower_bound = lower_bound_sequence(cfg.constants.theta_lower, stepper.c_R(),
                                         stepper.family().model().bounds().c_low, stepper.family(),
                                         stepper.config().tau, n);
    c.bounds = bounds_monitor(trajectory, stepper, c.lower_bound);
    c.complementarity = complementarity_check(trajectory, stepper);
    c.theta_gamma_bar = default_theta_gamma_bar(stepper, cfg.T);
    for (const auto& row : extended_energy_monitor(trajectory, stepper, c.theta_gamma_bar)) {
        c.extended_sup = std::max(c.extended_sup, row.combination);
    }
    return c;
}

namespace {

json resolved_config(const SimConfig& cfg, const Grid& grid) {
    SimConfig copy = cfg;
    for (auto* f : {&copy.theta0, &copy.U0, &copy.chi0}) {
        if (f->kind == "file") {
            f->values = build_field(*f, grid, cfg.base_dir, "/initial");
            f->kind = "values";
            f->path.clear();
        }
    }
    return to_json(copy);
}

void write_ledgers(const fs::path& dir, const Trajectory& traj, const RunChecks& checks) {
    Table energy;
    energy.columns = {"k", "t", "bulk", "boundary", "flux", "flux_sum", "load_term", "lhs", "rhs", "U_Omega", "p",
                      "pass"};
    const auto& rows = checks.energy.rows();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        energy.rows.push_back({static_cast<double>(r.k), r.t, r.bulk, r.boundary, traj[i].boundary_flux, r.flux_sum,
                               r.load_term, r.lhs, r.rhs, traj[i].U_Omega, traj[i].p, r.pass ? 1.0 : 0.0});
    }
    write_table(dir / "energy_ledger.csv", energy);

    Table entropy;
    entropy.columns = {"k", "t", "entropy", "production", "boundary_flux", "residual", "min_integrand"};
    for (const auto& r : checks.entropy.rows()) {
        entropy.rows.push_back({static_cast<double>(r.k), r.t, r.entropy, r.production, r.boundary_flux, r.residual,
                                r.min_integrand});
    }
    write_table(dir / "entropy_ledger.csv", entropy);

    Table steps;
    steps.columns = {"k", "t", "min_theta", "max_theta", "v_k", "min_chi", "max_chi", "U_Omega", "cell_residual",
                     "newton_iterations", "volume_evaluations", "lower_active", "upper_active"};
    for (const auto& s : traj) {
        const auto [tmin, tmax] = std::minmax_element(s.theta.begin(), s.theta.end());
        const auto [cmin, cmax] = std::minmax_element(s.chi.begin(), s.chi.end());
        steps.rows.push_back({static_cast<double>(s.k), s.t, *tmin, *tmax,
                              checks.lower_bound[static_cast<std::size_t>(s.k)], *cmin, *cmax, s.U_Omega,
                              s.cell_residual, static_cast<double>(s.newton_iterations),
                              static_cast<double>(s.volume_evaluations), static_cast<double>(s.lower_active),
                              static_cast<double>(s.upper_active)});
    }
    write_table(dir / "steps.csv", steps);
}

void write_plots(const fs::path& dir, const Stepper& stepper, const Trajectory& traj, const RunChecks& checks) {
    PlotSeries tmin{"min theta", {}, {}}, tmax{"max theta", {}, {}}, vk{"v_k", {}, {}};
    PlotSeries chi_mean{"mean chi", {}, {}}, uo{"U_Omega", {}, {}}, margin{"RHS - LHS", {}, {}};
    const double omega = stepper.grid().measure();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj[i];
        const auto [lo, hi] = std::minmax_element(s.theta.begin(), s.theta.end());
        tmin.x.push_back(s.t);
        tmin.y.push_back(*lo);
        tmax.x.push_back(s.t);
        tmax.y.push_back(*hi);
        vk.x.push_back(s.t);
        vk.y.push_back(checks.lower_bound[static_cast<std::size_t>(s.k)]);
        chi_mean.x.push_back(s.t);
        chi_mean.y.push_back(integrate_field(stepper.grid(), s.chi) / omega);
        uo.x.push_back(s.t);
        uo.y.push_back(s.U_Omega);
        margin.x.push_back(s.t);
        margin.y.push_back(checks.energy.rows()[i].rhs - checks.energy.rows()[i].lhs);
    }
    write_line_plot(dir / "temperature.svg", "temperature range", "t", {tmin, tmax, vk});
    write_line_plot(dir / "phase.svg", "water fraction", "t", {chi_mean});
    write_line_plot(dir / "volume.svg", "total volume increment", "t", {uo});
    write_line_plot(dir / "energy_margin.svg", "energy inequality margin", "t", {margin});
}

json checks_to_json(const RunChecks& c) {
    const auto& b = c.bounds;
    return {{"energy", {{"passed", c.energy.passed()},
                        {"worst_margin", c.energy.worst_margin()},
                        {"first_failure", c.energy.first_failure()},
                        {"tolerance", c.energy.tolerance()}}},
            {"entropy", {{"residual_l1", c.entropy.residual_l1()}, {"min_integrand", c.entropy.min_integrand()}}},
            {"bounds", {{"passed", b.passed()},
                        {"lower_bound_ok", b.lower_bound_ok},
                        {"phase_ok", b.phase_ok},
                        {"below_cutoff", b.below_cutoff},
                        {"min_lower_margin", b.min_lower_margin},
                        {"worst_step", b.worst_step},
                        {"min_chi", b.min_chi},
                        {"max_chi", b.max_chi},
                        {"max_theta", b.max_theta},
                        {"cutoff", b.cutoff},
                        {"max_abs_U", b.max_abs_U},
                        {"max_abs_U_dot", b.max_abs_U_dot},
                        {"max_abs_chi_dot", b.max_abs_chi_dot}}},
            {"complementarity", {{"max_phase_residual", c.complementarity.max_phase_residual},
                                 {"max_volume_residual", c.complementarity.max_volume_residual},
                                 {"worst_step", c.complementarity.worst_step}}},
            {"extended_energy", {{"theta_gamma_bar", c.theta_gamma_bar}, {"sup_combination", c.extended_sup}}},
            {"v_final", c.lower_bound.empty() ? 0.0 : c.lower_bound.back()}};
}

}  // namespace

SimulateResult simulate_to_directory(const SimConfig& cfg, const fs::path& out_dir) {
    SimulateResult res;
    res.directory = out_dir;
    std::optional<Stepper> stepper;
    try {
        stepper.emplace(make_stepper(cfg));
    } catch (const InputError& e) {
        res.status = RunStatus::ConfigError;
        res.message = e.what();
        return res;
    }
    fs::create_directories(out_dir / "snapshots");
    {
        std::ofstream out(out_dir / "config.json");
        out << resolved_config(cfg, stepper->grid()).dump(2) << '\n';
    }
    const int n = cfg.steps();
    const int every = std::max(1, n / std::max(1, cfg.snapshots));
    auto observer = [&](const SimState& s) {
        if (s.k % every != 0 && s.k != n) return;
        char name[32];
        std::snprintf(name, sizeof name, "step_%07d.csv", s.k);
        write_snapshot(out_dir / "snapshots" / name, make_header(cfg, *stepper, s), stepper->grid(), s);
    };
    RunOutcome run;
    try {
        run = run_simulation(cfg, *stepper, observer);
    } catch (const InputError& e) {
        res.status = RunStatus::ConfigError;
        res.message = e.what();
        return res;
    }
    const RunChecks checks = check_run(cfg, *stepper, run.trajectory);
    write_ledgers(out_dir, run.trajectory, checks);
    if (cfg.plots) write_plots(out_dir, *stepper, run.trajectory, checks);

    std::vector<std::string> failures;
    if (cfg.energy_ledger && !checks.energy.passed()) failures.push_back("energy inequality");
    if (cfg.bounds_monitor && !checks.bounds.passed()) failures.push_back("bounds");
    if (std::max(checks.complementarity.max_phase_residual, checks.complementarity.max_volume_residual) > 1e-10) {
        failures.push_back("complementarity");
    }
    if (cfg.entropy_ledger && !(checks.entropy.min_integrand() >= 0.0)) failures.push_back("entropy production");

    if (!run.completed) {
        res.status = RunStatus::SolverFailure;
        res.message = "run stopped at step " + std::to_string(run.trajectory.back().k + 1) + ": " + run.error;
    } else if (!failures.empty()) {
        res.status = RunStatus::InvariantViolation;
        std::ostringstream os;
        os << "invariant violation:";
        for (const auto& f : failures) os << ' ' << f << ';';
        res.message = os.str();
    } else {
        res.message = "ok";
    }

    json summary = {{"status", static_cast<int>(res.status)},
                    {"message", res.message},
                    {"completed", run.completed},
                    {"partial", !run.completed},
                    {"steps", run.trajectory.back().k},
                    {"seconds", run.seconds},
                    {"tau", stepper->config().tau},
                    {"R", stepper->family().R()},
                    {"cutoff", stepper->family().cutoff()},
                    {"c_R", stepper->c_R()},
                    {"c_R_min", stepper->c_R_min()},
                    {"c_R_below_min", stepper->c_R_below_min()},
                    {"material", material_fingerprint(stepper->family().model())},
                    {"snapshot_every", every},
                    {"checks", checks_to_json(checks)}};
    std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';
    return res;
}

VerifyResult verify_directory(const fs::path& run_dir) {
    VerifyResult res;
    SimConfig cfg;
    std::optional<Stepper> stepper;
    try {
        std::ifstream in(run_dir / "config.json");
        if (!in) throw InputError((run_dir / "config.json").string() + ": cannot open");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InputError(std::string("config.json: ") + e.what());
        }
        cfg = parse_config_json(j, run_dir);
        stepper.emplace(make_stepper(cfg));
    } catch (const InputError& e) {
        res.status = RunStatus::ConfigError;
        res.failures.push_back(e.what());
        return res;
    }
    auto fail = [&](const std::string& what) { res.failures.push_back(what); };

    Table ledger;
    try {
        ledger = read_table(run_dir / "energy_ledger.csv");
    } catch (const InputError& e) {
        res.status = RunStatus::InvariantViolation;
        fail(e.what());
        return res;
    }
    const auto ck = ledger.column("k"), cb = ledger.column("bulk"), cf = ledger.column("flux"),
               cu = ledger.column("U_Omega"), cp = ledger.column("p"), cl = ledger.column("lhs"),
               cr = ledger.column("rhs"), ct = ledger.column("t");

    std::map<int, Snapshot> snaps;
    const SimState probe;
    const SnapshotHeader expected = make_header(cfg, *stepper, probe);
    if (fs::is_directory(run_dir / "snapshots")) {
        for (const auto& entry : fs::directory_iterator(run_dir / "snapshots")) {
            if (entry.path().extension() != ".csv") continue;
            try {
                Snapshot s = read_snapshot(entry.path());
                const auto why = header_mismatch(expected, s.header);
                if (!why.empty()) {
                    fail(entry.path().filename().string() + ": " + why);
                    continue;
                }
                snaps.emplace(s.header.k, std::move(s));
            } catch (const InputError& e) {
                fail(e.what());
            }
        }
    }
    res.snapshots_checked = static_cast<int>(snaps.size());
    if (snaps.empty()) fail("no readable snapshots");

    const auto& k = stepper->family().model().constants();
    const double tau = stepper->config().tau;
    EnergyLedger replay;
    for (const auto& row : ledger.rows) {
        const int step = static_cast<int>(row[ck]);
        double bulk = row[cb];
        if (auto it = snaps.find(step); it != snaps.end()) {
            const auto& s = it->second;
            bulk = energy_bulk(*stepper, s.theta, s.U, s.chi);
            if (std::abs(bulk - row[cb]) > 1e-9 * std::max(1.0, std::abs(row[cb]))) {
                fail("snapshot " + std::to_string(step) + " disagrees with the energy ledger");
            }
            if (s.header.U_Omega != row[cu] || s.header.p != row[cp]) {
                fail("snapshot " + std::to_string(step) + " volume/load disagree with the energy ledger");
            }
        }
        replay.append(step, row[ct], bulk, row[cu], row[cp], row[cf], k, tau);
        const auto& r = replay.rows().back();
        if (std::abs(r.lhs - row[cl]) > 1e-9 * std::max(1.0, std::abs(r.lhs)) ||
            std::abs(r.rhs - row[cr]) > 1e-9 * std::max(1.0, std::abs(r.rhs))) {
            fail("energy ledger row " + std::to_string(step) + " is not reproducible");
        }
    }
    res.ledger_rows = static_cast<int>(ledger.rows.size());
    if (!replay.passed()) fail("energy inequality fails at step " + std::to_string(replay.first_failure()));

    const int n = ledger.rows.empty() ? 0 : static_cast<int>(ledger.rows.back()[ck]);
    const auto v = lower_bound_sequence(cfg.constants.theta_lower, stepper->c_R(),
                                        stepper->family().model().bounds().c_low, stepper->family(), tau, n);
    for (const auto& [step, s] : snaps) {
        for (std::size_t i = 0; i < s.theta.size(); ++i) {
            if (!(s.chi[i] >= 0.0 && s.chi[i] <= 1.0)) {
                fail("snapshot " + std::to_string(step) + ": chi outside [0, 1]");
                break;
            }
            if (step <= n && !(s.theta[i] >= v[static_cast<std::size_t>(step)])) {
                fail("snapshot " + std::to_string(step) + ": theta below the lower bound sequence");
                break;
            }
            if (!(s.theta[i] < stepper->family().cutoff())) {
                fail("snapshot " + std::to_string(step) + ": theta reaches the truncation level");
                break;
            }
        }
    }
    try {
        const Table entropy = read_table(run_dir / "entropy_ledger.csv");
        const auto cm = entropy.column("min_integrand");
        for (std::size_t r = 1; r < entropy.rows.size(); ++r) {
            if (!(entropy.rows[r][cm] >= 0.0)) {
                fail("negative entropy production sample at row " + std::to_string(r));
                break;
            }
        }
    } catch (const InputError& e) {
        fail(e.what());
    }
    if (!res.failures.empty()) res.status = RunStatus::InvariantViolation;
    return res;
}

}  // namespace icesim
