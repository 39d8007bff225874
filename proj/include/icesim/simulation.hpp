#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "icesim/config.hpp"
#include "icesim/diagnostics.hpp"
#include "icesim/stepper.hpp"

namespace icesim {

Stepper make_stepper(const SimConfig& cfg, std::optional<double> c_R_override = std::nullopt);
SimState make_initial_state(const SimConfig& cfg, const Stepper& stepper);

struct RunOutcome {
    Trajectory trajectory;
    bool completed = true;
    std::string error;  ///< solver failure message when !completed
    double seconds = 0.0;
};

/// Runs cfg.steps() steps; a SolverError stops the run and is recorded, not rethrown.
RunOutcome run_simulation(const SimConfig& cfg, const Stepper& stepper,
                          const std::function<void(const SimState&)>& observer = {});

/// Every check of one finished run.
struct RunChecks {
    EnergyLedger energy;
    EntropyLedger entropy;
    BoundsReport bounds;
    ComplementarityReport complementarity;
    std::vector<double> lower_bound;
    double theta_gamma_bar = 0.0;
    double extended_sup = 0.0;  ///< sup over time of the bounded extended-energy combination

    [[nodiscard]] bool passed(double complementarity_tol = 1e-10) const;
};

RunChecks check_run(const SimConfig& cfg, const Stepper& stepper, const Trajectory& trajectory);

/// Outcome classes mapped to process exit codes by the command line tool.
enum class RunStatus { Ok = 0, ConfigError = 2, SolverFailure = 3, InvariantViolation = 4 };

struct SimulateResult {
    RunStatus status = RunStatus::Ok;
    std::filesystem::path directory;
    std::string message;
};

/// Runs a configuration and writes config.json, snapshots/, energy_ledger.csv,
/// entropy_ledger.csv, summary.json and (optionally) SVG plots into `out_dir`.
SimulateResult simulate_to_directory(const SimConfig& cfg, const std::filesystem::path& out_dir);

struct VerifyResult {
    RunStatus status = RunStatus::Ok;
    std::vector<std::string> failures;
    int snapshots_checked = 0;
    int ledger_rows = 0;
};

/// Replays the ledger checks and the bounds monitor on a stored run directory.
VerifyResult verify_directory(const std::filesystem::path& run_dir);

}  // namespace icesim
