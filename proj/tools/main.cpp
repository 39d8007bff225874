#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icesim/config.hpp"
#include "icesim/errors.hpp"
#include "icesim/simulation.hpp"
#include "icesim/studies.hpp"

namespace fs = std::filesystem;
using namespace icesim;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kSolver = 3;
constexpr int kInvariant = 4;

fs::path output_dir(const SimConfig& cfg, const std::string& override_dir, const std::string& suffix) {
    if (!override_dir.empty()) return override_dir;
    fs::path base = cfg.output_dir;
    return suffix.empty() ? base : base / suffix;
}

void write_report(const fs::path& dir, const std::string& name, const json& report) {
    fs::create_directories(dir);
    std::ofstream(dir / name) << report.dump(2) << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
    const SimConfig cfg = parse_config(config_path);
    const auto dir = output_dir(cfg, out, "");
    const auto res = simulate_to_directory(cfg, dir);
    std::printf("%s: %s\n", dir.string().c_str(), res.message.c_str());
    return static_cast<int>(res.status);
}

int cmd_verify(const std::string& run_dir) {
    const auto res = verify_directory(run_dir);
    for (const auto& f : res.failures) std::printf("FAIL %s\n", f.c_str());
    std::printf("checked %d snapshots, %d ledger rows: %s\n", res.snapshots_checked, res.ledger_rows,
                res.status == RunStatus::Ok ? "ok" : "failed");
    return static_cast<int>(res.status);
}

int cmd_study_tau(const SimConfig& cfg, int levels, const fs::path& dir) {
    const auto s = tau_convergence_study(cfg, levels);
    if (!s.completed) {
        std::printf("tau study stopped: %s\n", s.error.c_str());
        return kSolver;
    }
    json levels_json = json::array();
    for (const auto& l : s.levels) {
        levels_json.push_back({{"tau", l.tau}, {"seconds", l.seconds}, {"entropy_residual", l.entropy_residual},
                               {"energy_passed", l.energy_passed}});
        std::printf("tau=%-12g entropy residual=%.6e energy=%s\n", l.tau, l.entropy_residual,
                    l.energy_passed ? "pass" : "FAIL");
    }
    for (std::size_t j = 0; j < s.differences.size(); ++j) std::printf("d_%zu = %.6e\n", j, s.differences[j]);
    for (std::size_t j = 0; j < s.ratios.size(); ++j) std::printf("d_%zu/d_%zu = %.4f\n", j + 1, j, s.ratios[j]);
    const bool ok = s.ratios_ok() && s.entropy_monotone();
    write_report(dir, "tau_study.json",
                 {{"levels", levels_json},
                  {"differences", s.differences},
                  {"ratios", s.ratios},
                  {"ratio_limit", s.ratio_limit},
                  {"ratios_ok", s.ratios_ok()},
                  {"entropy_monotone", s.entropy_monotone()},
                  {"passed", ok}});
    std::printf("tau study: %s\n", ok ? "pass" : "FAIL");
    return ok ? kOk : kInvariant;
}

int cmd_study_perturb(const SimConfig& cfg, const std::vector<double>& deltas, const fs::path& dir) {
    const auto s = perturbation_experiment(cfg, deltas);
    if (!s.completed) {
        std::printf("perturbation study stopped: %s\n", s.error.c_str());
        return kSolver;
    }
    json rows = json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"delta", r.delta}, {"numerator", r.numerator}, {"denominator", r.denominator}, {"Q", r.Q}});
        std::printf("delta=%-10g numerator=%.6e denominator=%.6e Q=%.6e\n", r.delta, r.numerator, r.denominator, r.Q);
    }
    std::printf("max Q / min Q = %.4f (limit %g): %s\n", s.ratio, s.ratio_limit, s.passed() ? "pass" : "FAIL");
    write_report(dir, "perturbation_study.json",
                 {{"rows", rows}, {"ratio", s.ratio}, {"ratio_limit", s.ratio_limit}, {"passed", s.passed()}});
    return s.passed() ? kOk : kInvariant;
}

int cmd_study_truncation(const SimConfig& cfg, const fs::path& dir) {
    const auto s = truncation_study(cfg);
    if (!s.completed) {
        std::printf("truncation study stopped: %s\n", s.error.c_str());
        return kSolver;
    }
    std::printf("R=%g and %g, c_R=%g: sup difference %.3e (tol %g), max theta %.6g < B(R)=%.6g: %s\n", s.R, s.R2,
                s.c_R, s.sup_diff, s.tolerance, s.max_theta, s.cutoff, s.passed() ? "pass" : "FAIL");
    write_report(dir, "truncation_study.json",
                 {{"R", s.R},
                  {"R2", s.R2},
                  {"c_R", s.c_R},
                  {"sup_diff", s.sup_diff},
                  {"tolerance", s.tolerance},
                  {"max_theta", s.max_theta},
                  {"cutoff", s.cutoff},
                  {"passed", s.passed()}});
    return s.passed() ? kOk : kInvariant;
}

int cmd_material_check(const std::string& config_path) {
    const SimConfig cfg = parse_config(config_path);
    const MaterialModel model = build_material(cfg);
    const Grid grid = build_grid(cfg);
    const auto boundary = build_boundary(cfg, grid);
    const auto report = validate_hypothesis(model, 2000, boundary.heat_transfer);
    std::printf("%s", report.to_text().c_str());
    std::printf("R0=%g\n", minimal_truncation_level(model));
    return report.passed() ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-change thermoelasticity solver with built-in verification"};
    app.require_subcommand(1);

    std::string config_path, run_dir, out_dir, kind;
    int levels = 3;
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};

    auto* sim = app.add_subcommand("simulate", "run a configuration and write the run directory");
    sim->add_option("config", config_path, "configuration file")->required();
    sim->add_option("-o,--out", out_dir, "run directory (default: output.directory of the config)");

    auto* ver = app.add_subcommand("verify", "replay ledger and bound checks on a run directory");
    ver->add_option("run-dir", run_dir, "directory written by simulate")->required();

    auto* study = app.add_subcommand("study", "tau | perturb | truncation experiments");
    study->add_option("kind", kind, "tau, perturb or truncation")
        ->required()
        ->check(CLI::IsMember({"tau", "perturb", "truncation"}));
    study->add_option("config", config_path, "configuration file")->required();
    study->add_option("-o,--out", out_dir, "report directory");
    study->add_option("--levels", levels, "number of tau halvings")->check(CLI::Range(2, 10));
    study->add_option("--deltas", deltas, "perturbation sizes");

    auto* mat = app.add_subcommand("material-check", "check the structural hypotheses of the configured material");
    mat->add_option("config", config_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*sim) return cmd_simulate(config_path, out_dir);
        if (*ver) return cmd_verify(run_dir);
        if (*mat) return cmd_material_check(config_path);
        const SimConfig cfg = parse_config(config_path);
        const auto dir = output_dir(cfg, out_dir, "study_" + kind);
        if (kind == "tau") return cmd_study_tau(cfg, levels, dir);
        if (kind == "perturb") return cmd_study_perturb(cfg, deltas, dir);
        return cmd_study_truncation(cfg, dir);
    } catch (const InputError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kInvariant;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSolver;
    }
}
