#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icesim/boundary.hpp"
#include "icesim/errors.hpp"
#include "icesim/grid.hpp"
#include "icesim/materials.hpp"
#include "icesim/stepper.hpp"

namespace icesim {

/// Configuration error with a JSON-pointer style location.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& path, const std::string& message)
        : InputError(path + ": " + message), path_(path) {}
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Initial field description: constant, linear ramp in x3, explicit per-cell values, or a file.
struct FieldSpec {
    std::string kind = "constant";  ///< constant | ramp | values | file
    double value = 0.0;
    double bottom = 0.0;
    double top = 0.0;
    std::vector<double> values;
    std::string path;

    static FieldSpec uniform(double v) {
        FieldSpec f;
        f.value = v;
        return f;
    }
};

struct MaterialOverrides {
    std::optional<Polynomial> c;
    std::optional<Polynomial> lambda;
    std::optional<Polynomial> kappa;
    std::optional<PiecewisePolynomial> c1;
    std::optional<PiecewisePolynomial> gamma;
};

struct SimConfig {
    // grid
    int dimension = 1;
    int nx = 1;
    int nz = 100;
    double width = 1.0;
    double height = 1.0;
    // material
    std::string material = "reference";
    MaterialOverrides overrides;
    CaloricMode caloric = CaloricMode::ClosedForm;
    ModelConstants constants;
    /// k^{-1} n.n per side; when present, K_Gamma and zeta_Gamma are derived from it.
    std::map<std::string, double> compliance;
    // time and truncation
    double tau = 1e-3;
    double T = 1.0;
    double R = 4.0;
    std::optional<double> c_R;
    // data
    FieldSpec theta0 = FieldSpec::uniform(1.0);
    FieldSpec U0 = FieldSpec::uniform(0.0);
    FieldSpec chi0 = FieldSpec::uniform(1.0);
    std::map<std::string, double> heat_transfer{{"all", 1.0}};
    std::map<std::string, TimeSeries> theta_gamma{{"all", TimeSeries::constant(1.0)}};
    TimeSeries p0 = TimeSeries::constant(0.0);
    // solver
    double newton_tol = 1e-11;
    int max_newton = 50;
    bool implicit_volume = true;
    // output
    std::string output_dir = "run";
    int snapshots = 10;
    bool plots = true;
    bool energy_ledger = true;
    bool entropy_ledger = true;
    bool bounds_monitor = true;
    std::uint64_t seed = 12345;
    /// Directory relative paths (initial field files) are resolved against.
    std::filesystem::path base_dir;

    [[nodiscard]] int steps() const;
};

SimConfig parse_config(const std::filesystem::path& path);
SimConfig parse_config_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json material_to_json(const MaterialModel& model);

/// Checks every data constraint of the existence theory (bounds on initial and
/// boundary temperatures, phase range, table coverage, step sizes). Throws ConfigError.
void validate_config(const SimConfig& cfg);

Grid build_grid(const SimConfig& cfg);
MaterialModel build_material(const SimConfig& cfg);
BoundaryData build_boundary(const SimConfig& cfg, const Grid& grid);
StepperConfig build_stepper_config(const SimConfig& cfg);
Field build_field(const FieldSpec& spec, const Grid& grid, const std::filesystem::path& base_dir,
                  const std::string& where);

/// Smallest admissible truncation level: every structural constant of the material.
double minimal_truncation_level(const MaterialModel& model);

/// Stable 64-bit FNV-1a hash, hex encoded.
std::string fingerprint(const std::string& text);

}  // namespace icesim
