#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "icesim/config.hpp"
#include "icesim/stepper.hpp"

namespace icesim {

/// Metadata carried by every snapshot file.
struct SnapshotHeader {
    int dimension = 1;
    int nx = 1;
    int nz = 1;
    double width = 1.0;
    double height = 1.0;
    double tau = 0.0;
    double R = 0.0;
    double c_R = 0.0;
    std::string material;  ///< fingerprint of the material description
    int k = 0;
    double t = 0.0;
    double U_Omega = 0.0;
    double p = 0.0;
};

struct Snapshot {
    SnapshotHeader header;
    Field theta;
    Field U;
    Field chi;
};

SnapshotHeader make_header(const SimConfig& cfg, const Stepper& stepper, const SimState& state);
std::string material_fingerprint(const MaterialModel& model);

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, const Grid& grid,
                    const SimState& state);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Empty when the run-level fields (grid, tau, R, c_R, material) agree; otherwise the first mismatch.
std::string header_mismatch(const SnapshotHeader& expected, const SnapshotHeader& found);

/// Delimited table with a header row; '#' lines are comments.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

std::string format_double(double v);

}  // namespace icesim
