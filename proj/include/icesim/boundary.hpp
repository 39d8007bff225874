#pragma once

#include <utility>
#include <vector>

#include "icesim/grid.hpp"

namespace icesim {

/// Piecewise-linear time table, held constant outside its range.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<std::pair<double, double>> points);
    static TimeSeries constant(double value);

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] bool covers(double t0, double t1) const;
    [[nodiscard]] const std::vector<std::pair<double, double>>& points() const { return points_; }
    [[nodiscard]] double min_value() const;
    [[nodiscard]] double max_value() const;
    /// Copy with every value shifted by delta.
    [[nodiscard]] TimeSeries shifted(double delta) const;

private:
    std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
    bool unbounded_ = true;  ///< built by constant(): covers every interval
};

/// Boundary data sampled per boundary face of a grid.
struct BoundaryData {
    std::vector<double> heat_transfer;      ///< h per boundary face
    std::vector<TimeSeries> theta_gamma;    ///< external temperature per boundary face
    TimeSeries p0 = TimeSeries::constant(0.0);

    [[nodiscard]] Field theta_gamma_at(double t) const;
    void require_matches(const Grid& grid) const;
};

}  // namespace icesim
