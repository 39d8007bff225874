#include "icesim/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "icesim/errors.hpp"

namespace icesim {

TimeSeries::TimeSeries(std::vector<std::pair<double, double>> points) : points_(std::move(points)), unbounded_(false) {
    if (points_.empty()) throw InputError("time table needs at least one point");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
            throw InputError("time table entries must be finite");
        }
        if (i > 0 && !(points_[i].first > points_[i - 1].first)) throw InputError("time table times must increase");
    }
}

TimeSeries TimeSeries::constant(double value) {
    TimeSeries ts({{0.0, value}});
    ts.unbounded_ = true;
    return ts;
}

double TimeSeries::value(double t) const {
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                     [](double x, const std::pair<double, double>& p) { return x < p.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    const double w = (t - t0) / (t1 - t0);
    return v0 + w * (v1 - v0);
}

bool TimeSeries::covers(double t0, double t1) const {
    if (unbounded_) return true;
    constexpr double slack = 1e-12;
    return points_.front().first <= t0 + slack && points_.back().first >= t1 - slack;
}

double TimeSeries::min_value() const {
    double v = points_.front().second;
    for (const auto& p : points_) v = std::min(v, p.second);
    return v;
}

double TimeSeries::max_value() const {
    double v = points_.front().second;
    for (const auto& p : points_) v = std::max(v, p.second);
    return v;
}

TimeSeries TimeSeries::shifted(double delta) const {
    TimeSeries copy = *this;
    for (auto& p : copy.points_) p.second += delta;
    return copy;
}

Field BoundaryData::theta_gamma_at(double t) const {
    Field out(theta_gamma.size());
    for (std::size_t b = 0; b < theta_gamma.size(); ++b) out[b] = theta_gamma[b].value(t);
    return out;
}

void BoundaryData::require_matches(const Grid& grid) const {
    const auto n = grid.boundary().size();
    if (heat_transfer.size() != n || theta_gamma.size() != n) {
        throw InputError("boundary data must provide h and theta_Gamma for every boundary face");
    }
    for (double h : heat_transfer) {
        if (!std::isfinite(h) || h < 0.0) throw InputError("heat transfer coefficient must be finite and >= 0");
    }
}

}  // namespace icesim
