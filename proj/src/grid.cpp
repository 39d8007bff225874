#include "icesim/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "icesim/errors.hpp"
#include "icesim/quadrature.hpp"

namespace icesim {

std::string side_name(Side side) {
    switch (side) {
        case Side::Bottom: return "bottom";
        case Side::Top: return "top";
        case Side::Left: return "left";
        case Side::Right: return "right";
    }
    return "?";
}

Side side_from_name(const std::string& name) {
    if (name == "bottom") return Side::Bottom;
    if (name == "top") return Side::Top;
    if (name == "left") return Side::Left;
    if (name == "right") return Side::Right;
    throw InputError("unknown boundary side '" + name + "'");
}

Grid Grid::slab(int cells, double height) { 
    if (cells < 1) throw InputError("grid needs at least one cell");
    if (!(height > 0.0)) throw InputError("grid height must be positive");
    Grid g;
    g.dimension_ = 1;
    g.nx_ = 1;
    g.nz_ = cells;
    g.width_ = 1.0;
    g.height_ = height;
    const double h = height / cells;
    for (int j = 0; j < cells; ++j) {
        g.volumes_.push_back(h);
        g.x1_.push_back(0.0);
        g.x3_.push_back((j + 0.5) * h);
        if (j > 0) g.faces_.push_back({j - 1, j, 1.0 / h});
    }
    g.boundary_.push_back({0, Side::Bottom, 1.0, 0.0, 0.0, 0.5 * h});
    g.boundary_.push_back({cells - 1, Side::Top, 1.0, 0.0, height, 0.5 * h});
    return g;
}

Grid Grid::rectangle(int nx, int nz, double width, double height) {
    if (nx < 1 || nz < 1) throw InputError("grid needs at least one cell per direction");
    if (!(width > 0.0) || !(height > 0.0)) throw InputError("grid extents must be positive");
    Grid g;
    g.dimension_ = 2;
    g.nx_ = nx;
    g.nz_ = nz;
    g.width_ = width;
    g.height_ = height;
    const double hx = width / nx;
    const double hz = height / nz;
    for (int j = 0; j < nz; ++j) {
        for (int i = 0; i < nx; ++i) {
            g.volumes_.push_back(hx * hz);
            g.x1_.push_back((i + 0.5) * hx);
            g.x3_.push_back((j + 0.5) * hz);
        }
    }
    for (int j = 0; j < nz; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (i > 0) g.faces_.push_back({g.index(i - 1, j), g.index(i, j), hz / hx});
            if (j > 0) g.faces_.push_back({g.index(i, j - 1), g.index(i, j), hx / hz});
        }
    }
    for (int i = 0; i < nx; ++i) {
        g.boundary_.push_back({g.index(i, 0), Side::Bottom, hx, (i + 0.5) * hx, 0.0, 0.5 * hz});
        g.boundary_.push_back({g.index(i, nz - 1), Side::Top, hx, (i + 0.5) * hx, height, 0.5 * hz});
    }
    for (int j = 0; j < nz; ++j) {
        g.boundary_.push_back({g.index(0, j), Side::Left, hz, 0.0, (j + 0.5) * hz, 0.5 * hx});
        g.boundary_.push_back({g.index(nx - 1, j), Side::Right, hz, width, (j + 0.5) * hz, 0.5 * hx});
    }
    return g;
}

double Grid::measure() const { return pairwise_sum(volumes_.data(), volumes_.size()); }

double Grid::boundary_measure() const {
    double s = 0.0;
    for (const auto& b : boundary_) s += b.measure;
    return s;
}

void Grid::require_matches(std::span<const double> field, const char* what) const {
    if (field.size() != volumes_.size()) {
        throw InputError(std::string(what) + ": field has " + std::to_string(field.size()) + " entries, grid has " +
                         std::to_string(volumes_.size()) + " cells");
    }
}

double integrate_field(const Grid& grid, std::span<const double> field) {
    grid.require_matches(field, "integrate_field");
    Field weighted(field.size());
    const auto vol = grid.volumes();
    for (std::size_t i = 0; i < field.size(); ++i) weighted[i] = vol[i] * field[i];
    return pairwise_sum(weighted.data(), weighted.size());
}

Field stiffness_apply(const Grid& grid, std::span<const double> conductivity, std::span<const double> theta) {
    grid.require_matches(conductivity, "stiffness_apply conductivity");
    grid.require_matches(theta, "stiffness_apply theta");
    for (double k : conductivity) {
        if (!(k > 0.0)) throw InputError("stiffness_apply: conductivity must be positive");
    }
    Field out(theta.size(), 0.0);
    for (const auto& f : grid.faces()) {
        const double kf = 0.5 * (conductivity[f.a] + conductivity[f.b]) * f.geometric;
        const double flux = kf * (theta[f.a] - theta[f.b]);
        out[f.a] += flux;
        out[f.b] -= flux;
    }
    return out;
}

double stiffness_form(const Grid& grid, std::span<const double> conductivity, std::span<const double> theta,
                      std::span<const double> w) {
    double s = 0.0;
    for (const auto& f : grid.faces()) {
        const double kf = 0.5 * (conductivity[f.a] + conductivity[f.b]) * f.geometric;
        s += kf * (theta[f.a] - theta[f.b]) * (w[f.a] - w[f.b]);
    }
    return s;
}

BoundaryExchange boundary_exchange(const Grid& grid, std::span<const double> theta,
                                   std::span<const double> heat_transfer, std::span<const double> theta_gamma) {
    grid.require_matches(theta, "boundary_exchange theta");
    const auto faces = grid.boundary();
    if (heat_transfer.size() != faces.size() || theta_gamma.size() != faces.size()) {
        throw InputError("boundary_exchange: boundary data missing for some boundary faces");
    }
    BoundaryExchange out;
    out.per_cell.assign(theta.size(), 0.0);
    for (std::size_t b = 0; b < faces.size(); ++b) {
        const double q = heat_transfer[b] * faces[b].measure * (theta[faces[b].cell] - theta_gamma[b]);
        out.per_cell[faces[b].cell] += q;
        out.total += q;
    }
    return out;
}

BoundaryElasticity kgamma_from_elasticity(std::span<const ElasticSample> samples) {
    if (samples.empty()) throw InputError("kgamma_from_elasticity: no boundary samples");
    double inv_k = 0.0;
    double moment = 0.0;
    for (const auto& s : samples) {
        if (!(s.compliance > 0.0) || !std::isfinite(s.compliance)) {
            throw InputError("kgamma_from_elasticity: boundary stiffness must be positive definite");
        }
        if (!(s.measure > 0.0)) throw InputError("kgamma_from_elasticity: surface measure must be positive");
        inv_k += s.compliance * s.measure;
        moment += s.compliance * s.x3 * s.measure;
    }
    const double k = 1.0 / inv_k;
    return {k, k * moment};
}

double pressure_recovery(double k_gamma, double zeta_gamma, double u_omega, double p0, double rho0, double g) {
    return k_gamma * (u_omega + p0) + rho0 * g * zeta_gamma;
}

double volume_from_pressure(double k_gamma, double zeta_gamma, double pressure, double p0, double rho0, double g) {
    if (!(k_gamma > 0.0)) throw InputError("volume_from_pressure needs K_Gamma > 0");
    return (pressure - rho0 * g * zeta_gamma) / k_gamma - p0;
}

void write_field_rows(std::ostream& os, const Grid& grid, const std::vector<std::string>& names,
                      const std::vector<const Field*>& fields) {
    os << "index,x1,x3";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    char buf[64];
    for (int i = 0; i < grid.cell_count(); ++i) {
        os << i;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", grid.x1()[i], grid.x3()[i]);
        os << buf;
        for (const Field* f : fields) {
            std::snprintf(buf, sizeof buf, ",%.17g", (*f)[static_cast<std::size_t>(i)]);
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace icesim
