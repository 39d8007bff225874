#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace icesim {

using Field = std::vector<double>;

enum class Side { Bottom, Top, Left, Right };

std::string side_name(Side side);
Side side_from_name(const std::string& name);

/// Interior face between two cells; `geometric` is face area over centre distance.
struct Face {
    int a;
    int b;
    double geometric;
};

/// Face on the container wall. Its temperature sample is the adjacent cell value.
struct BoundaryFace {
    int cell;
    Side side;
    double measure;     ///< surface measure (length in 2D, 1 in the 1D slab)
    double x1;          ///< position along the wall
    double x3;          ///< height
    double distance;    ///< centre-to-wall distance
};

/// Cell-centred finite-volume grid of a slab [0,H] (1D, gravity axis only) or a
/// rectangle [0,W]x[0,H] (2D). x3 is always the vertical coordinate.
class Grid {
public:
    static Grid slab(int cells, double height);
    static Grid rectangle(int nx, int nz, double width, double height);

    [[nodiscard]] int dimension() const { return dimension_; }
    [[nodiscard]] int nx() const { return nx_; }
    [[nodiscard]] int nz() const { return nz_; }
    [[nodiscard]] int cell_count() const { return nx_ * nz_; }
    [[nodiscard]] double width() const { return width_; }
    [[nodiscard]] double height() const { return height_; }
    [[nodiscard]] double measure() const;  ///< |Omega|
    [[nodiscard]] double boundary_measure() const;

    [[nodiscard]] std::span<const double> volumes() const { return volumes_; }
    [[nodiscard]] std::span<const double> x1() const { return x1_; }
    [[nodiscard]] std::span<const double> x3() const { return x3_; }
    [[nodiscard]] std::span<const Face> faces() const { return faces_; }
    [[nodiscard]] std::span<const BoundaryFace> boundary() const { return boundary_; }

    /// Cell index for column i (x1) and row j (x3).
    [[nodiscard]] int index(int i, int j) const { return j * nx_ + i; }

    void require_matches(std::span<const double> field, const char* what) const;

private:
    Grid() = default;

    int dimension_ = 1;
    int nx_ = 1;
    int nz_ = 1;
    double width_ = 1.0;
    double height_ = 1.0;
    std::vector<double> volumes_;
    std::vector<double> x1_;
    std::vector<double> x3_;
    std::vector<Face> faces_;
    std::vector<BoundaryFace> boundary_;
};

/// Midpoint-rule volume integral, reduced in a fixed tree order.
double integrate_field(const Grid& grid, std::span<const double> field);

/// Finite-volume stiffness action (A theta)_i = sum_faces kappa_f g_f (theta_i - theta_j),
/// with kappa_f the arithmetic mean of the adjacent cell conductivities.
Field stiffness_apply(const Grid& grid, std::span<const double> conductivity, std::span<const double> theta);

/// Bilinear form <A theta, w> evaluated face by face.
double stiffness_form(const Grid& grid, std::span<const double> conductivity, std::span<const double> theta,
                      std::span<const double> w);

struct BoundaryExchange {
    Field per_cell;     ///< h sigma (theta - theta_Gamma) collected on the adjacent cells
    double total = 0.0; ///< boundary integral of h (theta - theta_Gamma)
};

/// Robin exchange term; `heat_transfer` and `theta_gamma` are per boundary face.
BoundaryExchange boundary_exchange(const Grid& grid, std::span<const double> theta,
                                   std::span<const double> heat_transfer, std::span<const double> theta_gamma);

struct ElasticSample {
    double compliance;  ///< k^{-1} n . n > 0
    double x3;
    double measure;
};

struct BoundaryElasticity {
    double k_gamma;
    double zeta_gamma;
};

/// 1/K_Gamma = sum compliance*measure, zeta_Gamma = K_Gamma * sum compliance*x3*measure.
BoundaryElasticity kgamma_from_elasticity(std::span<const ElasticSample> samples);

/// Pressure deviation P = K_Gamma (U_Omega + P0) + rho0 g zeta_Gamma.
double pressure_recovery(double k_gamma, double zeta_gamma, double u_omega, double p0, double rho0, double g);
/// Inverse of pressure_recovery: U_Omega = (P - rho0 g zeta)/K - P0.
double volume_from_pressure(double k_gamma, double zeta_gamma, double pressure, double p0, double rho0, double g);

/// One row per cell: index, x1, x3, then one column per named field.
void write_field_rows(std::ostream& os, const Grid& grid, const std::vector<std::string>& names,
                      const std::vector<const Field*>& fields);

}  // namespace icesim
