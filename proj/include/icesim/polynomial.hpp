#pragma once

#include <span>
#include <vector>

namespace icesim {

/// Dense polynomial sum_j a_j x^j.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    [[nodiscard]] double operator()(double x) const { return value(x); }
    [[nodiscard]] double value(double x) const;
    /// k-th derivative at x.
    [[nodiscard]] double derivative(double x, int k = 1) const;
    /// Integral over [a, b].
    [[nodiscard]] double integral(double a, double b) const;
    /// Integral of p(r)/r over [a, b], a > 0 unless p(0) == 0.
    [[nodiscard]] double integral_over_r(double a, double b) const;
    /// (p(r) - p(0)) / r evaluated stably; equals p(r)/r when p(0) == 0.
    [[nodiscard]] double quotient_by_r(double r) const;

    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_constant() const;

private:
    std::vector<double> coeffs_{0.0};
};

/// Piecewise polynomial on [breaks[0], inf); piece i covers [breaks[i], breaks[i+1]),
/// the last piece extends to infinity. Pieces use the global variable x (not x - breaks[i]).
/// Left of breaks[0] the first piece is used.
class PiecewisePolynomial {
public:
    PiecewisePolynomial() = default;
    PiecewisePolynomial(std::vector<double> breaks, std::vector<Polynomial> pieces);
    static PiecewisePolynomial constant(double c);

    [[nodiscard]] double operator()(double x) const { return value(x); }
    [[nodiscard]] double value(double x) const;
    [[nodiscard]] double derivative(double x, int k = 1) const;
    [[nodiscard]] double integral(double a, double b) const;
    [[nodiscard]] double integral_over_r(double a, double b) const;
    [[nodiscard]] double quotient_by_r(double r) const;

    [[nodiscard]] std::span<const double> breaks() const { return breaks_; }
    [[nodiscard]] std::span<const Polynomial> pieces() const { return pieces_; }
    /// Largest jump of the function across interior breaks.
    [[nodiscard]] double max_jump() const;

private:
    [[nodiscard]] std::size_t piece_index(double x) const;

    std::vector<double> breaks_{0.0};
    std::vector<Polynomial> pieces_{Polynomial{}};
};

}  // namespace icesim
