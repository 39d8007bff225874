#pragma once

#include <string>
#include <vector>

#include "icesim/polynomial.hpp"

namespace icesim {

/// Physical constants of the model. The normalized ones (latent heat, freezing point,
/// expansion coefficients, viscosity, density) are fixed at L = 2 and 1 otherwise.
struct ModelConstants {
    double latent_heat = 2.0;
    double theta_c = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double nu = 1.0;
    double rho0 = 1.0;
    double g = 0.0;
    double zeta_gamma = 0.0;
    double k_gamma = 0.0;
    double theta_lower = 0.5;  ///< theta_*, lower bound of initial and boundary temperature
    double theta_upper = 1.0;  ///< theta^*, upper bound of initial and boundary temperature

    [[nodiscard]] bool normalized() const;
};

/// Structural constants of the constitutive functions, estimated by dense sampling.
struct HypothesisBounds {
    double c_low = 0.0;             ///< c_*   : min c
    double c1_low = 0.0;            ///< c^*   : min c1 on theta >= 1
    double cprime_low = 0.0;        ///< lower bound of c'
    double cprime_high = 0.0;       ///< upper bound of c'
    double lambda_low = 0.0;
    double lambda_high = 0.0;
    double lambda_prime_max = 0.0;  ///< lambda^* : max(-lambda')
    double kappa_low = 0.0;
    double gamma_low = 0.0;
    double c_second_max = 0.0;      ///< max |c''|, used by the time-step guard
    double lambda_second_max = 0.0; ///< max |lambda''|
};

enum class CaloricMode { ClosedForm, Quadrature };

/// Constitutive laws of the water/ice mixture. Immutable once built.
///
/// Phase functions c, lambda, kappa are polynomials on [0, 1]; c1 and gamma are
/// piecewise polynomials in temperature. c1 is extended by zero for theta <= 0.
class MaterialModel {
public:
    MaterialModel(std::string name, Polynomial c, PiecewisePolynomial c1, Polynomial lambda, Polynomial kappa,
                  PiecewisePolynomial gamma, ModelConstants constants = {},
                  CaloricMode mode = CaloricMode::ClosedForm);

    /// c = 1 + chi, c1 = theta on (0,1] and theta^2 beyond, lambda = 2 - chi,
    /// kappa = 1 + chi/2, gamma = 1.
    static MaterialModel reference(ModelConstants constants = {});
    /// Curved variant: c = 1 + chi + chi^2/2, lambda = 2 - 3chi/2 + chi^2/2, gamma = 1 + theta/10.
    static MaterialModel convex_blend(ModelConstants constants = {});
    /// Built-in lookup by name ("reference", "convex-blend").
    static MaterialModel builtin(const std::string& name, ModelConstants constants = {});

    [[nodiscard]] double c(double chi) const { return c_.value(chi); }
    [[nodiscard]] double c_prime(double chi) const { return c_.derivative(chi, 1); }
    [[nodiscard]] double c_second(double chi) const { return c_.derivative(chi, 2); }
    [[nodiscard]] double c1(double theta) const { return theta <= 0.0 ? 0.0 : c1_.value(theta); }
    /// c1(r)/r, finite at r -> 0 when c1(0) = 0.
    [[nodiscard]] double c1_over_r(double r) const;
    [[nodiscard]] double lambda(double chi) const { return lambda_.value(chi); }
    [[nodiscard]] double lambda_prime(double chi) const { return lambda_.derivative(chi, 1); }
    [[nodiscard]] double lambda_second(double chi) const { return lambda_.derivative(chi, 2); }
    [[nodiscard]] double kappa(double chi) const { return kappa_.value(chi); }
    [[nodiscard]] double gamma(double theta) const { return gamma_.value(theta < 0.0 ? 0.0 : theta); }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const ModelConstants& constants() const { return constants_; }
    [[nodiscard]] const HypothesisBounds& bounds() const { return bounds_; }
    [[nodiscard]] CaloricMode caloric_mode() const { return mode_; }
    [[nodiscard]] bool kappa_is_constant() const { return kappa_.is_constant(); }

    [[nodiscard]] const Polynomial& c_poly() const { return c_; }
    [[nodiscard]] const PiecewisePolynomial& c1_pieces() const { return c1_; }
    [[nodiscard]] const Polynomial& lambda_poly() const { return lambda_; }
    [[nodiscard]] const Polynomial& kappa_poly() const { return kappa_; }
    [[nodiscard]] const PiecewisePolynomial& gamma_pieces() const { return gamma_; }

    [[nodiscard]] MaterialModel with_constants(const ModelConstants& constants) const;
    [[nodiscard]] MaterialModel with_caloric_mode(CaloricMode mode) const;

private:
    std::string name_;
    Polynomial c_;
    PiecewisePolynomial c1_;
    Polynomial lambda_;
    Polynomial kappa_;
    PiecewisePolynomial gamma_;
    ModelConstants constants_;
    CaloricMode mode_;
    HypothesisBounds bounds_;
};

/// e1(theta) = int_0^theta c1; zero for theta <= 0.
double caloric_e1(const MaterialModel& model, double theta);
/// s1(theta) = int_0^theta c1(r)/r dr; zero for theta <= 0.
double caloric_s1(const MaterialModel& model, double theta);
/// f1 = e1 - theta s1.
double caloric_f1(const MaterialModel& model, double theta);

/// Cut-off versions of the caloric functions at level B(R). Above B(R) e1 and s1 are
/// continued affinely and f1 is frozen, which makes every temperature nonlinearity
/// globally Lipschitz.
class TruncationFamily {
public:
    TruncationFamily(const MaterialModel& model, double R);

    [[nodiscard]] double R() const { return R_; }
    [[nodiscard]] double cutoff() const { return cutoff_; }  ///< B(R)
    [[nodiscard]] double qr(double theta) const;             ///< min(theta+, B(R))
    [[nodiscard]] double c1r(double theta) const;
    [[nodiscard]] double e1r(double theta) const;
    [[nodiscard]] double s1r(double theta) const;
    [[nodiscard]] double f1r(double theta) const;
    [[nodiscard]] const MaterialModel& model() const { return model_; }
    /// f1(theta_c), the reference free energy shifting E_k.
    [[nodiscard]] double f1_critical() const { return f1_critical_; }

private:
    MaterialModel model_;
    double R_;
    double cutoff_;
    double e1_cut_;
    double s1_cut_;
    double f1_cut_;
    double c1_cut_;
    double f1_critical_;
};

TruncationFamily truncate_family(const MaterialModel& model, double R);

struct ClauseResult {
    std::string clause;
    bool passed = true;
    bool heuristic = false;  ///< reported only, not part of the verdict
    std::string detail;
};

struct ValidationReport {
    std::vector<ClauseResult> clauses;
    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::string to_text() const;
};

/// Checks clauses (i)-(vi) of the structural hypotheses by finite-difference sampling.
/// Boundary heat-transfer weights are checked for clause (v) when supplied.
ValidationReport validate_hypothesis(const MaterialModel& model, int samples,
                                     const std::vector<double>& heat_transfer = {});

}  // namespace icesim
