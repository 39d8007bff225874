#include "icesim/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "icesim/errors.hpp"
#include "icesim/quadrature.hpp"

namespace icesim {

bool ModelConstants::normalized() const {
    return latent_heat == 2.0 && theta_c == 1.0 && alpha == 1.0 && beta == 1.0 && nu == 1.0 && rho0 == 1.0;
}

namespace {

constexpr int kPhaseSamples = 2001;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    return out;
}

HypothesisBounds estimate_bounds(const MaterialModel& m) {
    HypothesisBounds b;
    b.c_low = b.cprime_low = b.lambda_low = b.kappa_low = std::numeric_limits<double>::infinity();
    b.cprime_high = b.lambda_high = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kPhaseSamples; ++i) {
        const double z = static_cast<double>(i) / (kPhaseSamples - 1);
        b.c_low = std::min(b.c_low, m.c(z));
        b.cprime_low = std::min(b.cprime_low, m.c_prime(z));
        b.cprime_high = std::max(b.cprime_high, m.c_prime(z));
        b.lambda_low = std::min(b.lambda_low, m.lambda(z));
        b.lambda_high = std::max(b.lambda_high, m.lambda(z));
        b.lambda_prime_max = std::max(b.lambda_prime_max, -m.lambda_prime(z));
        b.kappa_low = std::min(b.kappa_low, m.kappa(z));
        b.c_second_max = std::max(b.c_second_max, std::abs(m.c_second(z)));
        b.lambda_second_max = std::max(b.lambda_second_max, std::abs(m.lambda_second(z)));
    }
    b.c1_low = std::numeric_limits<double>::infinity();
    for (double t : log_grid(1.0, 1e3, 2001)) b.c1_low = std::min(b.c1_low, m.c1(t));
    b.gamma_low = m.gamma(0.0);
    for (double t : log_grid(1e-6, 1e3, 2001)) b.gamma_low = std::min(b.gamma_low, m.gamma(t));
    for (double t : m.gamma_pieces().breaks()) b.gamma_low = std::min(b.gamma_low, m.gamma(std::max(t, 0.0)));
    return b;
}

void require_finite(double theta) {
    if (!std::isfinite(theta)) throw InputError("caloric function evaluated at a non-finite temperature");
}

/// Quadrature over [0, theta] split at the breaks of c1 so every panel is smooth.
template <class F>
double split_quadrature(const MaterialModel& model, double theta, F&& integrand) {
    double total = 0.0;
    double left = 0.0;
    for (double brk : model.c1_pieces().breaks()) {
        if (brk <= left) continue;
        if (brk >= theta) break;
        total += adaptive_simpson(integrand, left, brk, 1e-12);
        left = brk;
    }
    return total + adaptive_simpson(integrand, left, theta, 1e-12);
}

}  // namespace

MaterialModel::MaterialModel(std::string name, Polynomial c, PiecewisePolynomial c1, Polynomial lambda,
                             Polynomial kappa, PiecewisePolynomial gamma, ModelConstants constants,
                             CaloricMode mode)
    : name_(std::move(name)),
      c_(std::move(c)),
      c1_(std::move(c1)),
      lambda_(std::move(lambda)),
      kappa_(std::move(kappa)),
      gamma_(std::move(gamma)),
      constants_(constants),
      mode_(mode) {
    bounds_ = estimate_bounds(*this);
}

MaterialModel MaterialModel::reference(ModelConstants constants) {
    return MaterialModel("reference", Polynomial({1.0, 1.0}),
                         PiecewisePolynomial({0.0, 1.0}, {Polynomial({0.0, 1.0}), Polynomial({0.0, 0.0, 1.0})}),
                         Polynomial({2.0, -1.0}), Polynomial({1.0, 0.5}), PiecewisePolynomial::constant(1.0),
                         constants);
}

MaterialModel MaterialModel::convex_blend(ModelConstants constants) {
    return MaterialModel("convex-blend", Polynomial({1.0, 1.0, 0.5}),
                         PiecewisePolynomial({0.0, 1.0}, {Polynomial({0.0, 1.0}), Polynomial({0.0, 0.0, 1.0})}),
                         Polynomial({2.0, -1.5, 0.5}), Polynomial({1.0, 0.5}),
                         PiecewisePolynomial({0.0}, {Polynomial({1.0, 0.1})}), constants);
}

MaterialModel MaterialModel::builtin(const std::string& name, ModelConstants constants) {
    if (name == "reference") return reference(constants);
    if (name == "convex-blend") return convex_blend(constants);
    throw InputError("unknown material '" + name + "' (known: reference, convex-blend)");
}

double MaterialModel::c1_over_r(double r) const {
    if (r <= 0.0) return c1_.pieces()[0].quotient_by_r(0.0);
    return c1_.quotient_by_r(r);
}

MaterialModel MaterialModel::with_constants(const ModelConstants& constants) const {
    MaterialModel copy = *this;
    copy.constants_ = constants;
    return copy;
}

MaterialModel MaterialModel::with_caloric_mode(CaloricMode mode) const {
    MaterialModel copy = *this;
    copy.mode_ = mode;
    return copy;
}

double caloric_e1(const MaterialModel& model, double theta) {
    require_finite(theta);
    if (theta <= 0.0) return 0.0;
    if (model.caloric_mode() == CaloricMode::ClosedForm) return model.c1_pieces().integral(0.0, theta);
    return split_quadrature(model, theta, [&model](double r) { return model.c1(r); });
}

double caloric_s1(const MaterialModel& model, double theta) {
    require_finite(theta);
    if (theta <= 0.0) return 0.0;
    if (model.caloric_mode() == CaloricMode::ClosedForm) return model.c1_pieces().integral_over_r(0.0, theta);
    return split_quadrature(model, theta, [&model](double r) { return model.c1_over_r(r); });
}

double caloric_f1(const MaterialModel& model, double theta) {
    require_finite(theta);
    if (theta <= 0.0) return 0.0;
    return caloric_e1(model, theta) - theta * caloric_s1(model, theta);
}

TruncationFamily::TruncationFamily(const MaterialModel& model, double R) : model_(model), R_(R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw InputError("truncation level R must be positive and finite");
    const double level = std::min(caloric_e1(model_, R), std::abs(caloric_f1(model_, R)));
    cutoff_ = std::sqrt(R) * std::pow(level, 0.25);
    if (!(cutoff_ > 0.0)) throw InputError("truncation cutoff B(R) is not positive");
    e1_cut_ = caloric_e1(model_, cutoff_);
    s1_cut_ = caloric_s1(model_, cutoff_);
    f1_cut_ = caloric_f1(model_, cutoff_);
    c1_cut_ = model_.c1(cutoff_);
    f1_critical_ = caloric_f1(model_, model_.constants().theta_c);
}

double TruncationFamily::qr(double theta) const { return std::min(std::max(theta, 0.0), cutoff_); }

double TruncationFamily::c1r(double theta) const { return model_.c1(qr(theta)); }

double TruncationFamily::e1r(double theta) const {
    if (theta <= cutoff_) return caloric_e1(model_, theta);
    return e1_cut_ + c1_cut_ * (theta - cutoff_);
}

double TruncationFamily::s1r(double theta) const {
    if (theta <= cutoff_) return caloric_s1(model_, theta);
    return s1_cut_ + c1_cut_ * (theta - cutoff_) / cutoff_;
}

double TruncationFamily::f1r(double theta) const {
    if (theta <= cutoff_) return caloric_f1(model_, theta);
    require_finite(theta);
    return f1_cut_;
}

TruncationFamily truncate_family(const MaterialModel& model, double R) { return TruncationFamily(model, R); }

bool ValidationReport::passed() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.heuristic || c.passed; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : clauses) {
        os << "clause=" << c.clause << " status=" << (c.passed ? "pass" : "fail")
           << (c.heuristic ? " kind=heuristic" : " kind=asserted") << " detail=\"" << c.detail << "\"\n";
    }
    os << "verdict=" << (passed() ? "pass" : "fail") << "\n";
    return os.str();
}

ValidationReport validate_hypothesis(const MaterialModel& model, int samples, const std::vector<double>& heat_transfer) {
    if (samples < 100) throw InputError("validate_hypothesis needs at least 100 samples");
    constexpr double tol = 1e-10;
    const double delta = 1.0 / samples;
    ValidationReport report;
    auto fmt = [](const char* what, double v) {
        std::ostringstream os;
        os << what << "=" << v;
        return os.str();
    };

    // (i) c convex, c >= c_* > 0, 0 < c_lo <= c' <= c_hi
    {
        ClauseResult r{"i", true, false, ""};
        double cmin = INFINITY, dmin = INFINITY, dmax = -INFINITY, second = INFINITY;
        for (int i = 0; i < samples; ++i) {
            const double z = i * delta;
            const double d = (model.c(z + delta) - model.c(z)) / delta;
            cmin = std::min(cmin, model.c(z));
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
            if (i > 0) second = std::min(second, model.c(z + delta) - 2.0 * model.c(z) + model.c(z - delta));
        }
        cmin = std::min(cmin, model.c(1.0));
        r.passed = cmin > 0.0 && dmin > 0.0 && std::isfinite(dmax) && second >= -tol;
        r.detail = fmt("c_min", cmin) + " " + fmt("cprime_min", dmin) + " " + fmt("cprime_max", dmax) + " " +
                   fmt("second_difference_min", second);
        report.clauses.push_back(r);
    }
    // (ii) c1 continuous, c1 >= c^* > 0 on theta >= 1, int c1/r finite, int c1/r^2 infinite
    {
        ClauseResult r{"ii", true, false, ""};
        const auto& first = model.c1_pieces().pieces()[0].coeffs();
        const double a0 = first[0];
        const double a1 = first.size() > 1 ? first[1] : 0.0;
        double c1_min_above = INFINITY;
        double c1_min_below = INFINITY;
        for (int i = 0; i <= samples; ++i) {
            c1_min_below = std::min(c1_min_below, model.c1(std::max(i * delta, 1e-12)));
            c1_min_above = std::min(c1_min_above, model.c1(std::exp(std::log(1e3) * i / samples)));
        }
        const double jump = model.c1_pieces().max_jump();
        r.passed = jump <= tol && c1_min_above > 0.0 && c1_min_below >= 0.0 && a0 == 0.0 && a1 > 0.0;
        r.detail = fmt("c1_jump", jump) + " " + fmt("c1_min_theta_ge_1", c1_min_above) + " " +
                   fmt("c1_at_0", a0) + " " + fmt("c1_slope_at_0", a1);
        report.clauses.push_back(r);
    }
    // (ii) growth c1(theta)/theta -> infinity: heuristic trend only
    {
        ClauseResult r{"ii-growth", true, true, ""};
        double prev = -INFINITY;
        bool increasing = true;
        for (int i = 0; i <= samples; ++i) {
            const double t = std::exp(std::log(1e3) * i / samples);
            const double q = model.c1(t) / t;
            if (q < prev - tol) increasing = false;
            prev = q;
        }
        r.passed = increasing && prev > model.c1(1.0);
        r.detail = fmt("c1_over_theta_at_1e3", prev) + " increasing=" + (increasing ? "yes" : "no");
        report.clauses.push_back(r);
    }
    // (iii) lambda convex, bounded, -lambda^* <= lambda' <= 0
    {
        ClauseResult r{"iii", true, false, ""};
        double lmin = INFINITY, dmax = -INFINITY, dmin = INFINITY, second = INFINITY;
        for (int i = 0; i < samples; ++i) {
            const double z = i * delta;
            const double d = (model.lambda(z + delta) - model.lambda(z)) / delta;
            lmin = std::min({lmin, model.lambda(z), model.lambda(z + delta)});
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
            if (i > 0) {
                second = std::min(second, model.lambda(z + delta) - 2.0 * model.lambda(z) + model.lambda(z - delta));
            }
        }
        r.passed = lmin > 0.0 && dmax <= tol && std::isfinite(dmin) && second >= -tol;
        r.detail = fmt("lambda_min", lmin) + " " + fmt("lambda_prime_max", dmax) + " " +
                   fmt("lambda_prime_min", dmin) + " " + fmt("second_difference_min", second);
        report.clauses.push_back(r);
    }
    // (iv) kappa >= kappa_* > 0
    {
        ClauseResult r{"iv", true, false, ""};
        double kmin = INFINITY;
        for (int i = 0; i <= samples; ++i) kmin = std::min(kmin, model.kappa(i * delta));
        r.passed = kmin > 0.0;
        r.detail = fmt("kappa_min", kmin);
        report.clauses.push_back(r);
    }
    // (v) h >= 0 and bounded
    {
        ClauseResult r{"v", true, false, ""};
        if (heat_transfer.empty()) {
            r.detail = "no boundary weights supplied";
        } else {
            const double hmin = *std::min_element(heat_transfer.begin(), heat_transfer.end());
            const bool finite = std::all_of(heat_transfer.begin(), heat_transfer.end(),
                                            [](double h) { return std::isfinite(h); });
            r.passed = finite && hmin >= 0.0;
            r.detail = fmt("h_min", hmin);
        }
        report.clauses.push_back(r);
    }
    // (vi) gamma >= gamma_* > 0, Lipschitz
    {
        ClauseResult r{"vi", true, false, ""};
        double gmin = model.gamma(0.0);
        for (int i = 0; i <= samples; ++i) gmin = std::min(gmin, model.gamma(std::exp(std::log(1e3) * i / samples)));
        const double jump = model.gamma_pieces().max_jump();
        r.passed = gmin > 0.0 && jump <= tol;
        r.detail = fmt("gamma_min", gmin) + " " + fmt("gamma_jump", jump);
        report.clauses.push_back(r);
    }
    return report;
}

}  // namespace icesim
