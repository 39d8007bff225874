#include "icesim/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "icesim/errors.hpp"

namespace icesim {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    for (double a : coeffs_) {
        if (!std::isfinite(a)) throw InputError("polynomial coefficient is not finite");
    }
}

double Polynomial::value(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double Polynomial::derivative(double x, int k) const {
    double acc = 0.0;
    for (int j = degree(); j >= k; --j) {
        double factor = 1.0;
        for (int m = 0; m < k; ++m) factor *= static_cast<double>(j - m);
        acc = acc * x + factor * coeffs_[static_cast<std::size_t>(j)];
    }
    return acc;
}

double Polynomial::integral(double a, double b) const {
    auto antiderivative = [this](double x) {
        double acc = 0.0;
        for (int j = degree(); j >= 0; --j) {
            acc = acc * x + coeffs_[static_cast<std::size_t>(j)] / static_cast<double>(j + 1);
        }
        return acc * x;
    };
    return antiderivative(b) - antiderivative(a);
}

double Polynomial::integral_over_r(double a, double b) const {
    double result = 0.0;
    if (coeffs_[0] != 0.0) {
        if (a <= 0.0 || b <= 0.0) throw InputError("integral of p(r)/r through r = 0 with p(0) != 0");
        result += coeffs_[0] * std::log(b / a);
    }
    double acc_b = 0.0;
    double acc_a = 0.0;
    for (int j = degree(); j >= 1; --j) {
        const double c = coeffs_[static_cast<std::size_t>(j)] / static_cast<double>(j);
        acc_b = acc_b * b + c;
        acc_a = acc_a * a + c;
    }
    return result + acc_b * b - acc_a * a;
}

double Polynomial::quotient_by_r(double r) const {
    double acc = 0.0;
    for (int j = degree(); j >= 1; --j) acc = acc * r + coeffs_[static_cast<std::size_t>(j)];
    return acc;
}

bool Polynomial::is_constant() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double a) { return a == 0.0; });
}

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breaks, std::vector<Polynomial> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
    if (breaks_.empty() || breaks_.size() != pieces_.size()) {
        throw InputError("piecewise polynomial needs one break per piece");
    }
    for (std::size_t i = 1; i < breaks_.size(); ++i) {
        if (!(breaks_[i] > breaks_[i - 1])) throw InputError("piecewise polynomial breaks must increase");
    }
}

PiecewisePolynomial PiecewisePolynomial::constant(double c) {
    return PiecewisePolynomial({0.0}, {Polynomial({c})});
}

std::size_t PiecewisePolynomial::piece_index(double x) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.begin()) return 0;
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double PiecewisePolynomial::value(double x) const { return pieces_[piece_index(x)].value(x); }

double PiecewisePolynomial::derivative(double x, int k) const {
    return pieces_[piece_index(x)].derivative(x, k);
}

double PiecewisePolynomial::quotient_by_r(double r) const {
    const auto& p = pieces_[piece_index(r)];
    const double a0 = p.coeffs()[0];
    return a0 == 0.0 ? p.quotient_by_r(r) : p.quotient_by_r(r) + a0 / r;
}

namespace {

template <class F>
double piecewise_sum(std::span<const double> breaks, std::span<const Polynomial> pieces, double a, double b,
                     F&& integrate) {
    if (b < a) return -piecewise_sum(breaks, pieces, b, a, integrate);
    double total = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double lo = (i == 0) ? -INFINITY : breaks[i];
        const double hi = (i + 1 < pieces.size()) ? breaks[i + 1] : INFINITY;
        const double left = std::max(a, lo);
        const double right = std::min(b, hi);
        if (right > left) total += integrate(pieces[i], left, right);
    }
    return total;
}

}  // namespace

double PiecewisePolynomial::integral(double a, double b) const {
    return piecewise_sum(breaks_, pieces_, a, b,
                         [](const Polynomial& p, double l, double r) { return p.integral(l, r); });
}

double PiecewisePolynomial::integral_over_r(double a, double b) const {
    return piecewise_sum(breaks_, pieces_, a, b,
                         [](const Polynomial& p, double l, double r) { return p.integral_over_r(l, r); });
}

double PiecewisePolynomial::max_jump() const {
    double jump = 0.0;
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        jump = std::max(jump, std::abs(pieces_[i].value(breaks_[i]) - pieces_[i - 1].value(breaks_[i])));
    }
    return jump;
}

}  // namespace icesim
