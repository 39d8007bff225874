#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "icesim/simulation.hpp"
#include "icesim/stepper.hpp"
#include "oracles.hpp"

using namespace icesim;

namespace {

// Hand-written stabilization bound for the reference material (c' = 1, gamma = 1),
// with the truncated caloric functions continued past the cutoff B.
double reference_bound(double theta, double B) {
    const double q = std::min(theta, B);
    double latent_heat_part;  // e1^R - f1^R
    if (theta <= B) {
        latent_heat_part = theta * oracle::s1_ref(theta);
    } else {
        latent_heat_part = oracle::e1_ref(B) + B * B * (theta - B) - oracle::f1_ref(B);
    }
    const double latent = latent_heat_part + 2.0 * q;
    return (0.25 * q * q + 0.25 * latent * latent) / (theta * theta);
}

}  // namespace

TEST_SUITE("stepper") {

TEST_CASE("stabilization constant for the reference material") {
    const TruncationFamily fam(MaterialModel::reference(), 4.0);
    const double B = fam.cutoff();
    CHECK(B == doctest::Approx(3.7606).epsilon(1e-4));
    const int points = 4000;
    const double lo = std::log(1e-6), hi = std::log(1e3 * B);
    double sup = 0.0;
    for (int i = 0; i < points; ++i) sup = std::max(sup, reference_bound(std::exp(lo + (hi - lo) * i / (points - 1)), B));
    CHECK(minimal_cR(fam) == doctest::Approx(sup).epsilon(1e-12));
    CHECK(compute_cR(fam) == doctest::Approx(2.0 * sup).epsilon(1e-12));
    // The supremum is approached at large theta, where the bound tends to B^4/4.
    CHECK(minimal_cR(fam) <= 0.25 * std::pow(B, 4) * (1.0 + 1e-12));
    CHECK(minimal_cR(fam) >= 0.99 * 0.25 * std::pow(B, 4));
    CHECK(compute_cR(fam) >= 0.25);
    CHECK(compute_cR(fam) == doctest::Approx(99.9354).epsilon(1e-5));
}

TEST_CASE("stabilization constant is insensitive to grid refinement") {
    for (const auto& model : {MaterialModel::reference(), MaterialModel::convex_blend()}) {
        const TruncationFamily fam(model, 4.0);
        const double a = compute_cR(fam, 4000);
        const double b = compute_cR(fam, 16000);
        CHECK(std::abs(a - b) / b < 0.01);
    }
}

TEST_CASE("infinite phase viscosity leaves only the temperature term") {
    const auto ref = MaterialModel::reference();
    const MaterialModel stiff("stiff", ref.c_poly(), ref.c1_pieces(), ref.lambda_poly(), ref.kappa_poly(),
                              PiecewisePolynomial::constant(1e14));
    CHECK(compute_cR(TruncationFamily(stiff, 4.0)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("uniform temperature with zero source is a fixed point") {
    const Grid g = Grid::slab(20, 1.0);
    const TruncationFamily fam(MaterialModel::reference(), 4.0);
    ThetaSystem::Inputs in;
    in.grid = &g;
    in.family = &fam;
    in.c_R = 0.0;
    in.tau = 1e-2;
    in.theta_prev.assign(20, 0.8);
    in.chi_now.assign(20, 0.3);
    in.chi_prev.assign(20, 0.6);
    in.source.assign(20, 0.0);
    in.heat_transfer.assign(2, 1.0);
    in.theta_gamma.assign(2, 0.8);
    const ThetaSystem sys(in);
    const auto r = sys.residual(in.theta_prev);
    CHECK(*std::max_element(r.begin(), r.end()) == doctest::Approx(0.0).epsilon(1e-14));
    const auto s = solve_theta_step(sys, StepperConfig{});
    for (double th : s.theta) CHECK(th == doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("single-cell temperature solve matches scalar bisection") {
    const Grid g = Grid::slab(1, 1.0);
    const TruncationFamily fam(MaterialModel::reference(), 4.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ThetaSystem::Inputs in;
        in.grid = &g;
        in.family = &fam;
        in.c_R = 100.0 * u(rng);
        in.tau = std::pow(10.0, -3.0 + 2.0 * u(rng));
        in.theta_prev = {0.3 + 1.5 * u(rng)};
        in.chi_now = {u(rng)};
        in.chi_prev = {u(rng)};
        in.source = {-0.3 + 3.3 * u(rng)};
        in.heat_transfer = {2.0 * u(rng), 2.0 * u(rng)};
        in.theta_gamma = {0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng)};
        const ThetaSystem sys(in);
        const double tp = in.theta_prev[0];
        const double c = 1.0 + in.chi_now[0];
        auto f = [&](double th) {
            double r = c * (oracle::e1_ref(th) - oracle::e1_ref(tp)) / in.tau +
                       in.c_R * (th * std::max(th, 0.0) - tp * tp) - in.source[0];
            for (int b = 0; b < 2; ++b) r += in.heat_transfer[b] * (th - in.theta_gamma[b]);
            return r;
        };
        const double expect = oracle::bisect(f, -50.0, 3.5);
        const auto s = solve_theta_step(sys, StepperConfig{});
        CHECK(s.theta[0] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("assembled Jacobian matches finite differences") {
    const Grid g = Grid::slab(30, 1.0);
    const TruncationFamily fam(MaterialModel::convex_blend(), 4.0);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = fixture::random_theta_system(rng, g, fam, 50.0, 1e-3);
        CHECK(fixture::jacobian_fd_error(sys, rng) < 1e-6);
    }
    const Grid r = Grid::rectangle(6, 5, 2.0, 1.0);
    const auto sys = fixture::random_theta_system(rng, r, fam, 50.0, 1e-3);
    CHECK(fixture::jacobian_fd_error(sys, rng) < 1e-6);
}

TEST_CASE("stationary equilibrium is preserved") {
    auto cfg = fixture::load("stationary.json");
    cfg.T = 50 * cfg.tau;
    const Stepper st = make_stepper(cfg);
    SimState s = make_initial_state(cfg, st);
    const SimState s0 = s;
    for (int k = 0; k < 50; ++k) s = st.step(s);
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
        CHECK(std::abs(s.theta[i] - s0.theta[i]) <= 1e-12);
        CHECK(std::abs(s.U[i] - s0.U[i]) <= 1e-12);
        CHECK(s.chi[i] == s0.chi[i]);
    }
}

TEST_CASE("warmer boundary data gives warmer temperatures") {
    auto cold = fixture::load("freezing.json");
    cold.T = 100 * cold.tau;
    auto warm = cold;
    warm.theta_gamma = {{"all", TimeSeries::constant(0.9)}};
    const auto a = run_simulation(cold, make_stepper(cold));
    const auto b = run_simulation(warm, make_stepper(warm));
    REQUIRE(a.completed);
    REQUIRE(b.completed);
    const auto& ta = a.trajectory.back().theta;
    const auto& tb = b.trajectory.back().theta;
    CHECK(*std::min_element(tb.begin(), tb.end()) > *std::min_element(ta.begin(), ta.end()));
}

TEST_CASE("runs are deterministic") {
    auto cfg = fixture::load("freezing.json");
    cfg.T = 50 * cfg.tau;
    const Stepper st = make_stepper(cfg);
    const auto a = run_simulation(cfg, st);
    const auto b = run_simulation(cfg, st);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
        CHECK(a.trajectory[k].theta == b.trajectory[k].theta);
        CHECK(a.trajectory[k].U == b.trajectory[k].U);
        CHECK(a.trajectory[k].chi == b.trajectory[k].chi);
    }
}

TEST_CASE("c_R override below the lower-bound requirement is flagged") {
    auto cfg = fixture::load("freezing.json");
    const Stepper st = make_stepper(cfg, 1.0);
    CHECK(st.c_R() == 1.0);
    CHECK(st.c_R_below_min());
    CHECK_FALSE(make_stepper(cfg).c_R_below_min());
}

}
