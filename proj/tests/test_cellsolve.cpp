#include <doctest.h>

#include <cmath>
#include <random>

#include "cell_oracle.hpp"
#include "icesim/cellsolve.hpp"
#include "icesim/errors.hpp"
#include "oracles.hpp"

using namespace icesim;

namespace {

ModelConstants loaded() {
    ModelConstants k;
    k.g = 0.1;
    k.k_gamma = 0.5;
    k.zeta_gamma = 0.5;
    return k;
}

}  // namespace

TEST_SUITE("cellsolve") {

TEST_CASE("coupling terms by hand substitution") {
    const TruncationFamily fam(MaterialModel::reference(), 4.0);
    const auto t = coupling_terms(0.0, 1.0, 1.0, 1.0, 0.3, 0.0, 0.0, fam);
    CHECK(t.A == doctest::Approx(1.0));
    CHECK(t.B == doctest::Approx(-2.0));
    CHECK(t.C == doctest::Approx(2.0));

    const auto ref = MaterialModel::reference();
    const MaterialModel flat("flat", ref.c_poly(), ref.c1_pieces(), Polynomial({1.5}), ref.kappa_poly(),
                             ref.gamma_pieces());
    const TruncationFamily ff(flat, 4.0);
    CHECK(coupling_terms(0.3, 0.7, 0.2, 1.0, 0.0, 0.0, 0.0, ff).C == 2.0);

    const auto cold = coupling_terms(0.0, 0.4, 0.4, -0.5, 0.0, 0.0, 0.0, fam);
    CHECK(cold.B == doctest::Approx(ref.c_prime(0.4) * (0.0 - (-0.5))));
}

TEST_CASE("scalar inclusion") {
    auto lin = [](double shift) {
        return ScalarResidual([shift](double x) { return std::make_pair(x + shift, 1.0); });
    };
    auto mid = solve_scalar_inclusion(lin(-0.5));
    CHECK(mid.chi == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.active == ActiveSet::Interior);
    auto lo = solve_scalar_inclusion(lin(1.0));
    CHECK(lo.chi == 0.0);
    CHECK(lo.active == ActiveSet::Lower);
    auto hi = solve_scalar_inclusion(lin(-2.0));
    CHECK(hi.chi == 1.0);
    CHECK(hi.active == ActiveSet::Upper);
    CHECK(solve_scalar_inclusion(lin(0.0)).chi == 0.0);
}

TEST_CASE("decreasing residual is refused") {
    CHECK_THROWS_AS(solve_scalar_inclusion([](double x) { return std::make_pair(0.5 - x, -1.0); }), TauTooLargeError);
}

TEST_CASE("nonlinear scalar inclusion matches bisection") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(rng), b = 1.0 + std::abs(u(rng));
        auto f = [&](double x) { return a + b * x + 0.3 * x * x * x; };
        auto res = solve_scalar_inclusion([&](double x) { return std::make_pair(f(x), b + 0.9 * x * x); });
        if (f(0.0) >= 0.0) CHECK(res.chi == 0.0);
        else if (f(1.0) <= 0.0) CHECK(res.chi == 1.0);
        else CHECK(res.chi == doctest::Approx(oracle::bisect(f, 0.0, 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("solve_cell fixed points from hand substitution") {
    const TruncationFamily fam(MaterialModel::reference(), 4.0);
    CellData still{1.0, 0.0, 1.0, 0.2, 1e-3, 0.0, 0.0};
    auto s = solve_cell(still, fam);
    CHECK(s.U == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.chi == 1.0);
    CHECK(s.active == ActiveSet::Upper);

    CellData ice{0.5, 1.0, 0.0, 0.0, 0.01, 0.0, 0.0};
    auto t = solve_cell(ice, fam);
    CHECK(t.chi == 0.0);
    CHECK(t.active == ActiveSet::Lower);
    CHECK(t.U == doctest::Approx(1.0 - 0.005 / 1.02).epsilon(1e-12));
    CHECK(t.U == doctest::Approx(0.995098).epsilon(1e-6));
    const auto r = oracle::cell_residual(ice, fam, t.U, 0.0);
    CHECK(r.phi2 == doctest::Approx(1.365).epsilon(1e-3));
    CHECK(std::abs(r.phi1) < 1e-10);
}

TEST_CASE("solve_cell matches the brute-force oracle") {
    const TruncationFamily fam(MaterialModel::reference(loaded()), 4.0);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const CellData c = oracle::random_cell(rng, fam);
        const auto s = solve_cell(c, fam);
        const auto b = oracle::brute_force(c, fam, 800);
        CHECK(std::abs(s.U - b.U) < 6e-3);
        CHECK(std::abs(s.chi - b.chi) < 6e-3);
        CHECK(s.chi >= 0.0);
        CHECK(s.chi <= 1.0);
        CHECK(oracle::merit(c, fam, s.U, s.chi) < 1e-20);
    }
}

TEST_CASE("solutions satisfy the inclusion exactly on random instances") {
    const TruncationFamily fam(MaterialModel::convex_blend(loaded()), 4.0);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const CellData c = oracle::random_cell(rng, fam);
        const auto s = solve_cell(c, fam);
        const auto r = oracle::cell_residual(c, fam, s.U, s.chi);
        CHECK(std::abs(c.tau * r.phi1) < 1e-10);
        if (s.chi > 0.0 && s.chi < 1.0) CHECK(std::abs(c.tau * r.phi2) < 1e-10);
        if (s.chi == 0.0) CHECK(r.phi2 >= -1e-10 / c.tau);
        if (s.chi == 1.0) CHECK(r.phi2 <= 1e-10 / c.tau);
    }
}

TEST_CASE("cell map is strongly monotone inside the time-step guard") {
    const TruncationFamily fam(MaterialModel::convex_blend(loaded()), 4.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const CellData c = oracle::random_cell(rng, fam);
        const double U1 = c.U_prev - 2 + 4 * u(rng), U2 = c.U_prev - 2 + 4 * u(rng);
        const double x1 = u(rng), x2 = u(rng);
        const auto a = cell_map(c, fam, U1, x1);
        const auto b = cell_map(c, fam, U2, x2);
        const double dot = (a.first - b.first) * (U1 - U2) + (a.second - b.second) * (x1 - x2);
        CHECK(dot > 0.0);
    }
}

TEST_CASE("volume coupling") {
    const TruncationFamily inert(MaterialModel::reference(), 4.0);
    const Grid g = Grid::slab(8, 1.0);
    std::vector<CellData> cells(8);
    for (int i = 0; i < 8; ++i) cells[i] = {0.6 + 0.05 * i, 0.1 * i - 0.3, 0.5, g.x3()[i], 1e-2, 0.0, 0.0};
    auto vc = solve_volume_coupling(cells, g, inert);
    CHECK(vc.evaluations == 1);
    std::vector<double> U;
    for (const auto& s : vc.solutions) U.push_back(s.U);
    CHECK(vc.U_Omega == doctest::Approx(integrate_field(g, U)).epsilon(1e-14));

    const TruncationFamily fam(MaterialModel::reference(loaded()), 4.0);
    auto psi = [&](double m) {
        auto sols = solve_cells_at(cells, m, fam);
        std::vector<double> u;
        for (const auto& s : sols) u.push_back(s.U);
        return integrate_field(g, u) - m;
    };
    auto coupled = solve_volume_coupling(cells, g, fam);
    CHECK(std::abs(psi(coupled.U_Omega)) < 1e-10);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
        double m1 = u(rng), m2 = u(rng);
        if (m1 > m2) std::swap(m1, m2);
        if (m2 - m1 > 1e-6) CHECK(psi(m1) > psi(m2));
    }

    const Grid one = Grid::slab(1, 1.0);
    std::vector<CellData> single{{0.8, 0.2, 0.4, 0.5, 1e-2, 0.0, 0.05}};
    auto vs = solve_volume_coupling(single, one, fam);
    auto psi1 = [&](double m) {
        CellData c = single[0];
        c.U_Omega = m;
        return solve_cell(c, fam).U - m;
    };
    CHECK(vs.U_Omega == doctest::Approx(oracle::bisect([&](double m) { return -psi1(m); }, -5.0, 5.0)).epsilon(1e-10));
}

}
