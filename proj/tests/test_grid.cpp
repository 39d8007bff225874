#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "icesim/boundary.hpp"
#include "icesim/errors.hpp"
#include "icesim/grid.hpp"
#include "icesim/parallel.hpp"

using namespace icesim;

TEST_SUITE("grid") {

TEST_CASE("slab geometry") {
    const Grid g = Grid::slab(4, 2.0);
    CHECK(g.cell_count() == 4);
    CHECK(g.measure() == doctest::Approx(2.0));
    CHECK(g.boundary_measure() == doctest::Approx(2.0));
    CHECK(g.x3()[0] == doctest::Approx(0.25));
    CHECK(g.x3()[3] == doctest::Approx(1.75));
    REQUIRE(g.boundary().size() == 2);
    CHECK(g.boundary()[0].x3 == 0.0);
    CHECK(g.boundary()[1].x3 == 2.0);
    CHECK(g.faces().size() == 3);
    CHECK_THROWS_AS(Grid::slab(0, 1.0), InputError);
}

TEST_CASE("rectangle geometry") {
    const Grid g = Grid::rectangle(3, 2, 1.5, 1.0);
    CHECK(g.cell_count() == 6);
    CHECK(g.measure() == doctest::Approx(1.5));
    CHECK(g.boundary_measure() == doctest::Approx(5.0));
    CHECK(g.faces().size() == 2 * 2 + 3 * 1);
    CHECK(g.index(2, 1) == 5);
}

TEST_CASE("integrate_field") {
    const Grid g = Grid::slab(10, 2.0);
    CHECK(integrate_field(g, std::vector<double>(10, 1.0)) == doctest::Approx(2.0));
    CHECK(integrate_field(g, std::vector<double>(10, 0.0)) == 0.0);
    const Grid h = Grid::slab(100, 1.0);
    std::vector<double> x(h.x3().begin(), h.x3().end());
    CHECK(std::abs(integrate_field(h, x) - 0.5) < 1e-4);
    CHECK_THROWS_AS(integrate_field(h, std::vector<double>(3, 1.0)), InputError);
}

TEST_CASE("stiffness operator") {
    const Grid g = Grid::rectangle(5, 4, 1.0, 2.0);
    const std::size_t n = static_cast<std::size_t>(g.cell_count());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> kappa(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) kappa[i] = u(rng), a[i] = u(rng), b[i] = u(rng);
    for (double v : stiffness_apply(g, kappa, std::vector<double>(n, 3.0))) CHECK(std::abs(v) < 1e-14);
    CHECK(stiffness_form(g, kappa, a, b) == doctest::Approx(stiffness_form(g, kappa, b, a)).epsilon(1e-12));
    CHECK(stiffness_form(g, kappa, a, a) > 0.0);

    const Grid s = Grid::slab(200, 1.0);
    std::vector<double> sq(200), ones(200, 1.0);
    for (int i = 0; i < 200; ++i) sq[i] = s.x3()[i] * s.x3()[i];
    const auto r = stiffness_apply(s, ones, sq);
    for (int i = 1; i < 199; ++i) CHECK(r[i] == doctest::Approx(-2.0 * s.volumes()[i]).epsilon(1e-8));
    CHECK_THROWS_AS(stiffness_apply(s, std::vector<double>(200, 0.0), sq), InputError);
}

TEST_CASE("boundary exchange") {
    const Grid g = Grid::slab(10, 1.0);
    const std::vector<double> theta(10, 0.7);
    auto same = boundary_exchange(g, theta, std::vector<double>{1.0, 1.0}, std::vector<double>{0.7, 0.7});
    CHECK(same.total == 0.0);
    auto none = boundary_exchange(g, theta, std::vector<double>{0.0, 0.0}, std::vector<double>{0.1, 5.0});
    CHECK(none.total == 0.0);
    std::vector<double> t2(10, 1.0);
    t2[0] = 0.6;
    t2[9] = 0.3;
    auto two = boundary_exchange(g, t2, std::vector<double>{1.0, 1.0}, std::vector<double>{0.5, 0.5});
    CHECK(two.total == doctest::Approx(-0.1));
    CHECK(two.per_cell[0] == doctest::Approx(0.1));
    CHECK(two.per_cell[9] == doctest::Approx(-0.2));
}

TEST_CASE("boundary elasticity and pressure") {
    const Grid g = Grid::slab(5, 1.0);
    std::vector<ElasticSample> s;
    for (const auto& b : g.boundary()) s.push_back({1.0, b.x3, b.measure});
    auto e = kgamma_from_elasticity(s);
    CHECK(e.k_gamma == doctest::Approx(0.5));
    CHECK(e.zeta_gamma == doctest::Approx(0.5));
    const std::vector<ElasticSample> one{{2.0, 0.3, 1.0}};
    e = kgamma_from_elasticity(one);
    CHECK(e.k_gamma == doctest::Approx(0.5));
    CHECK(e.zeta_gamma == doctest::Approx(0.3));

    const Grid r = Grid::rectangle(4, 4, 2.0, 1.0);
    s.clear();
    double mean = 0.0;
    for (const auto& b : r.boundary()) {
        s.push_back({0.5, b.x3, b.measure});
        mean += b.x3 * b.measure;
    }
    mean /= r.boundary_measure();
    e = kgamma_from_elasticity(s);
    CHECK(e.k_gamma == doctest::Approx(1.0 / (0.5 * 6.0)));
    CHECK(e.zeta_gamma == doctest::Approx(mean));
    CHECK_THROWS_AS(kgamma_from_elasticity(std::vector<ElasticSample>{{-1.0, 0.0, 1.0}}), InputError);

    CHECK(pressure_recovery(1.0, 0.0, -0.2, 0.2, 1.0, 0.0) == doctest::Approx(0.0));
    CHECK(pressure_recovery(1.0, 0.0, 0.2, 0.1, 1.0, 0.0) == doctest::Approx(0.3));
    CHECK(pressure_recovery(0.0, 0.5, 0.0, 0.0, 1.0, 0.1) == doctest::Approx(0.05));
    CHECK(volume_from_pressure(2.0, 0.5, pressure_recovery(2.0, 0.5, 0.7, 0.1, 1.0, 0.1), 0.1, 1.0, 0.1) ==
          doctest::Approx(0.7));
}

TEST_CASE("field rows") {
    const Grid g = Grid::slab(2, 1.0);
    std::vector<double> f{1.0, 2.0};
    std::ostringstream os;
    write_field_rows(os, g, {"f"}, {&f});
    CHECK(os.str() == "index,x1,x3,f\n0,0,0.25,1\n1,0,0.75,2\n");
}

TEST_CASE("time series") {
    const TimeSeries ts({{0.0, 1.0}, {1.0, 3.0}});
    CHECK(ts.value(0.5) == doctest::Approx(2.0));
    CHECK(ts.value(-1.0) == 1.0);
    CHECK(ts.value(5.0) == 3.0);
    CHECK(ts.covers(0.0, 1.0));
    CHECK_FALSE(ts.covers(0.0, 2.0));
    CHECK(TimeSeries::constant(2.0).covers(-1e9, 1e9));
    CHECK(ts.shifted(0.5).value(1.0) == doctest::Approx(3.5));
    CHECK(ts.min_value() == 1.0);
    CHECK(ts.max_value() == 3.0);
    CHECK_THROWS_AS(TimeSeries({{1.0, 0.0}, {0.5, 1.0}}), InputError);
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS(parallel_for(10, [](std::size_t i) {
        if (i == 3) throw std::runtime_error("boom");
    }));
}

}
