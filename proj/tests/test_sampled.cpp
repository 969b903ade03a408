#include <doctest.h>

#include <cmath>

#include "idel/grid.hpp"
#include "idel/rng.hpp"

using namespace idel;

TEST_CASE("grid cells are half-open and integer-indexed") {
    const Grid g = Grid::over(-1.0, 0.0, 0.125);
    CHECK(g.count() == 8);
    CHECK(g.first_cell() == -8);
    CHECK(g.cell_containing(-1.0) == -8);
    CHECK(g.cell_containing(-1e-12) == 0);   // snaps to the edge, half-open below
    CHECK(g.cell_containing(-0.0626) == -1);
    CHECK(g.aligned(-0.5));
    CHECK(!g.aligned(-0.51));
    CHECK_THROWS_AS(Grid::over(0.0, 1.0, 0.3), alignment_error);
}

TEST_CASE("sup_norm basics") {
    const Grid g = Grid::over(0.0, 1.0, 0.25);
    CHECK(SampledFn(g, 1).sup_norm() == 0.0);

    SampledFn f(Grid(1.0, 0, 3), 1, {1.0, -3.0, 2.0});
    CHECK(f.sup_norm() == 3.0);

    // f(z) = z sampled at midpoints of 10 cells on (0,1]: sup is 0.95
    const Grid z = Grid::over(0.0, 1.0, 0.1);
    const SampledFn ramp = SampledFn::sample_scalar(z, [](double t) { return t; });
    CHECK(ramp.sup_norm() == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("integrate is exact for cell functions") {
    const Grid g = Grid::over(0.0, 1.0, 0.125);
    const SampledFn c = SampledFn::constant(g, 0.7);
    CHECK(c.integrate_scalar(0.0, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(c.integrate_scalar(0.3, 0.3) == 0.0);

    // midpoint-sampled identity integrates to exactly 1/2 for even counts
    for (int K : {2, 8, 64, 256}) {
        const Grid zg = Grid::over(0.0, 1.0, 1.0 / K);
        const SampledFn ramp = SampledFn::sample_scalar(zg, [](double t) { return t; });
        CHECK(ramp.integrate_scalar(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    }

    CHECK_THROWS_AS(c.integrate(-0.5, 0.5), domain_error);
}

TEST_CASE("integrate is additive over subdivision points") {
    SplitMix64 rng(7);
    const Grid g = Grid::over(-2.0, 2.0, 0.03125);
    std::vector<double> vals;
    for (std::int64_t k = 0; k < g.count(); ++k) vals.push_back(rng.next_in(-5.0, 5.0));
    const SampledFn f(g, 1, std::move(vals));
    for (int i = 0; i < 50; ++i) {
        double a = rng.next_in(-2.0, 2.0);
        double c = rng.next_in(-2.0, 2.0);
        if (a > c) std::swap(a, c);
        const double b = a + (c - a) * rng.next_unit();
        const double whole = f.integrate_scalar(a, c);
        const double split = f.integrate_scalar(a, b) + f.integrate_scalar(b, c);
        CHECK(whole == doctest::Approx(split).epsilon(1e-13));
    }
}

TEST_CASE("window and shift") {
    const Grid g = Grid::over(0.0, 2.0, 0.25);
    const SampledFn f = SampledFn::sample_scalar(g, [](double t) { return t * t; });

    const SampledFn whole = f.window(0.0, 2.0);
    CHECK(whole.sup_diff(f) == 0.0);

    const SampledFn tail = f.window(1.0, 2.0);
    CHECK(tail.grid().count() == 4);
    // window + sup equals the sup over the covered cells
    double manual = 0.0;
    for (std::int64_t k = 4; k < 8; ++k) manual = std::max(manual, std::abs(f.cell(k)[0]));
    CHECK(tail.sup_norm() == manual);

    const SampledFn hist = tail.shifted(-2.0);
    CHECK(hist.grid().t_start() == doctest::Approx(-1.0));
    CHECK(hist.grid().t_end() == doctest::Approx(0.0));

    CHECK_THROWS_AS(f.window(0.1, 1.0), alignment_error);
}

TEST_CASE("append extends by one cell") {
    const Grid g = Grid::over(0.0, 0.5, 0.25);
    SampledFn f(g, 1, {1.0, -2.0});
    const SampledFn f2 = f.append(5.0);
    CHECK(f2.grid().count() == 3);
    CHECK(f2.sup_norm() == 5.0);
    CHECK(f2.sup_norm() == std::max(f.sup_norm(), 5.0));

    SampledFn zeros = f;
    for (int i = 0; i < 4; ++i) zeros = zeros.append(0.0);
    CHECK(zeros.sup_norm() == f.sup_norm());

    const double bad = std::nan("");
    CHECK_THROWS_AS(f.append(bad), data_error);
}

TEST_CASE("window of append commutes with cell indexing") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t n = 3 + static_cast<std::int64_t>(rng.next_unit() * 10);
        std::vector<double> vals;
        for (std::int64_t k = 0; k < n; ++k) vals.push_back(rng.next_in(-1.0, 1.0));
        const SampledFn f(Grid(0.5, -n, n), 1, std::move(vals));
        const double v = rng.next_in(-1.0, 1.0);
        const SampledFn g = f.append(v);
        for (std::int64_t k = f.grid().first_cell(); k < f.grid().first_cell() + n; ++k) {
            CHECK(g.cell(k)[0] == f.cell(k)[0]);
        }
        CHECK(g.cell(f.grid().first_cell() + n)[0] == v);
    }
}

TEST_CASE("sup_diff is zero only for cell-wise equality") {
    const Grid g = Grid::over(0.0, 1.0, 0.25);
    SampledFn f(g, 2, {1, 2, 3, 4, 5, 6, 7, 8});
    SampledFn h = f;
    CHECK(f.sup_diff(h) == 0.0);
    SampledFn k(g, 2, {1, 2, 3, 4.0001, 5, 6, 7, 8});
    CHECK(f.sup_diff(k) > 0.0);
}

TEST_CASE("csv serialization carries full precision") {
    const Grid g = Grid::over(0.0, 0.5, 0.25);
    const SampledFn f(g, 2, {0.1, 1.0 / 3.0, -2e-17, 4.0});
    const std::string csv = f.to_csv();
    CHECK(csv.find("t_lo,t_hi,v_1,v_2") == 0);
    CHECK(csv.find("0.33333333333333331") != std::string::npos);
    CHECK(csv.find("-2.0000000000000001e-17") != std::string::npos);
}

TEST_CASE("refined splits cells and preserves values") {
    const SampledFn f(Grid(0.5, -2, 2), 1, {3.0, -1.0});
    const SampledFn r = f.refined(2);
    CHECK(r.grid().count() == 4);
    CHECK(r.grid().step() == doctest::Approx(0.25));
    CHECK(r.cell(-4)[0] == 3.0);
    CHECK(r.cell(-3)[0] == 3.0);
    CHECK(r.cell(-2)[0] == -1.0);
    CHECK(r.integrate_scalar(-1.0, 0.0) == doctest::Approx(f.integrate_scalar(-1.0, 0.0)));
}
