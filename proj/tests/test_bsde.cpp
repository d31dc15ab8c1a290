#include "doctest.h"

#include <cmath>
#include <sstream>

#include "hrc/bsde.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

GridOptions small_grid(std::size_t steps = 200, int res = 41) {
    GridOptions o;
    o.steps = steps;
    o.resolution = res;
    return o;
}

DriverOverride constant_driver(double c) {
    return [c](const DriverPoint&, std::span<const double>, std::span<const double>) { return c; };
}

}  // namespace

TEST_SUITE("bsde") {

TEST_CASE("Gauss-Hermite moments") {
    std::vector<double> x, w;
    gauss_hermite(7, x, w);
    REQUIRE(x.size() == 7);
    const double expect[] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0, 0.0, 945.0};
    for (int d = 0; d <= 10; ++d) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * std::pow(x[j], d);
        CHECK(s == doctest::Approx(expect[d]).epsilon(1e-12).scale(1.0));
    }
    gauss_hermite(1, x, w);
    CHECK(x[0] == 0.0);
    CHECK(w[0] == 1.0);
}

TEST_CASE("simplex interpolation reproduces affine functions") {
    std::mt19937_64 rng(2);
    for (int m : {2, 3}) {
        const SimplexGrid g(m, m == 2 ? 11 : 9, 0.0);
        CHECK(g.size() == (m == 2 ? 11u : 45u));
        for (std::size_t j = 0; j < g.size(); ++j) {
            double s = 0.0;
            for (double x : g.node(j)) {
                CHECK(x >= 0.0);
                s += x;
            }
            CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        }
        for (int trial = 0; trial < 500; ++trial) {
            const auto p = testing::random_simplex(m, rng);
            const auto st = g.locate(p);
            double wsum = 0.0;
            std::vector<double> back(m, 0.0);
            for (int c = 0; c < st.count; ++c) {
                CHECK(st.w[c] >= -1e-14);
                wsum += st.w[c];
                for (int k = 0; k < m; ++k) back[k] += st.w[c] * g.node(st.idx[c])[k];
            }
            CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
            for (int k = 0; k < m; ++k) CHECK(back[k] == doctest::Approx(p[k]).epsilon(1e-12).scale(1.0));
        }
    }
    CHECK_THROWS_AS(SimplexGrid(4, 5, 0.0), ValidationError);
}

TEST_CASE("zero and constant drivers") {
    const ModelParams prm = testing::contagion_params();
    GridOptions o = small_grid(100, 21);
    o.driver = constant_driver(0.0);
    const GridSolution zero = solve_grid(prm, o);
    for (double y : zero.Y) CHECK(y == 0.0);
    for (double z : zero.Z) CHECK(z == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    o.driver = constant_driver(0.3);
    const GridSolution c = solve_grid(prm, o);
    for (std::size_t k = 0; k <= c.steps; k += 25)
        for (Config z = 0; z < 4; ++z)
            for (std::size_t j = 0; j < c.grid.size(); ++j)
                CHECK(c.y(k, z, j) == doctest::Approx(-0.3 * (prm.horizon - k * c.dt)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("bond-only closed form") {
    for (const ModelParams& prm : {testing::reference_params(), testing::contagion_params(),
                                   testing::three_regime_params()}) {
        GridOptions o = small_grid(100, prm.m == 3 ? 11 : 21);
        const GridSolution sol = solve_grid(prm, o);
        const Config all = Config(prm.num_configs() - 1);
        const double c = 0.5 * prm.rate * prm.risk_aversion;
        for (std::size_t k = 0; k <= sol.steps; ++k)
            for (std::size_t j = 0; j < sol.grid.size(); ++j)
                CHECK(std::abs(sol.y(k, all, j) + c * (prm.horizon - k * sol.dt)) < 1e-12);
    }
}

TEST_CASE("solver limits") {
    const ModelParams prm = testing::make_params({{"assets", 3},
                                                  {"regimes", 1},
                                                  {"generator", {{0.0}}},
                                                  {"drift", {{0.05, 0.05, 0.05}}},
                                                  {"intensity", {{0.1, 0.1, 0.1}}},
                                                  {"volatility", {0.2, 0.2, 0.2}},
                                                  {"rate", 0.0},
                                                  {"risk_aversion", 1.0},
                                                  {"horizon", 1.0}});
    CHECK_THROWS_AS(solve_grid(prm, small_grid()), ValidationError);
}

TEST_CASE("interpolation at nodes returns stored values") {
    const ModelParams prm = testing::reference_params();
    const GridSolution sol = solve_grid(prm, small_grid());
    for (std::size_t j = 0; j < sol.grid.size(); j += 5) {
        const auto e = sol.evaluate(10, sol.grid.node(j), 0);
        CHECK(e.y == doctest::Approx(sol.y(10, 0, j)).epsilon(1e-13));
    }
    CHECK(sol.step_of(0.0) == 0);
    CHECK(sol.step_of(prm.horizon) == sol.steps - 1);
    CHECK(sol.step_of(0.5 * prm.horizon) == sol.steps / 2);
}

TEST_CASE("monotone in the truncation level") {
    const ModelParams prm = testing::reference_params();
    GridOptions o = small_grid(200, 21);
    o.trunc = Truncation::at(1.0);
    const GridSolution a = solve_grid(prm, o);
    o.trunc = Truncation::at(2.0);
    const GridSolution b = solve_grid(prm, o);
    o.trunc = Truncation::exact();
    const GridSolution c = solve_grid(prm, o);
    for (std::size_t s = 0; s < a.Y.size(); ++s) {
        CHECK(b.Y[s] >= a.Y[s] - 1e-12);
        CHECK(c.Y[s] >= b.Y[s] - 1e-12);
    }
}

TEST_CASE("refinement schedule") {
    const ModelParams prm = testing::reference_params();
    RefinementTrace tr;
    const GridSolution sol = refine_truncation(prm, small_grid(100, 21), 1.0, 1e-10, 6, &tr);
    CHECK(tr.converged);
    CHECK(tr.levels.front() == 1.0);
    for (std::size_t j = 1; j < tr.levels.size(); ++j) CHECK(tr.levels[j] == 2 * tr.levels[j - 1]);
    for (double inc : tr.min_increase) CHECK(inc >= -1e-12);
    CHECK(tr.gaps.back() < 1e-10);
    CHECK(sol.trunc.level == tr.levels.back());
    CHECK_THROWS_AS(refine_truncation(prm, small_grid(50, 11), 1.0, 0.0, 2), NumericalError);
}

TEST_CASE("frozen reference value") {
    const ModelParams prm = testing::reference_params();
    GridOptions o;
    o.trunc = Truncation::exact();
    const GridSolution sol = solve_grid(prm, o);
    const std::vector<double> p0 = {0.5, 0.5};
    CHECK(sol.value(p0, 0) == doctest::Approx(-0.01134075968).epsilon(1e-8));
    CHECK(sol.value(p0, 1) == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("solution bounds") {
    for (const ModelParams& prm : {testing::reference_params(), testing::contagion_params()}) {
        const GridSolution sol = refine_truncation(prm, small_grid(200, 21), 0.0, 1e-10, 6);
        const BoundsReport b = check_solution_bounds(prm, sol);
        CHECK(b.y_ok);
        CHECK(b.v_ok);
        CHECK(b.bmo_ok);
        CHECK(b.y_sup <= b.zeta_sup + b.slack);
        CHECK(b.bmo_stat <= b.bmo_bound);
    }
}

TEST_CASE("three regimes") {
    const ModelParams prm = testing::three_regime_params();
    GridOptions o = small_grid(100, 15);
    const GridSolution sol = solve_grid(prm, o);
    const BoundsReport b = check_solution_bounds(prm, sol);
    CHECK(b.y_ok);
    const std::vector<double> p = {0.2, 0.3, 0.5};
    CHECK(std::isfinite(sol.value(p, 0)));
}

TEST_CASE("solution csv layout") {
    const ModelParams prm = testing::contagion_params();
    const GridSolution sol = solve_grid(prm, small_grid(20, 5));
    std::ostringstream os;
    write_solution_csv(os, sol, 10);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time,node,config,Y,Z_1,Z_2,V_1,V_2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 4 * int(sol.grid.size()));
    const auto meta = solution_metadata(prm, sol);
    CHECK(meta.contains("steps"));
}

TEST_CASE("regression solver with trivial drivers") {
    const ModelParams prm = testing::reference_params();
    LsmcOptions o;
    o.paths = 2000;
    o.steps = 10;
    o.p0 = {0.5, 0.5};
    o.driver = constant_driver(0.0);
    CHECK(std::abs(solve_lsmc(prm, o).y0) < 1e-14);
    o.driver = constant_driver(0.25);
    CHECK(solve_lsmc(prm, o).y0 == doctest::Approx(-0.25).epsilon(1e-12));
    o.z0 = 1;
    o.driver = nullptr;
    CHECK(solve_lsmc(prm, o).y0 == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("regression solver agrees with the grid for one regime") {
    const ModelParams prm = testing::single_regime(0.06, 0.15, 0.25, 0.02, 1.0, 1.0);
    const GridSolution g = solve_grid(prm, small_grid(400, 2));
    LsmcOptions o;
    o.paths = 20000;
    o.steps = 25;
    o.p0 = {1.0};
    const LsmcResult r = solve_lsmc(prm, o);
    const std::vector<double> p = {1.0};
    CHECK(std::abs(r.y0 - g.value(p, 0)) < 5e-3);
}

}
