#include "doctest.h"

#include <cmath>

#include "hrc/portfolio.hpp"
#include "support.hpp"

using namespace hrc;

namespace {

GridSolution quick_solution(const ModelParams& prm) {
    GridOptions o;
    o.steps = 100;
    o.resolution = 41;
    return refine_truncation(prm, o, 0.0, 1e-10, 6);
}

}  // namespace

TEST_SUITE("portfolio") {

TEST_CASE("log wealth step") {
    const ModelParams prm = testing::single_regime(0.05, 0.1, 0.2, 0.02, 1.0, 1.0);
    std::vector<double> pi = {0.5}, dw = {0.1};
    CHECK(log_wealth_step(prm, pi, 0, dw, 0, 0.01) == doctest::Approx(0.01005).epsilon(1e-14));
    CHECK(log_wealth_step(prm, pi, 0, dw, 1, 0.01) ==
          doctest::Approx(0.01005 + std::log(0.5)).epsilon(1e-14));
    // A defaulted asset holds nothing: the whole wealth earns the rate.
    CHECK(log_wealth_step(prm, pi, 1, dw, 0, 0.01) == doctest::Approx(0.0002).epsilon(1e-14));
}

TEST_CASE("bond-only objective is deterministic") {
    const ModelParams prm = testing::reference_params();
    const GridSolution sol = quick_solution(prm);
    SimulationOptions so;
    so.paths = 500;
    so.p0 = {0.5, 0.5};
    const Estimate e = estimate_objective(prm, sol, StrategyRule::zero(), so);
    CHECK(e.mean == doctest::Approx(std::exp(-0.01)).epsilon(1e-13));
    CHECK(e.se == 0.0);
    so.z0 = 1;
    const Estimate d = estimate_objective(prm, sol, StrategyRule::optimal(), so);
    CHECK(d.mean == doctest::Approx(std::exp(-0.01)).epsilon(1e-13));
    CHECK(d.se == 0.0);
}

TEST_CASE("bond-only verification passes with zero error") {
    const ModelParams prm = testing::contagion_params();
    const GridSolution sol = quick_solution(prm);
    SimulationOptions so;
    so.paths = 200;
    so.p0 = {0.5, 0.5};
    so.z0 = 0b11;
    const VerificationReport rep = verification_report(prm, sol, so);
    CHECK(rep.optimal.se == 0.0);
    CHECK(rep.identity_ok);
    CHECK(rep.martingale_ok);
    CHECK(rep.all_ok());
}

TEST_CASE("strategy attains the driver") {
    const ModelParams prm = testing::contagion_params();
    const GridSolution sol = quick_solution(prm);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = testing::random_simplex(2, rng);
        const Config z = Config(trial % 3);
        const std::size_t k = std::size_t(trial % 100);
        std::vector<double> pi(2, 0.0);
        optimal_strategy(prm, sol, k, p, z, StrategyRule::optimal(), pi);
        const auto e = sol.evaluate(k, p, z);
        const auto pt = driver_point(prm, p, z);
        std::span<const double> xi(e.z.data(), 2), v(e.v.data(), 2);
        double h = h_leading(prm, pt, xi, v);
        for (int i = 0; i < 2; ++i) {
            h += h_asset(prm, pt, i, pi[i], xi[i], v[i], sol.trunc);
            if (defaulted(z, i)) CHECK(pi[i] == 0.0);
        }
        CHECK(h == doctest::Approx(driver_f(prm, pt, xi, v, sol.trunc)).epsilon(1e-10).scale(1.0));
        std::vector<double> scaled(2, 0.0);
        optimal_strategy(prm, sol, k, p, z, StrategyRule::scaled(0.8, "s"), scaled);
        for (int i = 0; i < 2; ++i) CHECK(scaled[i] == doctest::Approx(0.8 * pi[i]).epsilon(1e-12));
    }
}

TEST_CASE("physical and weighted estimators agree") {
    const ModelParams prm = testing::reference_params();
    const GridSolution sol = quick_solution(prm);
    SimulationOptions so;
    so.paths = 4000;
    so.seed = 5;
    so.p0 = {0.5, 0.5};
    const Estimate a = estimate_objective(prm, sol, StrategyRule::optimal(), so);
    const Estimate b = estimate_objective_pstar(prm, sol, StrategyRule::optimal(), so);
    CHECK(std::abs(a.mean - b.mean) < 4 * std::hypot(a.se, b.se));
}

TEST_CASE("a corrupted solution fails the identity check") {
    const ModelParams prm = testing::reference_params();
    GridSolution sol = quick_solution(prm);
    for (double& y : sol.Y) y += 0.1;
    SimulationOptions so;
    so.paths = 2000;
    so.p0 = {0.5, 0.5};
    const VerificationReport rep = verification_report(prm, sol, so);
    CHECK_FALSE(rep.identity_ok);
    CHECK_FALSE(rep.all_ok());
    const auto j = report_to_json(rep);
    CHECK(j["identity_ok"] == false);
}

TEST_CASE("measure consistency on a small sample") {
    const ModelParams prm = testing::contagion_params();
    SimulationOptions so;
    so.paths = 4000;
    so.seed = 9;
    so.p0 = {0.5, 0.5};
    const auto rows = measure_consistency(prm, 0.01, 50, so);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(std::abs(r.physical.mean - r.weighted.mean) < 4 * std::hypot(r.physical.se, r.weighted.se));
}

}
