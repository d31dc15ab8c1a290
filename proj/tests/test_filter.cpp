#include "doctest.h"

#include <cmath>
#include <numeric>

#include "hrc/filter.hpp"
#include "hrc/sim.hpp"
#include "support.hpp"

using namespace hrc;

TEST_SUITE("filter") {

TEST_CASE("posterior moments") {
    const ModelParams p = testing::reference_params();
    std::vector<double> pr = {0.25, 0.75};
    std::vector<double> mu(1), lam(1);
    filter_moments(p, pr, 0, mu, lam);
    CHECK(mu[0] == doctest::Approx(0.25 * 0.02 + 0.75 * 0.10).epsilon(1e-15));
    CHECK(lam[0] == doctest::Approx(0.25 * 0.05 + 0.75 * 0.20).epsilon(1e-15));
}

TEST_CASE("jump update hand example") {
    const ModelParams p = testing::reference_params();
    std::vector<double> pr = {0.5, 0.5};
    jump_update(p, pr, 0, 0);
    CHECK(pr[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(pr[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("jump update uses the pre-default intensities") {
    const ModelParams p = testing::contagion_params();
    std::vector<double> pr = {0.6, 0.4};
    jump_update(p, pr, 0b01, 1);
    const double a = 0.6 * 0.16, b = 0.4 * 0.35;
    CHECK(pr[0] == doctest::Approx(a / (a + b)).epsilon(1e-14));
    CHECK(pr[1] == doctest::Approx(b / (a + b)).epsilon(1e-14));
}

TEST_CASE("filter step stays on the simplex") {
    const ModelParams p = testing::three_regime_params();
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        auto pr = testing::random_simplex(3, rng);
        const double dt = trial % 2 ? 1e-3 : 0.05;
        std::vector<double> dw = {g(rng) * std::sqrt(dt) * 3.0};
        filter_step(p, pr, 0, dw, dt);
        double s = 0.0;
        for (double x : pr) {
            CHECK(x >= 0.0);
            s += x;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("symmetric innovations average to the drift of the filter") {
    // With dWo = a_bar dt +/- sqrt(dt) the diffusion term cancels in the mean.
    const ModelParams p = testing::reference_params();
    const double dt = 1e-3;
    std::vector<double> p0 = {0.3, 0.7}, mu(1), lam(1);
    filter_moments(p, p0, 0, mu, lam);
    const double abar = (mu[0] + lam[0]) / p.vol[0];
    std::vector<double> up = p0, dn = p0;
    std::vector<double> w1 = {abar * dt + std::sqrt(dt)}, w2 = {abar * dt - std::sqrt(dt)};
    CHECK_FALSE(filter_step(p, up, 0, w1, dt));
    CHECK_FALSE(filter_step(p, dn, 0, w2, dt));
    for (int k = 0; k < 2; ++k) {
        double gen = 0.0;
        for (int j = 0; j < 2; ++j) gen += p.q(j, k) * p0[j];
        const double expect = p0[k] + dt * (gen - p0[k] * (p.lambda(k, 0, 0) - lam[0]));
        CHECK(0.5 * (up[k] + dn[k]) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("defaulted assets carry no information") {
    const ModelParams p = testing::contagion_params();
    std::vector<double> a = {0.4, 0.6}, b = a;
    std::vector<double> w1 = {0.3, 0.02}, w2 = {-5.0, 0.02};
    filter_step(p, a, 0b01, w1, 1e-3);
    filter_step(p, b, 0b01, w2, 1e-3);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
}

TEST_CASE("single regime filter is constant") {
    const ModelParams p = testing::single_regime(0.05, 0.1, 0.2, 0.02, 1.0, 1.0);
    std::vector<double> pr = {1.0};
    std::vector<double> w = {0.7};
    filter_step(p, pr, 0, w, 1e-2);
    jump_update(p, pr, 0, 0);
    CHECK(pr[0] == 1.0);
}

TEST_CASE("filter along a simulated path") {
    const ModelParams p = testing::contagion_params();
    Rng rng = path_stream(3, 0);
    MarketSimOptions o;
    o.dt = 1e-3;
    o.steps = 500;
    const MarketPath path = simulate_market_path(p, 1, 0, o, rng);
    std::vector<double> p0 = {0.5, 0.5};
    const PosteriorPath post = run_filter(p, p0, path);
    REQUIRE(post.t.size() == path.t.size());
    for (std::size_t k = 0; k < post.t.size(); ++k) {
        CHECK(post.z[k] == path.z[k]);
        const double* q = post.at(k);
        CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(q[0] >= 0.0);
        CHECK(q[1] >= 0.0);
    }
}

TEST_CASE("prior validation") {
    const ModelParams p = testing::reference_params();
    std::vector<double> bad1 = {0.0, 1.0}, bad2 = {0.5, 0.6}, bad3 = {1.0};
    CHECK_THROWS_AS(check_prior(p, bad1), ValidationError);
    CHECK_THROWS_AS(check_prior(p, bad2), ValidationError);
    CHECK_THROWS_AS(check_prior(p, bad3), ValidationError);
    std::vector<double> ok = {0.5, 0.5};
    CHECK_NOTHROW(check_prior(p, ok));
}

}
