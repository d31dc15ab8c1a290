#pragma once

#include <cmath>
#include <algorithm>
#include <random>
#include <utility>

#include "hrc/model.hpp"

namespace testing {

inline hrc::ModelParams make_params(const nlohmann::json& j) {
    hrc::ModelParams p = hrc::params_from_json(j);
    hrc::validate_params(p);
    return p;
}

// One asset, two regimes, symmetric switching.
inline hrc::ModelParams reference_params() {
    return make_params({{"assets", 1},
                        {"regimes", 2},
                        {"generator", {{-0.5, 0.5}, {0.5, -0.5}}},
                        {"drift", {{0.02}, {0.10}}},
                        {"intensity", {{0.05}, {0.20}}},
                        {"volatility", {0.2}},
                        {"rate", 0.02},
                        {"risk_aversion", 1.0},
                        {"horizon", 1.0}});
}

inline hrc::ModelParams single_regime(double mu, double lam, double sigma, double r, double theta,
                                      double horizon) {
    return make_params({{"assets", 1},
                        {"regimes", 1},
                        {"generator", {{0.0}}},
                        {"drift", {{mu}}},
                        {"intensity", {{lam}}},
                        {"volatility", {sigma}},
                        {"rate", r},
                        {"risk_aversion", theta},
                        {"horizon", horizon}});
}

// Two assets, two regimes, intensities raised after the other asset defaults.
inline hrc::ModelParams contagion_params() {
    return make_params({{"assets", 2},
                        {"regimes", 2},
                        {"generator", {{-0.4, 0.4}, {0.6, -0.6}}},
                        {"drift", {{0.03, 0.05}, {0.08, -0.02}}},
                        {"intensity",
                         {{{0.05, 0.08}, {0.05, 0.16}, {0.10, 0.08}, {0.10, 0.16}},
                          {{0.15, 0.20}, {0.15, 0.35}, {0.30, 0.20}, {0.30, 0.35}}}},
                        {"volatility", {0.25, 0.3}},
                        {"rate", 0.01},
                        {"risk_aversion", 2.0},
                        {"horizon", 0.5}});
}

// Three regimes, one asset.
inline hrc::ModelParams three_regime_params() {
    return make_params({{"assets", 1},
                        {"regimes", 3},
                        {"generator", {{-0.6, 0.4, 0.2}, {0.3, -0.5, 0.2}, {0.1, 0.4, -0.5}}},
                        {"drift", {{0.01}, {0.06}, {0.12}}},
                        {"intensity", {{0.04}, {0.10}, {0.25}}},
                        {"volatility", {0.25}},
                        {"rate", 0.01},
                        {"risk_aversion", 1.5},
                        {"horizon", 0.5}});
}

inline std::vector<double> random_simplex(int m, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(m);
    double s = 0.0;
    for (auto& x : p) s += (x = e(rng) + 1e-3);
    for (auto& x : p) x /= s;
    return p;
}

}  // namespace testing

namespace testing {

// Grid search of a concave function of one variable on [lo, hi]: step 1e-3,
// then step 1e-6 around the best coarse point. Returns {argmax, max}.
template <class F>
std::pair<double, double> brute_max(F&& h, double lo, double hi) {
    double best_x = lo, best = h(lo);
    const long coarse = long(std::ceil((hi - lo) / 1e-3));
    for (long j = 0; j <= coarse; ++j) {
        const double x = std::min(lo + j * 1e-3, hi);
        const double v = h(x);
        if (v > best) best = v, best_x = x;
    }
    const double a = std::max(lo, best_x - 1e-3), b = std::min(hi, best_x + 1e-3);
    for (long j = 0; j <= 2000; ++j) {
        const double x = std::min(a + j * 1e-6, b);
        const double v = h(x);
        if (v > best) best = v, best_x = x;
    }
    return {best_x, best};
}

}  // namespace testing
