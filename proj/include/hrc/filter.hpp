#pragma once

#include <span>
#include <vector>

#include "hrc/model.hpp"

namespace hrc {

struct MarketPath;

// Posterior means of drift and intensity for every asset.
void filter_moments(const ModelParams& prm, std::span<const double> p, Config z,
                    std::span<double> mu_bar, std::span<double> lam_bar);

// One Euler step of the continuous part of the filter, driven by observation
// increments dWo (entries of defaulted assets are ignored). The result is
// clamped at zero and renormalized; returns true if clamping was needed.
bool filter_step(const ModelParams& prm, std::span<double> p, Config z,
                 std::span<const double> dWo, double dt);

// Posterior update at the default of asset i (z is the pre-default configuration).
void jump_update(const ModelParams& prm, std::span<double> p, Config z, int i);

struct PosteriorPath {
    int m = 0;
    std::vector<double> t;
    std::vector<double> p;  // (K+1) x m
    std::vector<Config> z;
    int projections = 0;
    const double* at(std::size_t k) const { return p.data() + k * m; }
};

// Runs the filter along the observables of a simulated market path.
PosteriorPath run_filter(const ModelParams& prm, std::span<const double> p0,
                         const MarketPath& path);

// Throws ValidationError unless p is a strictly positive probability vector.
void check_prior(const ModelParams& prm, std::span<const double> p0);

}  // namespace hrc
