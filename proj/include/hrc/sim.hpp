#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hrc/model.hpp"
#include "hrc/rng.hpp"

namespace hrc {

struct RegimePath {
    std::vector<double> times;  // switch times, times[0] = start
    std::vector<int> states;    // state from times[j] until times[j+1]
    int state_at(double t) const;
};

// Event-clock simulation of the hidden chain on [t0, t1].
RegimePath simulate_regime_path(const ModelParams& prm, int k0, double t0, double t1, Rng& rng);

// Draws a regime from a probability vector.
int sample_regime(std::span<const double> p, Rng& rng);

// Market path under the physical measure, sampled on t_k = k dt.
struct MarketPath {
    int n = 0;
    std::vector<double> t;
    std::vector<int> regime;
    std::vector<Config> z;
    std::vector<double> log_price;  // (K+1) x n, pre-default price, frozen after default
    std::vector<double> obs;        // (K+1) x n, observation process stopped at default
    std::vector<double> default_time;  // +inf if the asset survives
    std::size_t steps() const { return t.size() - 1; }
    double obs_at(std::size_t k, int i) const { return obs[k * n + i]; }
};

struct MarketSimOptions {
    double dt = 1e-3;
    std::size_t steps = 1000;
    double t0 = 0.0;
    std::vector<double> log_price0;  // empty -> zeros
};

// Throws ValidationError if dt * max intensity exceeds 0.1.
MarketPath simulate_market_path(const ModelParams& prm, int k0, Config z0,
                                const MarketSimOptions& opt, Rng& rng);

// Rebuilds the observation process from log prices:
// W^o_i(t) = (log P_i(t) - log P_i(0)) / sigma_i + sigma_i t / 2 up to default.
std::vector<double> observations_from_prices(const ModelParams& prm, const MarketPath& path);

// Filter-state path under the reference measure: observations are standard
// Brownian motions stopped at default, defaults have unit intensity.
struct StatePath {
    int n = 0, m = 0;
    std::vector<double> t;
    std::vector<double> p;    // (K+1) x m
    std::vector<Config> z;    // (K+1)
    std::vector<double> dW;   // K x n observation increments (0 after default)
    std::vector<int> defaulter;  // K entries, -1 if no default in the step
    std::size_t steps() const { return t.size() - 1; }
    const double* p_at(std::size_t k) const { return p.data() + k * m; }
    const double* dW_at(std::size_t k) const { return dW.data() + k * n; }
};

StatePath simulate_pstar_path(const ModelParams& prm, std::span<const double> p0, Config z0,
                              double t0, double dt, std::size_t steps, Rng& rng);

// Density dP/dP* on the observation filtration along a reference-measure path:
// exp( sum int a dW^o - 1/2 int a^2 dt + int (1 - lam_bar) dt ) * prod lam_bar(tau-),
// with a = (mu_bar + lam_bar) / sigma over surviving assets. Returned in log form.
double log_girsanov_weight(const ModelParams& prm, const StatePath& path);
double girsanov_weight(const ModelParams& prm, const StatePath& path);
// Density dP*/dP = 1 / girsanov_weight.
double density_pstar(const ModelParams& prm, const StatePath& path);

// CSV: t, I, H, logP_1..n, Wo_1..n.
void write_path_csv(std::ostream& os, const MarketPath& path);

// Binary batch: magic "HRCPATH\0", u32 version, u32 n, u32 m, u32 K, u64 count,
// then per path and grid point: t, I, H, logP[n], Wo[n] as little-endian float64.
void write_path_batch(std::ostream& os, int m, std::span<const MarketPath> paths);
std::vector<MarketPath> read_path_batch(std::istream& is, int* m_out = nullptr);

}  // namespace hrc

