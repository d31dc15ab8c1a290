#pragma once

#include <array>
#include <span>

#include "hrc/model.hpp"

namespace hrc {

struct StatePath;

// Driver truncation. Exact: no cutoff. Truncated at level N: the quadratic
// penalty in xi is damped by a C^1 cutoff that is 1 on [-N,N] and 0 beyond
// N+2, and e^v is capped smoothly at N+1.
struct Truncation {
    bool active = false;
    double level = 0.0;
    static Truncation exact() { return {}; }
    static Truncation at(double n) { return {true, n}; }
};

double cutoff(double level, double x);      // 1 on |x|<=N, 0 on |x|>=N+2
double soft_cap(double level, double x);    // x on [0,N], N+1 beyond N+2

// Posterior moments at a filter state, reused by every driver evaluation there.
struct DriverPoint {
    Config z = 0;
    std::array<double, kMaxAssets> mu_bar{}, lam_bar{};
};
DriverPoint driver_point(const ModelParams& prm, std::span<const double> p, Config z);

// Portfolio-free part of the driver.
double h_leading(const ModelParams& prm, const DriverPoint& pt, std::span<const double> xi,
                 std::span<const double> v);

// Per-asset Hamiltonian term, strictly concave in pi on (-inf, 1). Zero for defaulted assets.
double h_asset(const ModelParams& prm, const DriverPoint& pt, int i, double pi, double xi,
               double v, const Truncation& tr);

struct AssetOptimum {
    double pi = 0.0;
    double value = 0.0;
    int iterations = 0;
};

// Safeguarded Newton on the first-order condition. Throws NumericalError on
// bracket failure or non-convergence.
AssetOptimum maximize_asset(const ModelParams& prm, const DriverPoint& pt, int i, double xi,
                            double v, const Truncation& tr, double guess = 0.0);

// f = h_leading + sum_i sup_pi h_asset. argmax (size n) receives the maximizers.
double driver_f(const ModelParams& prm, const DriverPoint& pt, std::span<const double> xi,
                std::span<const double> v, const Truncation& tr, double* argmax = nullptr);
// f(xi, v) - f(0, 0).
double driver_f_regularized(const ModelParams& prm, const DriverPoint& pt,
                            std::span<const double> xi, std::span<const double> v,
                            const Truncation& tr);

// Constants of the a priori estimates.
double bound_r1(const ModelParams& prm);
double bound_r3(const ModelParams& prm);
// Upper bound for |f(p, z, 0, 0)| in configuration z.
double zeta_rate(const ModelParams& prm, Config z);
// Bound for |zeta| on [t, T] started from configuration z.
double zeta_bound(const ModelParams& prm, double t, Config z);
// Radius containing every truncated maximizer.
double bound_rn(const ModelParams& prm, double level);
double bound_rn1(const ModelParams& prm, double level);
double bound_rn2(const ModelParams& prm, double level);
double bound_rn3(const ModelParams& prm, double level);
double lipschitz_bound(const ModelParams& prm, double level);
// Smallest integer level above exp(2 sup|zeta|).
double initial_truncation_level(const ModelParams& prm);

// zeta = int_{t_k0}^T f(p, H, 0, 0) du along a reference-measure path (left-point rule).
double terminal_zeta(const ModelParams& prm, const StatePath& path, std::size_t k0 = 0);

}  // namespace hrc
