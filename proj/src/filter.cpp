#include "hrc/filter.hpp"

#include <array>
#include <cmath>

#include "hrc/sim.hpp"

namespace hrc {

void filter_moments(const ModelParams& prm, std::span<const double> p, Config z,
                    std::span<double> mu_bar, std::span<double> lam_bar) {
    for (int i = 0; i < prm.n; ++i) {
        double mb = 0.0, lb = 0.0;
        for (int k = 0; k < prm.m; ++k) {
            mb += p[k] * prm.mu(k, i);
            lb += p[k] * prm.lambda(k, z, i);
        }
        mu_bar[i] = mb;
        lam_bar[i] = lb;
    }
}

bool filter_step(const ModelParams& prm, std::span<double> p, Config z,
                 std::span<const double> dWo, double dt) {
    const int m = prm.m, n = prm.n;
    std::array<double, kMaxRegimes> next{};
    std::array<double, kMaxAssets> abar{}, lbar{};
    for (int i = 0; i < n; ++i) {
        if (defaulted(z, i)) continue;
        double a = 0.0, l = 0.0;
        for (int k = 0; k < m; ++k) {
            double lk = prm.lambda(k, z, i);
            a += p[k] * (prm.mu(k, i) + lk);
            l += p[k] * lk;
        }
        abar[i] = a / prm.vol[i];
        lbar[i] = l;
    }
    for (int k = 0; k < m; ++k) {
        double drift = 0.0;
        for (int j = 0; j < m; ++j) drift += prm.q(j, k) * p[j];
        double noise = 0.0;
        for (int i = 0; i < n; ++i) {
            if (defaulted(z, i)) continue;
            double lk = prm.lambda(k, z, i);
            double ak = (prm.mu(k, i) + lk) / prm.vol[i];
            noise += (ak - abar[i]) * (dWo[i] - abar[i] * dt) - (lk - lbar[i]) * dt;
        }
        next[k] = p[k] + drift * dt + p[k] * noise;
    }
    bool clamped = false;
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        if (next[k] < 0.0) {
            next[k] = 0.0;
            clamped = true;
        }
        total += next[k];
    }
    if (!(total > 0.0)) throw NumericalError("filter step lost all probability mass");
    for (int k = 0; k < m; ++k) p[k] = next[k] / total;
    return clamped;
}

void jump_update(const ModelParams& prm, std::span<double> p, Config z, int i) {
    double lbar = 0.0;
    for (int k = 0; k < prm.m; ++k) lbar += p[k] * prm.lambda(k, z, i);
    for (int k = 0; k < prm.m; ++k) p[k] = p[k] * prm.lambda(k, z, i) / lbar;
}

void check_prior(const ModelParams& prm, std::span<const double> p0) {
    if (int(p0.size()) != prm.m) throw ValidationError("prior must have m entries");
    double s = 0.0;
    for (double v : p0) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("prior must be interior");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-10) throw ValidationError("prior must sum to one");
}

PosteriorPath run_filter(const ModelParams& prm, std::span<const double> p0,
                         const MarketPath& path) {
    check_prior(prm, p0);
    const std::size_t K = path.steps();
    PosteriorPath out;
    out.m = prm.m;
    out.t = path.t;
    out.z = path.z;
    out.p.resize((K + 1) * prm.m);
    std::vector<double> p(p0.begin(), p0.end()), dW(prm.n);
    std::copy(p.begin(), p.end(), out.p.begin());
    for (std::size_t k = 0; k < K; ++k) {
        const double dt = path.t[k + 1] - path.t[k];
        const Config z = path.z[k];
        for (int i = 0; i < prm.n; ++i) dW[i] = path.obs_at(k + 1, i) - path.obs_at(k, i);
        if (filter_step(prm, p, z, dW, dt)) ++out.projections;
        const Config fresh = path.z[k + 1] & ~z;
        for (int i = 0; i < prm.n; ++i)
            if (defaulted(fresh, i)) jump_update(prm, p, z, i);
        std::copy(p.begin(), p.end(), out.p.begin() + (k + 1) * prm.m);
    }
    return out;
}

}  // namespace hrc
