#include "hrc/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "hrc/filter.hpp"
#include "hrc/sim.hpp"

namespace hrc {

double cutoff(double level, double x) {
    const double ax = std::abs(x);
    if (ax <= level) return 1.0;
    if (ax >= level + 2.0) return 0.0;
    const double u = 0.5 * (ax - level);
    return 1.0 - u * u * (3.0 - 2.0 * u);
}

double soft_cap(double level, double x) {
    if (x <= level) return x;
    if (x >= level + 2.0) return level + 1.0;
    const double d = x - level;
    return x - 0.25 * d * d;
}

DriverPoint driver_point(const ModelParams& prm, std::span<const double> p, Config z) {
    DriverPoint pt;
    pt.z = z;
    filter_moments(prm, p, z, pt.mu_bar, pt.lam_bar);
    return pt;
}

double h_leading(const ModelParams& prm, const DriverPoint& pt, std::span<const double> xi,
                 std::span<const double> v) {
    double h = 0.5 * prm.rate * prm.risk_aversion;
    for (int i = 0; i < prm.n; ++i) {
        if (defaulted(pt.z, i)) continue;
        h += -xi[i] * (pt.mu_bar[i] + pt.lam_bar[i]) / prm.vol[i] + v[i];
    }
    return h;
}

namespace {

struct AssetTerms {
    double gain;     // (mu_bar + lam_bar - r)
    double damp;     // weight on the xi penalty
    double lam;      // lam_bar
    double jump;     // e^v, possibly capped
};

AssetTerms asset_terms(const ModelParams& prm, const DriverPoint& pt, int i, double xi, double v,
                       const Truncation& tr) {
    AssetTerms a;
    a.gain = pt.mu_bar[i] + pt.lam_bar[i] - prm.rate;
    a.lam = pt.lam_bar[i];
    const double ev = std::exp(v);
    if (tr.active) {
        a.damp = cutoff(tr.level, xi);
        a.jump = soft_cap(tr.level, ev);
    } else {
        a.damp = 1.0;
        a.jump = ev;
    }
    return a;
}

double asset_value(const ModelParams& prm, double s, const AssetTerms& a, double pi, double xi) {
    const double th = prm.risk_aversion;
    const double dev = 0.5 * th * s * pi - xi;
    return -0.25 * th * s * s * pi * pi + 0.5 * th * a.gain * pi - 0.5 * a.damp * dev * dev +
           a.lam - a.lam * std::exp(-0.5 * th * std::log1p(-pi)) * a.jump;
}

}  // namespace

double h_asset(const ModelParams& prm, const DriverPoint& pt, int i, double pi, double xi,
               double v, const Truncation& tr) {
    if (defaulted(pt.z, i)) return 0.0;
    if (!(pi < 1.0)) return -std::numeric_limits<double>::infinity();
    return asset_value(prm, prm.vol[i], asset_terms(prm, pt, i, xi, v, tr), pi, xi);
}

AssetOptimum maximize_asset(const ModelParams& prm, const DriverPoint& pt, int i, double xi,
                            double v, const Truncation& tr, double guess) {
    AssetOptimum out;
    if (defaulted(pt.z, i)) return out;
    const double th = prm.risk_aversion, s = prm.vol[i];
    const AssetTerms a = asset_terms(prm, pt, i, xi, v, tr);
    // First-order condition F(pi) = 0, F strictly decreasing on (-inf, 1).
    const double c0 = a.gain + a.damp * s * xi;
    const double c1 = (1.0 + 0.5 * th * a.damp) * s * s;
    const double c2 = a.lam * a.jump;
    const double e = 0.5 * th + 1.0;
    if (!(c2 > 0.0) || !std::isfinite(c2) || !std::isfinite(c0))
        throw NumericalError("maximizer: non-finite jump term for asset " + std::to_string(i));
    // F is concave and decreasing, so Newton iterates approach the root from the
    // right after at most one step; steps past the pole at 1 are halved back.
    const double hi = 1.0 - 1e-12;
    double x = (guess < hi) ? guess : std::min((c0 - c2) / (c1 + c2 * e), 0.0);
    double pw = 0.0;  // (1-x)^{-e}
    bool converged = false;
    for (int it = 1; it <= 200; ++it) {
        out.iterations = it;
        pw = std::exp(-e * std::log1p(-x));
        const double fx = c0 - c1 * x - c2 * pw;
        if (std::abs(fx) <= 1e-13 * (std::abs(c0) + c1 * std::abs(x) + c2 * pw)) {
            converged = true;
            break;
        }
        double nx = x - fx / (-c1 - c2 * e * pw / (1.0 - x));
        if (nx >= hi) {
            if (c0 - c1 * hi - c2 * std::exp(-e * std::log1p(-hi)) >= 0.0)
                throw NumericalError("maximizer: bracket failure at the upper end for asset " +
                                     std::to_string(i));
            nx = 0.5 * (x + hi);
        }
        if (nx == x) {
            converged = true;
            break;
        }
        x = nx;
    }
    if (!converged) throw NumericalError("maximizer: Newton did not converge");
    double width = std::max(1.0, 2.0 * (c2 - c0) / c1 + 1.0);
    if (x < -width && tr.active) width = std::max(width, 10.0 * bound_rn(prm, tr.level));
    if (x < -width)
        throw NumericalError("maximizer: bracket failure at the lower end for asset " +
                             std::to_string(i));
    out.pi = x;
    const double dev = 0.5 * th * s * x - xi;
    out.value = -0.25 * th * s * s * x * x + 0.5 * th * a.gain * x - 0.5 * a.damp * dev * dev +
                a.lam - c2 * pw * (1.0 - x);
    return out;
}

double driver_f(const ModelParams& prm, const DriverPoint& pt, std::span<const double> xi,
                std::span<const double> v, const Truncation& tr, double* argmax) {
    double f = h_leading(prm, pt, xi, v);
    for (int i = 0; i < prm.n; ++i) {
        if (defaulted(pt.z, i)) {
            if (argmax) argmax[i] = 0.0;
            continue;
        }
        auto opt = maximize_asset(prm, pt, i, xi[i], v[i], tr, argmax ? argmax[i] : 0.0);
        f += opt.value;
        if (argmax) argmax[i] = opt.pi;
    }
    return f;
}

double driver_f_regularized(const ModelParams& prm, const DriverPoint& pt,
                            std::span<const double> xi, std::span<const double> v,
                            const Truncation& tr) {
    std::array<double, kMaxAssets> zero{};
    return driver_f(prm, pt, xi, v, tr) -
           driver_f(prm, pt, std::span<const double>(zero.data(), prm.n),
                    std::span<const double>(zero.data(), prm.n), tr);
}

double bound_r1(const ModelParams& prm) {
    const double th = prm.risk_aversion, C = prm.cap_bound, g = 2.0 * C + prm.rate;
    return 0.25 * th * g * g + 0.25 * th + C;
}

double bound_r3(const ModelParams& prm) {
    const double th = prm.risk_aversion, C = prm.cap_bound, eps = prm.eps_bound;
    const double g = 2.0 * C + prm.rate;
    double worst = 0.0;
    for (double s : prm.vol) {
        const double quad = (0.25 * th + 0.125 * th * th + 0.25 * th / (s * s)) * s * s;
        auto neg = [&](double x) {
            return quad * x * x + C * std::exp(-0.5 * th * std::log1p(-x)) + 0.25 * th * g * g - eps;
        };
        const double left = -(1.0 + C * th / quad);
        auto res = boost::math::tools::brent_find_minima(neg, left, 0.0, 52);
        worst = std::max(worst, std::abs(res.second));
    }
    return worst;
}

double zeta_rate(const ModelParams& prm, Config z) {
    return survivors(z, prm.n) * std::max(bound_r1(prm), bound_r3(prm)) +
           0.5 * std::abs(prm.rate) * prm.risk_aversion;
}

double zeta_bound(const ModelParams& prm, double t, Config z) {
    return (prm.horizon - t) * zeta_rate(prm, z);
}

double bound_rn(const ModelParams& prm, double level) {
    const double th = prm.risk_aversion, C = prm.cap_bound;
    const double kn = 0.5 * (level + 2.0) * (level + 2.0) + C * (level + 1.0);
    const double beta = 0.5 * th * (2.0 * C + prm.rate);
    double r = 0.0;
    for (double s : prm.vol) {
        const double alpha = 0.25 * th * s * s;
        r = std::max(r, (beta + std::sqrt(beta * beta + 4.0 * alpha * (C + kn))) / (2.0 * alpha));
    }
    return r;
}

double bound_rn1(const ModelParams& prm, double level) {
    const double th = prm.risk_aversion, C = prm.cap_bound, rn = bound_rn(prm, level);
    double w = 0.0;
    for (double s : prm.vol)
        w = std::max(w, (1.0 + 0.5 * th) * s * s * rn + 2.0 * C + prm.rate + s * (level + 2.0));
    return (1.0 + rn) / prm.eps_bound * w;
}

double bound_rn2(const ModelParams& prm, double level) {
    return prm.cap_bound * (level + 2.0) / level * bound_rn1(prm, level);
}

double bound_rn3(const ModelParams& prm, double level) {
    const double th = prm.risk_aversion, r = std::max(bound_rn(prm, level), 1.0);
    double w = 0.0;
    for (double s : prm.vol)
        w = std::max(w, 0.5 * th * s * r + 0.25 * th * th * s * s * r * r + level + 2.0 +
                            (level + 2.0) * (level + 2.0));
    return w;
}

double lipschitz_bound(const ModelParams& prm, double level) {
    return std::max({bound_rn1(prm, level), bound_rn2(prm, level), bound_rn3(prm, level)});
}

double initial_truncation_level(const ModelParams& prm) {
    const double zmax = zeta_bound(prm, 0.0, 0);
    return std::max(1.0, std::floor(std::exp(2.0 * zmax)) + 1.0);
}

double terminal_zeta(const ModelParams& prm, const StatePath& path, std::size_t k0) {
    std::array<double, kMaxAssets> zero{};
    const std::span<const double> z0(zero.data(), prm.n);
    double acc = 0.0;
    for (std::size_t k = k0; k < path.steps(); ++k) {
        auto pt = driver_point(prm, std::span<const double>(path.p_at(k), prm.m), path.z[k]);
        acc += driver_f(prm, pt, z0, z0, Truncation::exact()) * (path.t[k + 1] - path.t[k]);
    }
    return acc;
}

}  // namespace hrc
