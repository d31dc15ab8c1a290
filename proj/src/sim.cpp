#include "hrc/sim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "hrc/filter.hpp"

namespace hrc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double holding_time(const ModelParams& prm, int k, Rng& rng) {
    double rate = -prm.q(k, k);
    if (!(rate > 0.0)) return kInf;
    return std::exponential_distribution<double>(rate)(rng);
}

int next_state(const ModelParams& prm, int k, Rng& rng) {
    double rate = -prm.q(k, k);
    double u = std::uniform_real_distribution<double>(0.0, rate)(rng);
    int last = k;
    for (int j = 0; j < prm.m; ++j) {
        if (j == k) continue;
        last = j;
        u -= prm.q(k, j);
        if (u < 0.0) return j;
    }
    return last;
}

}  // namespace

int RegimePath::state_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return states.front();
    return states[std::size_t(it - times.begin()) - 1];
}

RegimePath simulate_regime_path(const ModelParams& prm, int k0, double t0, double t1, Rng& rng) {
    if (k0 < 0 || k0 >= prm.m) throw ValidationError("initial regime out of range");
    RegimePath out;
    out.times.push_back(t0);
    out.states.push_back(k0);
    double t = t0 + holding_time(prm, k0, rng);
    int k = k0;
    while (t < t1) {
        k = next_state(prm, k, rng);
        out.times.push_back(t);
        out.states.push_back(k);
        t += holding_time(prm, k, rng);
    }
    return out;
}

int sample_regime(std::span<const double> p, Rng& rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        u -= p[k];
        if (u < 0.0) return int(k);
    }
    return int(p.size()) - 1;
}

MarketPath simulate_market_path(const ModelParams& prm, int k0, Config z0,
                                const MarketSimOptions& opt, Rng& rng) {
    const int n = prm.n;
    const double dt = opt.dt;
    if (!(dt > 0.0)) throw ValidationError("time step must be positive");
    if (dt * prm.intensity_max > 0.1)
        throw ValidationError("dt * max intensity exceeds 0.1; refine the time step");
    if (k0 < 0 || k0 >= prm.m) throw ValidationError("initial regime out of range");
    const std::size_t K = opt.steps;

    MarketPath path;
    path.n = n;
    path.t.resize(K + 1);
    path.regime.resize(K + 1);
    path.z.resize(K + 1);
    path.log_price.assign((K + 1) * n, 0.0);
    path.obs.assign((K + 1) * n, 0.0);
    path.default_time.assign(n, kInf);
    if (!opt.log_price0.empty()) {
        if (int(opt.log_price0.size()) != n) throw ValidationError("initial log prices need n entries");
        std::copy(opt.log_price0.begin(), opt.log_price0.end(), path.log_price.begin());
    }
    for (int i = 0; i < n; ++i)
        if (defaulted(z0, i)) path.default_time[i] = opt.t0;

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double sdt = std::sqrt(dt);

    int k = k0;
    Config z = z0;
    int pending = -1;
    double t = opt.t0;
    double next_switch = t + holding_time(prm, k, rng);
    path.t[0] = t;
    path.regime[0] = k;
    path.z[0] = z;

    std::array<double, kMaxAssets> drift{}, hazard{};
    for (std::size_t step = 0; step < K; ++step) {
        const double ta = opt.t0 + double(step) * dt, tb = opt.t0 + double(step + 1) * dt;
        drift.fill(0.0);
        hazard.fill(0.0);
        bool switched = false;
        double s = ta;
        auto accumulate = [&](double until) {
            for (int i = 0; i < n; ++i) {
                double l = prm.lambda(k, z, i);
                drift[i] += (prm.mu(k, i) + l) * (until - s);
                hazard[i] += l * (until - s);
            }
            s = until;
        };
        while (next_switch < tb) {
            accumulate(next_switch);
            k = next_state(prm, k, rng);
            next_switch += holding_time(prm, k, rng);
            switched = true;
        }
        accumulate(tb);

        const double* lp = &path.log_price[step * n];
        const double* ob = &path.obs[step * n];
        double* lp1 = &path.log_price[(step + 1) * n];
        double* ob1 = &path.obs[(step + 1) * n];
        for (int i = 0; i < n; ++i) {
            if (defaulted(z, i)) {
                lp1[i] = lp[i];
                ob1[i] = ob[i];
                continue;
            }
            const double sig = prm.vol[i];
            const double dW = sdt * normal(rng);
            ob1[i] = ob[i] + drift[i] / sig + dW;
            lp1[i] = lp[i] + drift[i] - 0.5 * sig * sig * dt + sig * dW;
        }

        // At most one default per step (competing risks); a default drawn in a
        // step that also saw a regime switch is booked in the next quiet step.
        auto book = [&](int i) {
            z = with_default(z, i);
            path.default_time[i] = tb;
        };
        if (pending >= 0) {
            if (!switched) {
                book(pending);
                pending = -1;
            }
        } else {
            double total = 0.0;
            for (int i = 0; i < n; ++i)
                if (!defaulted(z, i)) total += hazard[i];
            if (total > 0.0 && unif(rng) < -std::expm1(-total)) {
                double u = unif(rng) * total;
                int who = -1;
                for (int i = 0; i < n; ++i) {
                    if (defaulted(z, i)) continue;
                    who = i;
                    u -= hazard[i];
                    if (u < 0.0) break;
                }
                if (switched)
                    pending = who;
                else
                    book(who);
            }
        }
        t = tb;
        path.t[step + 1] = t;
        path.regime[step + 1] = k;
        path.z[step + 1] = z;
    }
    return path;
}

std::vector<double> observations_from_prices(const ModelParams& prm, const MarketPath& path) {
    const int n = prm.n;
    const std::size_t K = path.steps();
    std::vector<double> out((K + 1) * n, 0.0);
    const double t0 = path.t[0];
    for (std::size_t k = 0; k <= K; ++k)
        for (int i = 0; i < n; ++i) {
            double te = std::min(path.t[k], path.default_time[i]) - t0;
            // log price is frozen after default, so the stopped value is the current one
            out[k * n + i] = (path.log_price[k * n + i] - path.log_price[i]) / prm.vol[i] +
                             0.5 * prm.vol[i] * te;
        }
    return out;
}

StatePath simulate_pstar_path(const ModelParams& prm, std::span<const double> p0, Config z0,
                              double t0, double dt, std::size_t steps, Rng& rng) {
    const int n = prm.n, m = prm.m;
    StatePath path;
    path.n = n;
    path.m = m;
    path.t.resize(steps + 1);
    path.p.resize((steps + 1) * m);
    path.z.resize(steps + 1);
    path.dW.assign(steps * n, 0.0);
    path.defaulter.assign(steps, -1);
    std::copy(p0.begin(), p0.end(), path.p.begin());
    path.t[0] = t0;
    path.z[0] = z0;

    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double sdt = std::sqrt(dt);
    std::vector<double> p(p0.begin(), p0.end());
    Config z = z0;
    for (std::size_t k = 0; k < steps; ++k) {
        double* dW = &path.dW[k * n];
        for (int i = 0; i < n; ++i)
            if (!defaulted(z, i)) dW[i] = sdt * normal(rng);
        filter_step(prm, p, z, std::span<const double>(dW, n), dt);
        const int s = survivors(z, n);
        if (s > 0 && unif(rng) < -std::expm1(-double(s) * dt)) {
            int pick = std::min(int(unif(rng) * s), s - 1);
            int who = -1;
            for (int i = 0; i < n; ++i) {
                if (defaulted(z, i)) continue;
                if (pick-- == 0) {
                    who = i;
                    break;
                }
            }
            jump_update(prm, p, z, who);
            z = with_default(z, who);
            path.defaulter[k] = who;
        }
        path.t[k + 1] = t0 + double(k + 1) * dt;
        path.z[k + 1] = z;
        std::copy(p.begin(), p.end(), path.p.begin() + (k + 1) * m);
    }
    return path;
}

double log_girsanov_weight(const ModelParams& prm, const StatePath& path) {
    const int n = prm.n, m = prm.m;
    std::array<double, kMaxAssets> mb{}, lb{};
    std::vector<double> p(m);
    double lw = 0.0;
    for (std::size_t k = 0; k < path.steps(); ++k) {
        const double dt = path.t[k + 1] - path.t[k];
        const Config z = path.z[k];
        std::copy(path.p_at(k), path.p_at(k) + m, p.begin());
        filter_moments(prm, p, z, mb, lb);
        const double* dW = path.dW_at(k);
        for (int i = 0; i < n; ++i) {
            if (defaulted(z, i)) continue;
            double a = (mb[i] + lb[i]) / prm.vol[i];
            lw += a * dW[i] - 0.5 * a * a * dt + (1.0 - lb[i]) * dt;
        }
        if (int who = path.defaulter[k]; who >= 0) {
            filter_step(prm, p, z, std::span<const double>(dW, n), dt);
            filter_moments(prm, p, z, mb, lb);
            lw += std::log(lb[who]);
        }
    }
    return lw;
}

double girsanov_weight(const ModelParams& prm, const StatePath& path) {
    return std::exp(log_girsanov_weight(prm, path));
}

double density_pstar(const ModelParams& prm, const StatePath& path) {
    return std::exp(-log_girsanov_weight(prm, path));
}

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

template <class T>
void put_le(std::ostream& os, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        os.write(bytes.data(), sizeof(T));
    } else {
        os.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
}

template <class T>
T get_le(std::istream& is) {
    std::array<char, sizeof(T)> bytes;
    if (!is.read(bytes.data(), sizeof(T))) throw ParseError("truncated path batch");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

constexpr char kMagic[8] = {'H', 'R', 'C', 'P', 'A', 'T', 'H', '\0'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_path_csv(std::ostream& os, const MarketPath& path) {
    os << "t,I,H";
    for (int i = 0; i < path.n; ++i) os << ",logP_" << i + 1;
    for (int i = 0; i < path.n; ++i) os << ",Wo_" << i + 1;
    os << '\n';
    for (std::size_t k = 0; k < path.t.size(); ++k) {
        put(os, path.t[k]);
        os << ',' << path.regime[k] << ',' << path.z[k];
        for (int i = 0; i < path.n; ++i) {
            os << ',';
            put(os, path.log_price[k * path.n + i]);
        }
        for (int i = 0; i < path.n; ++i) {
            os << ',';
            put(os, path.obs[k * path.n + i]);
        }
        os << '\n';
    }
}

void write_path_batch(std::ostream& os, int m, std::span<const MarketPath> paths) {
    const std::uint32_t n = paths.empty() ? 0 : std::uint32_t(paths[0].n);
    const std::uint32_t K = paths.empty() ? 0 : std::uint32_t(paths[0].steps());
    os.write(kMagic, sizeof kMagic);
    put_le(os, kVersion);
    put_le(os, n);
    put_le(os, std::uint32_t(m));
    put_le(os, K);
    put_le(os, std::uint64_t(paths.size()));
    for (const auto& p : paths) {
        if (std::uint32_t(p.n) != n || p.steps() != K)
            throw ValidationError("path batch requires equal shapes");
        for (std::size_t k = 0; k <= K; ++k) {
            put_le(os, p.t[k]);
            put_le(os, double(p.regime[k]));
            put_le(os, double(p.z[k]));
            for (std::uint32_t i = 0; i < n; ++i) put_le(os, p.log_price[k * n + i]);
            for (std::uint32_t i = 0; i < n; ++i) put_le(os, p.obs[k * n + i]);
        }
    }
}

std::vector<MarketPath> read_path_batch(std::istream& is, int* m_out) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw ParseError("not a path batch (bad magic)");
    if (get_le<std::uint32_t>(is) != kVersion) throw ParseError("unsupported path batch version");
    const auto n = get_le<std::uint32_t>(is);
    const auto m = get_le<std::uint32_t>(is);
    const auto K = get_le<std::uint32_t>(is);
    const auto count = get_le<std::uint64_t>(is);
    if (m_out) *m_out = int(m);
    std::vector<MarketPath> out(count);
    for (auto& p : out) {
        p.n = int(n);
        p.t.resize(K + 1);
        p.regime.resize(K + 1);
        p.z.resize(K + 1);
        p.log_price.resize((K + 1) * n);
        p.obs.resize((K + 1) * n);
        p.default_time.assign(n, kInf);
        for (std::size_t k = 0; k <= K; ++k) {
            p.t[k] = get_le<double>(is);
            p.regime[k] = int(get_le<double>(is));
            p.z[k] = Config(get_le<double>(is));
            for (std::uint32_t i = 0; i < n; ++i) p.log_price[k * n + i] = get_le<double>(is);
            for (std::uint32_t i = 0; i < n; ++i) p.obs[k * n + i] = get_le<double>(is);
            for (std::uint32_t i = 0; i < n; ++i)
                if (k == 0 && defaulted(p.z[0], int(i))) p.default_time[i] = p.t[0];
            if (k > 0)
                for (std::uint32_t i = 0; i < n; ++i)
                    if (defaulted(p.z[k] & ~p.z[k - 1], int(i))) p.default_time[i] = p.t[k];
        }
    }
    return out;
}

}  // namespace hrc
