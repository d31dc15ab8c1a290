#include "hrc/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hrc/filter.hpp"
#include "hrc/rng.hpp"
#include "hrc/sim.hpp"

namespace hrc {

namespace {

void strategy_at(const ModelParams& prm, const GridSolution& sol, const GridSolution::Eval& e,
                 const DriverPoint& pt, const StrategyRule& rule, std::span<double> pi) {
    if (rule.kind == StrategyRule::Kind::Zero) {
        std::fill(pi.begin(), pi.end(), 0.0);
        return;
    }
    for (int i = 0; i < prm.n; ++i) {
        if (defaulted(pt.z, i)) {
            pi[i] = 0.0;
            continue;
        }
        const double v = rule.kind == StrategyRule::Kind::JumpBlind ? 0.0 : e.v[i];
        const double guess = rule.kind == StrategyRule::Kind::Scaled ? pi[i] / rule.scale : pi[i];
        auto opt = maximize_asset(prm, pt, i, e.z[i], v, sol.trunc, guess);
        pi[i] = rule.kind == StrategyRule::Kind::Scaled ? rule.scale * opt.pi : opt.pi;
    }
}

}  // namespace

void optimal_strategy(const ModelParams& prm, const GridSolution& sol, std::size_t k,
                      std::span<const double> p, Config z, const StrategyRule& rule,
                      std::span<double> pi) {
    strategy_at(prm, sol, sol.evaluate(k, p, z), driver_point(prm, p, z), rule, pi);
}

double log_wealth_step(const ModelParams& prm, std::span<const double> pi, Config z,
                       std::span<const double> dWo, Config fresh, double dt) {
    double invested = 0.0, lw = 0.0;
    for (int i = 0; i < prm.n; ++i) {
        if (defaulted(z, i)) continue;
        const double s = prm.vol[i];
        invested += pi[i];
        lw += pi[i] * s * dWo[i] - 0.5 * pi[i] * pi[i] * s * s * dt;
        if (defaulted(fresh, i)) lw += std::log1p(-pi[i]);
    }
    return lw + prm.rate * (1.0 - invested) * dt;
}

namespace {

// k standard errors plus rounding slack, so deterministic estimates (SE = 0)
// are accepted when they agree to machine precision.
bool within(double diff, double se, double scale, double k) {
    return std::abs(diff) < k * se + 1e-12 * std::max(1.0, std::abs(scale));
}

struct Accumulator {
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / double(count);
        m2 += d * (x - mean);
    }
    Estimate result() const {
        Estimate e;
        e.mean = mean;
        e.se = count > 1 ? std::sqrt(m2 / double(count - 1) / double(count)) : 0.0;
        return e;
    }
};

}  // namespace

std::vector<Estimate> estimate_objectives(const ModelParams& prm, const GridSolution& sol,
                                          std::span<const StrategyRule> rules,
                                          const SimulationOptions& opt) {
    const int n = prm.n, m = prm.m;
    check_prior(prm, opt.p0);
    const double th = prm.risk_aversion;
    const std::size_t K = sol.steps, R = rules.size();
    MarketSimOptions mso;
    mso.dt = sol.dt;
    mso.steps = K;
    std::vector<Accumulator> acc(R);
    std::vector<double> p(m), dW(n), lw(R);
    std::vector<std::vector<double>> pis(R, std::vector<double>(n, 0.0));
    std::vector<double> opt_pi(n, 0.0);
    for (std::size_t r = 0; r < opt.paths; ++r) {
        Rng rng = path_stream(opt.seed, r);
        const int k0 = sample_regime(opt.p0, rng);
        const MarketPath path = simulate_market_path(prm, k0, opt.z0, mso, rng);
        std::copy(opt.p0.begin(), opt.p0.end(), p.begin());
        std::fill(lw.begin(), lw.end(), 0.0);
        for (auto& v : pis) std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t k = 0; k < K; ++k) {
            const Config z = path.z[k], fresh = path.z[k + 1] & ~z;
            for (int i = 0; i < n; ++i) dW[i] = path.obs_at(k + 1, i) - path.obs_at(k, i);
            const auto e = sol.evaluate(k, p, z);
            const DriverPoint pt = driver_point(prm, p, z);
            bool have_opt = false;
            for (std::size_t a = 0; a < R; ++a) {
                // Scaled rules reuse the optimal fractions of this step.
                if (rules[a].kind == StrategyRule::Kind::Scaled) {
                    if (!have_opt) {
                        strategy_at(prm, sol, e, pt, StrategyRule::optimal(), opt_pi);
                        have_opt = true;
                    }
                    for (int i = 0; i < n; ++i) pis[a][i] = rules[a].scale * opt_pi[i];
                } else {
                    strategy_at(prm, sol, e, pt, rules[a], pis[a]);
                    if (rules[a].kind == StrategyRule::Kind::Optimal) {
                        opt_pi = pis[a];
                        have_opt = true;
                    }
                }
                lw[a] += log_wealth_step(prm, pis[a], z, dW, fresh, sol.dt);
            }
            filter_step(prm, p, z, dW, sol.dt);
            for (int i = 0; i < n; ++i)
                if (defaulted(fresh, i)) jump_update(prm, p, z, i);
        }
        for (std::size_t a = 0; a < R; ++a) acc[a].add(std::exp(-0.5 * th * lw[a]));
    }
    std::vector<Estimate> out;
    for (const auto& a : acc) out.push_back(a.result());
    return out;
}

Estimate estimate_objective(const ModelParams& prm, const GridSolution& sol,
                            const StrategyRule& rule, const SimulationOptions& opt) {
    return estimate_objectives(prm, sol, std::span<const StrategyRule>(&rule, 1), opt)[0];
}

Estimate estimate_objective_pstar(const ModelParams& prm, const GridSolution& sol,
                                  const StrategyRule& rule, const SimulationOptions& opt) {
    const int n = prm.n;
    check_prior(prm, opt.p0);
    const double th = prm.risk_aversion;
    Accumulator acc;
    std::vector<double> pi(n, 0.0);
    for (std::size_t r = 0; r < opt.paths; ++r) {
        Rng rng = path_stream(opt.seed, r);
        const StatePath sp = simulate_pstar_path(prm, opt.p0, opt.z0, 0.0, sol.dt, sol.steps, rng);
        double lw = 0.0;
        std::fill(pi.begin(), pi.end(), 0.0);
        for (std::size_t k = 0; k < sol.steps; ++k) {
            const Config z = sp.z[k], fresh = sp.z[k + 1] & ~z;
            optimal_strategy(prm, sol, k, std::span<const double>(sp.p_at(k), prm.m), z, rule, pi);
            lw += log_wealth_step(prm, pi, z, std::span<const double>(sp.dW_at(k), n), fresh, sol.dt);
        }
        acc.add(std::exp(log_girsanov_weight(prm, sp) - 0.5 * th * lw));
    }
    return acc.result();
}

Estimate martingale_check(const ModelParams& prm, const GridSolution& sol,
                          const SimulationOptions& opt) {
    const int n = prm.n, m = prm.m;
    check_prior(prm, opt.p0);
    const double th = prm.risk_aversion, dt = sol.dt;
    Accumulator acc;
    std::vector<double> pi(n, 0.0);
    const StrategyRule rule = StrategyRule::optimal();
    for (std::size_t r = 0; r < opt.paths; ++r) {
        Rng rng = path_stream(opt.seed, r);
        const StatePath sp = simulate_pstar_path(prm, opt.p0, opt.z0, 0.0, dt, sol.steps, rng);
        double le = 0.0;
        std::fill(pi.begin(), pi.end(), 0.0);
        for (std::size_t k = 0; k < sol.steps; ++k) {
            const Config z = sp.z[k];
            const std::span<const double> p(sp.p_at(k), m);
            const auto e = sol.evaluate(k, p, z);
            const DriverPoint pt = driver_point(prm, p, z);
            strategy_at(prm, sol, e, pt, rule, pi);
            const int s = survivors(z, n);
            const double each = s > 0 ? -std::expm1(-double(s) * dt) / s : 0.0;
            double comp = 0.0, jump = 0.0;
            for (int i = 0; i < n; ++i) {
                if (defaulted(z, i)) continue;
                const double a = (pt.mu_bar[i] + pt.lam_bar[i]) / prm.vol[i] -
                                 0.5 * th * prm.vol[i] * pi[i] + e.z[i];
                const double w = sp.dW_at(k)[i];
                le += a * w - 0.5 * a * a * dt;
                const double kappa =
                    std::exp(-0.5 * th * std::log1p(-pi[i]) + e.v[i]) * pt.lam_bar[i] - 1.0;
                comp += kappa * each;
                if (sp.defaulter[k] == i) jump = kappa;
            }
            // discrete stochastic exponential of the compensated default martingale
            le += std::log1p(jump - comp);
        }
        acc.add(std::exp(le));
    }
    return acc.result();
}

std::vector<ConsistencyRow> measure_consistency(const ModelParams& prm, double dt,
                                                std::size_t steps, const SimulationOptions& opt) {
    const int n = prm.n;
    check_prior(prm, opt.p0);
    auto functionals = [](Config h, double w) {
        return std::array<double, 3>{double(h & 1u), std::clamp(w, -3.0, 3.0), w > 0.5 ? 1.0 : 0.0};
    };
    const std::array<const char*, 3> names = {"default_indicator", "clipped_observation",
                                              "observation_tail"};
    std::array<Accumulator, 3> phys, wtd;
    MarketSimOptions mso;
    mso.dt = dt;
    mso.steps = steps;
    for (std::size_t r = 0; r < opt.paths; ++r) {
        Rng rng = path_stream(opt.seed, 2 * r);
        const int k0 = sample_regime(opt.p0, rng);
        const MarketPath path = simulate_market_path(prm, k0, opt.z0, mso, rng);
        auto g = functionals(path.z[steps], path.obs_at(steps, 0));
        for (int a = 0; a < 3; ++a) phys[a].add(g[a]);

        Rng rng2 = path_stream(opt.seed, 2 * r + 1);
        const StatePath sp = simulate_pstar_path(prm, opt.p0, opt.z0, 0.0, dt, steps, rng2);
        double w0 = 0.0;
        for (std::size_t k = 0; k < steps; ++k) w0 += sp.dW_at(k)[0];
        const double wt = girsanov_weight(prm, sp);
        auto gq = functionals(sp.z[steps], w0);
        for (int a = 0; a < 3; ++a) wtd[a].add(wt * gq[a]);
    }
    (void)n;
    std::vector<ConsistencyRow> out;
    for (int a = 0; a < 3; ++a) {
        ConsistencyRow row;
        row.name = names[a];
        row.physical = phys[a].result();
        row.weighted = wtd[a].result();
        const double se = std::hypot(row.physical.se, row.weighted.se);
        row.ok = within(row.physical.mean - row.weighted.mean, se, row.physical.mean, 3.0);
        out.push_back(row);
    }
    return out;
}

bool VerificationReport::all_ok() const {
    bool ok = identity_ok && martingale_ok && bounds.y_ok && bounds.v_ok && bounds.bmo_ok;
    for (const auto& p : perturbations) ok = ok && p.ok;
    return ok;
}

VerificationReport verification_report(const ModelParams& prm, const GridSolution& sol,
                                       const SimulationOptions& opt) {
    VerificationReport rep;
    rep.y0 = sol.value(opt.p0, opt.z0);
    rep.target = std::exp(rep.y0);
    const std::vector<StrategyRule> rules = {
        StrategyRule::optimal(), StrategyRule::scaled(0.8, "scaled_0.8"),
        StrategyRule::scaled(1.2, "scaled_1.2"), StrategyRule::zero(), StrategyRule::jump_blind()};
    const auto est = estimate_objectives(prm, sol, rules, opt);
    rep.optimal = est[0];
    rep.z_score = (rep.optimal.mean - rep.target) / rep.optimal.se;
    rep.identity_ok = within(rep.optimal.mean - rep.target, rep.optimal.se, rep.target, 3.0);
    for (std::size_t a = 1; a < rules.size(); ++a) {
        VerificationReport::Perturbation p;
        p.name = rules[a].name;
        p.est = est[a];
        p.combined_se = std::hypot(est[a].se, rep.optimal.se);
        p.ok = p.est.mean >= rep.optimal.mean - 2.0 * p.combined_se - 1e-12 * std::abs(rep.optimal.mean);
        rep.perturbations.push_back(p);
    }
    SimulationOptions mo = opt;
    mo.seed = opt.seed ^ 0x5bd1e995ULL;
    rep.martingale = martingale_check(prm, sol, mo);
    rep.martingale_ok = within(rep.martingale.mean - 1.0, rep.martingale.se, 1.0, 3.0);
    rep.bounds = check_solution_bounds(prm, sol);
    return rep;
}

nlohmann::json report_to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["y0"] = rep.y0;
    j["target"] = rep.target;
    j["objective"] = {{"mean", rep.optimal.mean}, {"se", rep.optimal.se}};
    j["z_score"] = rep.z_score;
    j["identity_ok"] = rep.identity_ok;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& p : rep.perturbations)
        per.push_back({{"name", p.name},
                       {"mean", p.est.mean},
                       {"se", p.est.se},
                       {"combined_se", p.combined_se},
                       {"ok", p.ok}});
    j["perturbations"] = per;
    j["martingale"] = {{"mean", rep.martingale.mean},
                       {"se", rep.martingale.se},
                       {"ok", rep.martingale_ok}};
    j["bounds"] = {{"y_sup", rep.bounds.y_sup},
                   {"zeta_bound", rep.bounds.zeta_sup},
                   {"y_excess", rep.bounds.y_excess},
                   {"slack", rep.bounds.slack},
                   {"y_ok", rep.bounds.y_ok},
                   {"v_sup", rep.bounds.v_sup},
                   {"v_ok", rep.bounds.v_ok},
                   {"bmo_stat", rep.bounds.bmo_stat},
                   {"bmo_bound", rep.bounds.bmo_bound},
                   {"bmo_ok", rep.bounds.bmo_ok}};
    j["all_ok"] = rep.all_ok();
    return j;
}

void print_report(std::ostream& os, const VerificationReport& rep) {
    char buf[256];
    auto line = [&](const char* name, double a, double b, bool ok) {
        std::snprintf(buf, sizeof buf, "%-22s %14.8f %14.8f  %s\n", name, a, b, ok ? "ok" : "FAIL");
        os << buf;
    };
    std::snprintf(buf, sizeof buf, "%-22s %14s %14s\n", "check", "value", "reference");
    os << buf;
    line("objective vs exp(Y0)", rep.optimal.mean, rep.target, rep.identity_ok);
    for (const auto& p : rep.perturbations) line(p.name.c_str(), p.est.mean, rep.optimal.mean, p.ok);
    line("martingale mean", rep.martingale.mean, 1.0, rep.martingale_ok);
    line("sup |Y|", rep.bounds.y_sup, rep.bounds.zeta_sup, rep.bounds.y_ok);
    line("sup |V|", rep.bounds.v_sup, 2.0 * rep.bounds.y_sup, rep.bounds.v_ok);
    line("BMO statistic", rep.bounds.bmo_stat, rep.bounds.bmo_bound, rep.bounds.bmo_ok);
}

}  // namespace hrc
