#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hrc/bsde.hpp"
#include "hrc/model.hpp"

#include "json.hpp"

namespace hrc {

struct StrategyRule {
    enum class Kind { Optimal, Scaled, Zero, JumpBlind };
    Kind kind = Kind::Optimal;
    double scale = 1.0;
    std::string name = "optimal";

    static StrategyRule optimal() { return {}; }
    static StrategyRule scaled(double s, std::string label) { return {Kind::Scaled, s, std::move(label)}; }
    static StrategyRule zero() { return {Kind::Zero, 0.0, "bond_only"}; }
    // Maximizer computed with V set to zero.
    static StrategyRule jump_blind() { return {Kind::JumpBlind, 1.0, "myopic_v0"}; }
};

// Fractions of wealth in each asset at time index k and filter state (p, z).
// Incoming values of pi warm-start the maximizer.
void optimal_strategy(const ModelParams& prm, const GridSolution& sol, std::size_t k,
                      std::span<const double> p, Config z, const StrategyRule& rule,
                      std::span<double> pi);

// log(X_{k+1} / X_k) for a constant-fraction strategy over one step, given
// observation increments and the assets defaulting at the end of the step.
double log_wealth_step(const ModelParams& prm, std::span<const double> pi, Config z,
                       std::span<const double> dWo, Config fresh, double dt);

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

struct SimulationOptions {
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    std::vector<double> p0;
    Config z0 = 0;
};

// E[(X_T/X_0)^{-theta/2}] under the physical measure, one estimate per rule,
// all rules evaluated on the same paths.
std::vector<Estimate> estimate_objectives(const ModelParams& prm, const GridSolution& sol,
                                          std::span<const StrategyRule> rules,
                                          const SimulationOptions& opt);
Estimate estimate_objective(const ModelParams& prm, const GridSolution& sol,
                            const StrategyRule& rule, const SimulationOptions& opt);
// Same quantity on reference-measure paths weighted by dP/dP*.
Estimate estimate_objective_pstar(const ModelParams& prm, const GridSolution& sol,
                                  const StrategyRule& rule, const SimulationOptions& opt);

// Mean of the stochastic exponential of the verification martingale under P*.
Estimate martingale_check(const ModelParams& prm, const GridSolution& sol,
                          const SimulationOptions& opt);

struct ConsistencyRow {
    std::string name;
    Estimate physical, weighted;
    bool ok = false;
};
// Compares E_P[g] on physical paths with E_P*[weight g] on reference paths.
std::vector<ConsistencyRow> measure_consistency(const ModelParams& prm, double dt,
                                                std::size_t steps, const SimulationOptions& opt);

struct VerificationReport {
    double y0 = 0.0;
    double target = 0.0;  // exp(Y(0))
    Estimate optimal;
    double z_score = 0.0;
    bool identity_ok = false;
    struct Perturbation {
        std::string name;
        Estimate est;
        double combined_se = 0.0;
        bool ok = false;
    };
    std::vector<Perturbation> perturbations;
    Estimate martingale;
    bool martingale_ok = false;
    BoundsReport bounds;
    bool all_ok() const;
};

VerificationReport verification_report(const ModelParams& prm, const GridSolution& sol,
                                       const SimulationOptions& opt);
nlohmann::json report_to_json(const VerificationReport& rep);
void print_report(std::ostream& os, const VerificationReport& rep);

}  // namespace hrc
