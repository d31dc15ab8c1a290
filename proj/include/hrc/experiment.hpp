#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hrc/bsde.hpp"
#include "hrc/model.hpp"
#include "hrc/portfolio.hpp"

#include "json.hpp"

namespace hrc {

struct ExperimentConfig {
    ModelParams model;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = ".";
    std::vector<double> prior;
    Config initial_config = 0;

    std::size_t sim_paths = 10;
    double sim_dt = 1e-3;

    GridOptions grid;
    std::string truncation = "auto";  // "auto", "exact" or a numeric level
    double refine_tol = 1e-10;
    int max_doublings = 6;
    std::size_t export_stride = 10;

    std::size_t verify_paths = 100000;

    nlohmann::json resolved;  // config after overrides, model inlined
};

// Reads the experiment file, inlines the referenced model file, applies
// dotted key=value overrides, then validates. ParseError / ValidationError.
ExperimentConfig load_experiment(const std::string& path,
                                 const std::vector<std::string>& overrides = {});
ExperimentConfig experiment_from_json(nlohmann::json j);

struct Artifact {
    std::filesystem::path file;
    std::string kind;
};

// Each runner writes <command>_<seed>.<ext> into the output directory.
std::vector<Artifact> run_simulate(const ExperimentConfig& cfg);
std::vector<Artifact> run_filter(const ExperimentConfig& cfg);
std::vector<Artifact> run_solve(const ExperimentConfig& cfg, std::ostream& log);
std::vector<Artifact> run_optimize(const ExperimentConfig& cfg, std::ostream& log);
std::vector<Artifact> run_verify(const ExperimentConfig& cfg, std::ostream& log, bool* passed);

// Solution according to the truncation knob (refined, fixed level or exact).
GridSolution solve_configured(const ExperimentConfig& cfg, RefinementTrace* trace);

}  // namespace hrc
