#include "hrc/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "hrc/filter.hpp"
#include "hrc/rng.hpp"
#include "hrc/sim.hpp"

namespace hrc {

namespace fs = std::filesystem;

namespace {

void apply_override(nlohmann::json& j, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override must be key=value: " + kv);
    const std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;
    }
    nlohmann::json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) throw ParseError("bad override key: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

template <class T>
T get_or(const nlohmann::json& j, const char* section, const char* key, T fallback) {
    if (!j.contains(section) || !j[section].contains(key)) return fallback;
    return j[section][key].get<T>();
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ParseError("cannot write " + p.string());
    return os;
}

fs::path artifact(const ExperimentConfig& cfg, const std::string& cmd, const std::string& ext) {
    fs::create_directories(cfg.output_dir);
    return cfg.output_dir / (cmd + "_" + std::to_string(cfg.seed) + "." + ext);
}

std::vector<MarketPath> simulate_batch(const ExperimentConfig& cfg, std::size_t count) {
    MarketSimOptions mso;
    mso.dt = cfg.sim_dt;
    mso.steps = std::size_t(std::llround(cfg.model.horizon / cfg.sim_dt));
    std::vector<MarketPath> out;
    for (std::size_t r = 0; r < count; ++r) {
        Rng rng = path_stream(cfg.seed, r);
        const int k0 = sample_regime(cfg.prior, rng);
        out.push_back(simulate_market_path(cfg.model, k0, cfg.initial_config, mso, rng));
    }
    return out;
}

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

ExperimentConfig experiment_from_json(nlohmann::json j) {
    ExperimentConfig cfg;
    try {
        if (!j.contains("model")) throw ParseError("config needs a model or model_file entry");
        cfg.model = params_from_json(j["model"]);
        validate_params(cfg.model);
        cfg.seed = j.value("seed", std::uint64_t(1));
        cfg.output_dir = j.value("output_dir", std::string("."));
        cfg.prior = get_or(j, "initial", "prior", std::vector<double>(cfg.model.m, 1.0 / cfg.model.m));
        cfg.initial_config = get_or(j, "initial", "config", Config(0));
        check_prior(cfg.model, cfg.prior);
        if (cfg.initial_config >= cfg.model.num_configs())
            throw ValidationError("initial configuration out of range");

        cfg.sim_paths = get_or(j, "simulate", "paths", cfg.sim_paths);
        cfg.sim_dt = get_or(j, "simulate", "dt", cfg.sim_dt);
        if (!(cfg.sim_dt > 0.0)) throw ValidationError("simulate.dt must be positive");

        cfg.grid.steps = get_or(j, "solve", "steps", cfg.grid.steps);
        cfg.grid.resolution = get_or(j, "solve", "resolution", cfg.grid.resolution);
        cfg.grid.delta = get_or(j, "solve", "margin", cfg.grid.delta);
        cfg.grid.quad_nodes = get_or(j, "solve", "quad_nodes", cfg.grid.quad_nodes);
        if (j.contains("solve") && j["solve"].contains("truncation")) {
            const auto& t = j["solve"]["truncation"];
            cfg.truncation = t.is_number() ? std::to_string(t.get<double>()) : t.get<std::string>();
        }
        cfg.refine_tol = get_or(j, "solve", "tol", cfg.refine_tol);
        cfg.max_doublings = get_or(j, "solve", "max_doublings", cfg.max_doublings);
        cfg.export_stride = get_or(j, "solve", "export_stride", cfg.export_stride);
        cfg.verify_paths = get_or(j, "verify", "paths", cfg.verify_paths);
        if (cfg.grid.steps < 1 || cfg.verify_paths < 2)
            throw ValidationError("solve.steps and verify.paths must be positive");
        if (cfg.truncation != "auto" && cfg.truncation != "exact") {
            double lvl = 0.0;
            try {
                lvl = std::stod(cfg.truncation);
            } catch (const std::exception&) {
                throw ValidationError("solve.truncation must be auto, exact or a number");
            }
            if (!(lvl > 0.0)) throw ValidationError("truncation level must be positive");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    cfg.resolved = std::move(j);
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
    if (j.contains("model_file")) {
        fs::path mp = j["model_file"].get<std::string>();
        if (mp.is_relative()) mp = fs::path(path).parent_path() / mp;
        std::ifstream min(mp);
        if (!min) throw ParseError("cannot open model file: " + mp.string());
        try {
            nlohmann::json mj;
            min >> mj;
            j["model"] = mj;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("model file " + mp.string() + ": " + e.what());
        }
        j.erase("model_file");
    }
    for (const auto& kv : overrides) apply_override(j, kv);
    return experiment_from_json(std::move(j));
}

GridSolution solve_configured(const ExperimentConfig& cfg, RefinementTrace* trace) {
    GridOptions opt = cfg.grid;
    if (cfg.truncation == "exact") {
        opt.trunc = Truncation::exact();
        return solve_grid(cfg.model, opt);
    }
    double level = cfg.truncation == "auto" ? 0.0 : std::stod(cfg.truncation);
    return refine_truncation(cfg.model, opt, level, cfg.refine_tol, cfg.max_doublings, trace);
}

std::vector<Artifact> run_simulate(const ExperimentConfig& cfg) {
    const auto paths = simulate_batch(cfg, std::max<std::size_t>(cfg.sim_paths, 1));
    const fs::path csv = artifact(cfg, "simulate", "csv"), bin = artifact(cfg, "simulate", "bin");
    {
        auto os = open_out(csv);
        write_path_csv(os, paths[0]);
    }
    {
        auto os = open_out(bin, true);
        write_path_batch(os, cfg.model.m, paths);
    }
    return {{csv, "path_csv"}, {bin, "path_batch"}};
}

std::vector<Artifact> run_filter(const ExperimentConfig& cfg) {
    const auto paths = simulate_batch(cfg, 1);
    const PosteriorPath post = run_filter(cfg.model, cfg.prior, paths[0]);
    const fs::path csv = artifact(cfg, "filter", "csv");
    auto os = open_out(csv);
    os << "t";
    for (int k = 0; k < cfg.model.m; ++k) os << ",p_" << k + 1;
    os << ",z\n";
    for (std::size_t k = 0; k < post.t.size(); ++k) {
        put(os, post.t[k]);
        for (int c = 0; c < cfg.model.m; ++c) {
            os << ',';
            put(os, post.at(k)[c]);
        }
        os << ',' << post.z[k] << '\n';
    }
    return {{csv, "posterior_csv"}};
}

std::vector<Artifact> run_solve(const ExperimentConfig& cfg, std::ostream& log) {
    RefinementTrace trace;
    const GridSolution sol = solve_configured(cfg, &trace);
    const fs::path csv = artifact(cfg, "solve", "csv"), meta = artifact(cfg, "solve", "json");
    {
        auto os = open_out(csv);
        write_solution_csv(os, sol, cfg.export_stride);
    }
    nlohmann::json j = solution_metadata(cfg.model, sol);
    j["y0"] = sol.value(cfg.prior, cfg.initial_config);
    j["refinement"] = {{"levels", trace.levels},
                       {"gaps", trace.gaps},
                       {"min_increase", trace.min_increase},
                       {"converged", trace.converged}};
    const BoundsReport b = check_solution_bounds(cfg.model, sol);
    j["bounds"] = {{"y_sup", b.y_sup},   {"zeta_bound", b.zeta_sup}, {"y_ok", b.y_ok},
                   {"v_sup", b.v_sup},   {"v_ok", b.v_ok},         {"bmo_stat", b.bmo_stat},
                   {"bmo_bound", b.bmo_bound}, {"bmo_ok", b.bmo_ok}};
    {
        auto os = open_out(meta);
        os << j.dump(2) << '\n';
    }
    log << "Y(0) = " << j["y0"].get<double>() << "  (levels tried: " << trace.levels.size()
        << ")\n";
    return {{csv, "solution_csv"}, {meta, "solution_metadata"}};
}

std::vector<Artifact> run_optimize(const ExperimentConfig& cfg, std::ostream& log) {
    const GridSolution sol = solve_configured(cfg, nullptr);
    const ModelParams& prm = cfg.model;
    const fs::path csv = artifact(cfg, "optimize", "csv");
    auto os = open_out(csv);
    os << "time,node,config";
    for (int i = 0; i < prm.n; ++i) os << ",pi_" << i + 1;
    os << '\n';
    std::vector<double> pi(prm.n);
    const std::size_t stride = std::max<std::size_t>(cfg.export_stride, 1);
    for (std::size_t k = 0; k < sol.steps; k += stride)
        for (Config z = 0; z < sol.num_configs(); ++z)
            for (std::size_t j = 0; j < sol.grid.size(); ++j) {
                std::fill(pi.begin(), pi.end(), 0.0);
                optimal_strategy(prm, sol, k, sol.grid.node(j), z, StrategyRule::optimal(), pi);
                put(os, double(k) * sol.dt);
                os << ',' << j << ',' << z;
                for (double v : pi) {
                    os << ',';
                    put(os, v);
                }
                os << '\n';
            }
    std::fill(pi.begin(), pi.end(), 0.0);
    optimal_strategy(prm, sol, 0, cfg.prior, cfg.initial_config, StrategyRule::optimal(), pi);
    log << "pi*(0) =";
    for (double v : pi) log << ' ' << v;
    log << '\n';
    return {{csv, "strategy_csv"}};
}

std::vector<Artifact> run_verify(const ExperimentConfig& cfg, std::ostream& log, bool* passed) {
    const GridSolution sol = solve_configured(cfg, nullptr);
    SimulationOptions so;
    so.paths = cfg.verify_paths;
    so.seed = cfg.seed;
    so.p0 = cfg.prior;
    so.z0 = cfg.initial_config;
    const VerificationReport rep = verification_report(cfg.model, sol, so);
    print_report(log, rep);
    const fs::path js = artifact(cfg, "verify", "json");
    auto os = open_out(js);
    os << report_to_json(rep).dump(2) << '\n';
    if (passed) *passed = rep.all_ok();
    return {{js, "verification_report"}};
}

}  // namespace hrc
