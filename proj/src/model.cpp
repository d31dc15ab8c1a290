#include "hrc/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

namespace hrc {

int survivors(Config z, int n) {
    return n - std::popcount(z & ((Config(1) << n) - 1));
}

void validate_params(ModelParams& p) {
    if (p.n < 1 || p.n > kMaxAssets)
        throw ValidationError("asset count must be in [1, " + std::to_string(kMaxAssets) + "]");
    if (p.m < 1 || p.m > kMaxRegimes)
        throw ValidationError("regime count must be in [1, " + std::to_string(kMaxRegimes) + "]");
    const std::size_t nc = p.num_configs();
    if (p.generator.size() != std::size_t(p.m) * p.m)
        throw ValidationError("generator must be m x m");
    if (p.drift.size() != std::size_t(p.m) * p.n) throw ValidationError("drift must be m x n");
    if (p.intensity.size() != std::size_t(p.m) * nc * p.n)
        throw ValidationError("intensity must be m x 2^n x n");
    if (p.vol.size() != std::size_t(p.n)) throw ValidationError("volatility must have n entries");

    for (int j = 0; j < p.m; ++j) {
        double row = 0.0, scale = 0.0;
        for (int k = 0; k < p.m; ++k) {
            double v = p.q(j, k);
            if (!std::isfinite(v)) throw ValidationError("generator entry not finite");
            if (j != k && v < 0.0) throw ValidationError("generator off-diagonal entry negative");
            row += v;
            scale += std::abs(v);
        }
        if (std::abs(row) > 1e-12 * std::max(1.0, scale))
            throw ValidationError("generator row " + std::to_string(j) + " does not sum to zero");
    }
    for (double s : p.vol)
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("volatility must be positive");
    for (double d : p.drift)
        if (!std::isfinite(d)) throw ValidationError("drift entry not finite");
    for (double l : p.intensity)
        if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("intensity must be positive");
    if (!std::isfinite(p.rate)) throw ValidationError("rate not finite");
    if (!(p.risk_aversion > 0.0) || !std::isfinite(p.risk_aversion))
        throw ValidationError("risk aversion must be positive");
    if (!(p.horizon > 0.0) || !std::isfinite(p.horizon))
        throw ValidationError("horizon must be positive");

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double lmin = lo, lmax = 0.0;
    for (int k = 0; k < p.m; ++k)
        for (Config z = 0; z < nc; ++z)
            for (int i = 0; i < p.n; ++i) {
                if (defaulted(z, i)) continue;
                double l = p.lambda(k, z, i);
                double s = std::abs(l) + std::abs(p.mu(k, i));
                lo = std::min(lo, s);
                hi = std::max(hi, s);
                lmin = std::min(lmin, l);
                lmax = std::max(lmax, l);
            }
    if (!(lo > 0.0)) throw ValidationError("lower bound on |lambda|+|mu| must be positive");
    p.eps_bound = lo;
    p.cap_bound = hi;
    p.intensity_floor = lmin;
    p.intensity_max = lmax;
}

std::vector<Config> enumerate_default_configs(int n) {
    if (n < 1 || n > kMaxAssets)
        throw ValidationError("configuration enumeration capped at " + std::to_string(kMaxAssets) +
                              " assets");
    std::vector<Config> out(std::size_t(1) << n);
    for (std::size_t z = 0; z < out.size(); ++z) out[z] = Config(z);
    return out;
}

namespace {

std::vector<double> flat_matrix(const nlohmann::json& j, int rows, int cols, const char* what) {
    if (!j.is_array() || int(j.size()) != rows)
        throw ValidationError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    std::vector<double> out;
    out.reserve(std::size_t(rows) * cols);
    for (const auto& row : j) {
        if (!row.is_array() || int(row.size()) != cols)
            throw ValidationError(std::string(what) + ": expected " + std::to_string(cols) +
                                  " columns");
        for (const auto& v : row) out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    try {
        p.n = j.at("assets").get<int>();
        p.m = j.at("regimes").get<int>();
        if (p.n < 1 || p.n > kMaxAssets || p.m < 1)
            throw ValidationError("assets must be in [1,16] and regimes positive");
        p.generator = flat_matrix(j.at("generator"), p.m, p.m, "generator");
        p.drift = flat_matrix(j.at("drift"), p.m, p.n, "drift");
        p.vol = j.at("volatility").get<std::vector<double>>();
        p.rate = j.at("rate").get<double>();
        p.risk_aversion = j.at("risk_aversion").get<double>();
        p.horizon = j.at("horizon").get<double>();

        // Intensity is either m x n (same in every configuration) or m x 2^n x n.
        const auto& lj = j.at("intensity");
        const std::size_t nc = p.num_configs();
        if (!lj.is_array() || int(lj.size()) != p.m)
            throw ValidationError("intensity: expected m rows");
        p.intensity.resize(std::size_t(p.m) * nc * p.n);
        for (int k = 0; k < p.m; ++k) {
            const auto& row = lj[k];
            if (row.is_array() && !row.empty() && row[0].is_array()) {
                if (row.size() != nc) throw ValidationError("intensity: expected 2^n configurations");
                for (Config z = 0; z < nc; ++z) {
                    auto v = row[z].get<std::vector<double>>();
                    if (int(v.size()) != p.n) throw ValidationError("intensity: expected n entries");
                    for (int i = 0; i < p.n; ++i) p.intensity[(k * nc + z) * p.n + i] = v[i];
                }
            } else {
                auto v = row.get<std::vector<double>>();
                if (int(v.size()) != p.n) throw ValidationError("intensity: expected n entries");
                for (Config z = 0; z < nc; ++z)
                    for (int i = 0; i < p.n; ++i) p.intensity[(k * nc + z) * p.n + i] = v[i];
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model parameters: ") + e.what());
    }
    return p;
}

nlohmann::json params_to_json(const ModelParams& p) {
    nlohmann::json j;
    j["assets"] = p.n;
    j["regimes"] = p.m;
    auto rows = [](const std::vector<double>& v, int r, int c) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < r; ++i)
            a.push_back(std::vector<double>(v.begin() + i * c, v.begin() + (i + 1) * c));
        return a;
    };
    j["generator"] = rows(p.generator, p.m, p.m);
    j["drift"] = rows(p.drift, p.m, p.n);
    const int nc = int(p.num_configs());
    nlohmann::json lj = nlohmann::json::array();
    for (int k = 0; k < p.m; ++k) {
        std::vector<double> block(p.intensity.begin() + std::size_t(k) * nc * p.n,
                                  p.intensity.begin() + std::size_t(k + 1) * nc * p.n);
        lj.push_back(rows(block, nc, p.n));
    }
    j["intensity"] = lj;
    j["volatility"] = p.vol;
    j["rate"] = p.rate;
    j["risk_aversion"] = p.risk_aversion;
    j["horizon"] = p.horizon;
    return j;
}

ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model parameters file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model parameters file " + path + ": " + e.what());
    }
    return params_from_json(j);
}

}  // namespace hrc
