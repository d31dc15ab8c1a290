#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace hrc {

// Default configuration: bit i set <=> asset i has defaulted.
using Config = std::uint32_t;

constexpr int kMaxAssets = 16;
constexpr int kMaxRegimes = 16;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool defaulted(Config z, int i) { return (z >> i) & 1u; }
inline Config with_default(Config z, int i) { return z | (Config(1) << i); }
int survivors(Config z, int n);

struct ModelParams {
    int n = 0;  // assets
    int m = 0;  // hidden regimes
    std::vector<double> generator;  // m x m, row-major
    std::vector<double> drift;      // m x n
    std::vector<double> intensity;  // m x 2^n x n
    std::vector<double> vol;        // n
    double rate = 0.0;
    double risk_aversion = 1.0;
    double horizon = 1.0;

    // Filled by validate_params.
    double eps_bound = 0.0;
    double cap_bound = 0.0;
    double intensity_floor = 0.0;
    double intensity_max = 0.0;

    std::size_t num_configs() const { return std::size_t(1) << n; }
    double q(int j, int k) const { return generator[std::size_t(j) * m + k]; }
    double mu(int k, int i) const { return drift[std::size_t(k) * n + i]; }
    double lambda(int k, Config z, int i) const {
        return intensity[(std::size_t(k) * num_configs() + z) * n + i];
    }
};

// Checks the generator, positivity and finiteness, fills the derived bounds.
// Throws ValidationError.
void validate_params(ModelParams& p);

// All 2^n configurations in increasing bitmask order.
std::vector<Config> enumerate_default_configs(int n);

ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);
ModelParams load_params(const std::string& path);

}  // namespace hrc
