#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "hrc/driver.hpp"
#include "hrc/model.hpp"

#include "json.hpp"

namespace hrc {

// Lattice on the probability simplex restricted to {p_k >= delta}, with
// piecewise-linear interpolation (intervals for m = 2, triangles for m = 3).
class SimplexGrid {
public:
    struct Stencil {
        std::array<std::uint32_t, 3> idx{};
        std::array<double, 3> w{};
        int count = 0;
    };

    SimplexGrid() = default;
    SimplexGrid(int m, int resolution, double delta);

    int m() const { return m_; }
    int resolution() const { return res_; }
    double delta() const { return delta_; }
    std::size_t size() const { return nodes_.size() / std::size_t(m_); }
    std::span<const double> node(std::size_t j) const {
        return {nodes_.data() + j * m_, std::size_t(m_)};
    }
    Stencil locate(std::span<const double> p) const;

private:
    int m_ = 1, res_ = 1;
    double delta_ = 0.0;
    std::vector<double> nodes_;
    std::vector<std::uint32_t> row_start_;  // m = 3 lattice rows
};

// Replaces the driver, e.g. for zero-driver tests. Arguments: point, Z, V.
using DriverOverride =
    std::function<double(const DriverPoint&, std::span<const double>, std::span<const double>)>;

struct GridOptions {
    std::size_t steps = 1000;
    int resolution = 201;
    double delta = 1e-6;
    int quad_nodes = 7;
    Truncation trunc = Truncation::exact();
    DriverOverride driver;
};

// Backward solution on the time grid t_k = k T / K, for every configuration and node.
struct GridSolution {
    int n = 0, m = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    double horizon = 0.0;
    SimplexGrid grid;
    Truncation trunc;
    std::vector<double> Y;  // (K+1) x 2^n x nodes
    std::vector<double> Z;  // K x 2^n x nodes x n
    std::vector<double> V;  // K x 2^n x nodes x n
    double bmo_sup = 0.0;   // sup of E[sum int (1-H)|Z|^2 | node]
    int projections = 0;

    std::size_t num_configs() const { return std::size_t(1) << n; }
    std::size_t slot(std::size_t k, Config z, std::size_t node) const {
        return (k * num_configs() + z) * grid.size() + node;
    }
    double y(std::size_t k, Config z, std::size_t node) const { return Y[slot(k, z, node)]; }

    struct Eval {
        double y = 0.0;
        std::array<double, kMaxAssets> z{}, v{};
    };
    // Linear interpolation in p at time index k (Z and V need k < K).
    Eval evaluate(std::size_t k, std::span<const double> p, Config z) const;
    double value(std::span<const double> p, Config z) const { return evaluate(0, p, z).y; }
    // Index k with t_k <= t < t_{k+1}, clamped to [0, K-1].
    std::size_t step_of(double t) const;
};

// Throws ValidationError unless m <= 3 and n <= 2.
GridSolution solve_grid(const ModelParams& prm, const GridOptions& opt);

// Gauss-Hermite nodes and weights for E[g(N(0,1))] (weights sum to one).
void gauss_hermite(int count, std::vector<double>& nodes, std::vector<double>& weights);

struct LsmcOptions {
    std::size_t paths = 100000;
    std::size_t steps = 50;
    int degree = 4;
    std::uint64_t seed = 1;
    std::vector<double> p0;
    Config z0 = 0;
    Truncation trunc = Truncation::exact();
    DriverOverride driver;
};

struct LsmcResult {
    double y0 = 0.0;
    std::array<double, kMaxAssets> z0{}, v0{};
    // Fitted value coefficients, [k][config][basis].
    std::vector<std::vector<std::vector<double>>> coeffs;
    int degree = 0;
    double basis(std::size_t k, Config z, std::span<const double> p) const;
};

LsmcResult solve_lsmc(const ModelParams& prm, const LsmcOptions& opt);

struct RefinementTrace {
    std::vector<double> levels;
    std::vector<double> gaps;           // sup |Y^{2N} - Y^N|
    std::vector<double> min_increase;   // inf (Y^{2N} - Y^N)
    bool converged = false;
};

// Solves at levels N0, 2 N0, ... until successive sup gaps drop strictly below tol.
// level0 <= 0 selects the automatic initial level. Throws NumericalError after max_doublings.
GridSolution refine_truncation(const ModelParams& prm, GridOptions opt, double level0,
                               double tol, int max_doublings, RefinementTrace* trace = nullptr);

struct BoundsReport {
    double y_sup = 0.0;
    double zeta_sup = 0.0;   // bound for sup |zeta|
    double y_excess = 0.0;   // max over nodes of |Y| - bound(t_k, z)
    double slack = 0.0;
    bool y_ok = false;
    double v_sup = 0.0;
    bool v_ok = false;
    double bmo_stat = 0.0;
    double bmo_bound = 0.0;
    bool bmo_ok = false;
};

BoundsReport check_solution_bounds(const ModelParams& prm, const GridSolution& sol);
double bmo_reference_bound(const ModelParams& prm);

// Columns: time, node, config, Y, Z_1..n, V_1..n; every stride-th time step plus the last.
void write_solution_csv(std::ostream& os, const GridSolution& sol, std::size_t stride = 1);
nlohmann::json solution_metadata(const ModelParams& prm, const GridSolution& sol);

}  // namespace hrc
