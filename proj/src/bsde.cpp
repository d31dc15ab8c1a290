#include "hrc/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "hrc/filter.hpp"
#include "hrc/rng.hpp"
#include "hrc/sim.hpp"

namespace hrc {

// ---------------------------------------------------------------- grid

SimplexGrid::SimplexGrid(int m, int resolution, double delta)
    : m_(m), res_(resolution), delta_(delta) {
    if (m < 1 || m > 3) throw ValidationError("simplex grid supports m in {1,2,3}");
    if (m > 1 && resolution < 2) throw ValidationError("grid resolution must be at least 2");
    if (!(delta >= 0.0) || delta * m >= 1.0) throw ValidationError("grid margin out of range");
    if (m == 1) {
        nodes_ = {1.0};
        res_ = 1;
    } else if (m == 2) {
        for (int j = 0; j < resolution; ++j) {
            double x = delta + (1.0 - 2.0 * delta) * double(j) / double(resolution - 1);
            nodes_.push_back(x);
            nodes_.push_back(1.0 - x);
        }
    } else {
        const int L = resolution - 1;
        const double span = 1.0 - 3.0 * delta;
        for (int i = 0; i <= L; ++i) {
            row_start_.push_back(std::uint32_t(nodes_.size() / 3));
            for (int j = 0; j <= L - i; ++j) {
                double a = double(i) / L, b = double(j) / L;
                double pa = delta + span * a, pb = delta + span * b;
                nodes_.push_back(pa);
                nodes_.push_back(pb);
                nodes_.push_back(1.0 - pa - pb);
            }
        }
    }
}

SimplexGrid::Stencil SimplexGrid::locate(std::span<const double> p) const {
    Stencil s;
    if (m_ == 1) {
        s.count = 1;
        s.w[0] = 1.0;
        return s;
    }
    if (m_ == 2) {
        const int G = res_;
        double x = (p[0] - delta_) / (1.0 - 2.0 * delta_) * (G - 1);
        x = std::clamp(x, 0.0, double(G - 1));
        int i0 = std::min(int(x), G - 2);
        double f = x - i0;
        s.count = 2;
        s.idx = {std::uint32_t(i0), std::uint32_t(i0 + 1), 0};
        s.w = {1.0 - f, f, 0.0};
        return s;
    }
    const int L = res_ - 1;
    const double span = 1.0 - 3.0 * delta_;
    double a = std::max(0.0, (p[0] - delta_) / span * L);
    double b = std::max(0.0, (p[1] - delta_) / span * L);
    if (a + b > L) {
        double sc = L / (a + b);
        a *= sc;
        b *= sc;
    }
    int i0 = std::min(int(a), L - 1);
    int j0 = std::min(int(b), L - 1 - i0);
    double fa = a - i0, fb = b - j0;
    auto at = [&](int i, int j) { return row_start_[i] + std::uint32_t(j); };
    s.count = 3;
    if (fa + fb <= 1.0 || i0 + j0 == L - 1) {
        s.idx = {at(i0, j0), at(i0 + 1, j0), at(i0, j0 + 1)};
        s.w = {1.0 - fa - fb, fa, fb};
    } else {
        s.idx = {at(i0 + 1, j0 + 1), at(i0, j0 + 1), at(i0 + 1, j0)};
        s.w = {fa + fb - 1.0, 1.0 - fa, 1.0 - fb};
    }
    return s;
}

void gauss_hermite(int count, std::vector<double>& nodes, std::vector<double>& weights) {
    if (count < 1) throw ValidationError("quadrature needs at least one node");
    // Golub-Welsch for the probabilists' weight exp(-x^2/2).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
    for (int k = 1; k < count; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(double(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(count);
    weights.resize(count);
    for (int k = 0; k < count; ++k) {
        nodes[k] = es.eigenvalues()(k);
        double v = es.eigenvectors()(0, k);
        weights[k] = v * v;
    }
    // Symmetrize so odd moments vanish to rounding.
    for (int k = 0; k < count / 2; ++k) {
        double x = 0.5 * (nodes[count - 1 - k] - nodes[k]);
        double w = 0.5 * (weights[k] + weights[count - 1 - k]);
        nodes[k] = -x;
        nodes[count - 1 - k] = x;
        weights[k] = weights[count - 1 - k] = w;
    }
    if (count % 2) nodes[count / 2] = 0.0;
}

GridSolution::Eval GridSolution::evaluate(std::size_t k, std::span<const double> p,
                                          Config z) const {
    Eval e;
    const auto st = grid.locate(p);
    for (int c = 0; c < st.count; ++c) e.y += st.w[c] * Y[slot(k, z, st.idx[c])];
    if (k < steps) {
        for (int c = 0; c < st.count; ++c) {
            const std::size_t s = slot(k, z, st.idx[c]) * n;
            for (int i = 0; i < n; ++i) {
                e.z[i] += st.w[c] * Z[s + i];
                e.v[i] += st.w[c] * V[s + i];
            }
        }
    }
    return e;
}

std::size_t GridSolution::step_of(double t) const {
    double x = std::floor(t / dt + 1e-9);
    if (x < 0.0) return 0;
    return std::min(std::size_t(x), steps - 1);
}

namespace {

struct QuadPoint {
    SimplexGrid::Stencil st;
    double w = 0.0;
    std::array<double, kMaxAssets> zw{};  // w * dW_i / dt
};

double apply(const SimplexGrid::Stencil& st, const double* values) {
    double s = 0.0;
    for (int c = 0; c < st.count; ++c) s += st.w[c] * values[st.idx[c]];
    return s;
}

}  // namespace

GridSolution solve_grid(const ModelParams& prm, const GridOptions& opt) {
    const int n = prm.n, m = prm.m;
    if (m > 3) throw ValidationError("grid solver supports m <= 3; use the regression solver");
    if (n > 2) throw ValidationError("grid solver supports n <= 2; use the regression solver");
    if (opt.steps < 1) throw ValidationError("need at least one time step");
    GridSolution sol;
    sol.n = n;
    sol.m = m;
    sol.steps = opt.steps;
    sol.horizon = prm.horizon;
    sol.dt = prm.horizon / double(opt.steps);
    sol.trunc = opt.trunc;
    sol.grid = SimplexGrid(m, opt.resolution, opt.delta);
    const double dt = sol.dt;
    const std::size_t K = opt.steps, nn = sol.grid.size(), nc = sol.num_configs();

    std::vector<double> gx, gw;
    gauss_hermite(opt.quad_nodes, gx, gw);
    const double sdt = std::sqrt(dt);

    // Transition stencils are time-homogeneous: build them once.
    std::vector<DriverPoint> points(nc * nn);
    std::vector<std::size_t> qoff(nc * nn + 1, 0);
    std::vector<QuadPoint> quad;
    std::vector<SimplexGrid::Stencil> jumps(nc * nn * n);
    std::vector<double> p(m), q(m);
    std::vector<double> dW(n);
    for (Config z = 0; z < nc; ++z) {
        std::vector<int> alive;
        for (int i = 0; i < n; ++i)
            if (!defaulted(z, i)) alive.push_back(i);
        std::size_t combos = 1;
        for (std::size_t a = 0; a < alive.size(); ++a) combos *= std::size_t(opt.quad_nodes);
        for (std::size_t j = 0; j < nn; ++j) {
            const auto node = sol.grid.node(j);
            points[z * nn + j] = driver_point(prm, node, z);
            for (std::size_t c = 0; c < combos; ++c) {
                std::size_t rem = c;
                double w = 1.0;
                std::fill(dW.begin(), dW.end(), 0.0);
                for (int i : alive) {
                    int g = int(rem % std::size_t(opt.quad_nodes));
                    rem /= std::size_t(opt.quad_nodes);
                    dW[i] = sdt * gx[g];
                    w *= gw[g];
                }
                std::copy(node.begin(), node.end(), q.begin());
                if (filter_step(prm, q, z, dW, dt)) ++sol.projections;
                QuadPoint qp;
                qp.st = sol.grid.locate(q);
                qp.w = w;
                for (int i : alive) qp.zw[i] = w * dW[i] / dt;
                quad.push_back(qp);
            }
            qoff[z * nn + j + 1] = quad.size();
            for (int i : alive) {
                std::copy(node.begin(), node.end(), p.begin());
                jump_update(prm, p, z, i);
                jumps[(z * nn + j) * n + i] = sol.grid.locate(p);
            }
        }
    }

    sol.Y.assign((K + 1) * nc * nn, 0.0);
    sol.Z.assign(K * nc * nn * n, 0.0);
    sol.V.assign(K * nc * nn * n, 0.0);
    std::vector<double> bmo_next(nc * nn, 0.0), bmo_cur(nc * nn, 0.0);
    std::vector<double> guess(nc * nn * n, 0.0);
    std::array<double, kMaxAssets> Zl{}, Vl{};

    for (std::size_t kk = K; kk-- > 0;) {
        const double* Ynext = &sol.Y[(kk + 1) * nc * nn];
        double* Ycur = &sol.Y[kk * nc * nn];
        for (Config z = 0; z < nc; ++z) {
            const int s = survivors(z, n);
            const double stay = std::exp(-double(s) * dt);
            const double each = s > 0 ? (1.0 - stay) / s : 0.0;
            const double* Yz = Ynext + z * nn;
            for (std::size_t j = 0; j < nn; ++j) {
                const std::size_t id = z * nn + j;
                double cont = 0.0, bmo = 0.0;
                Zl.fill(0.0);
                Vl.fill(0.0);
                for (std::size_t c = qoff[id]; c < qoff[id + 1]; ++c) {
                    const QuadPoint& qp = quad[c];
                    const double y = apply(qp.st, Yz);
                    cont += qp.w * y;
                    bmo += qp.w * apply(qp.st, &bmo_next[z * nn]);
                    for (int i = 0; i < n; ++i) Zl[i] += qp.zw[i] * y;
                }
                cont *= stay;
                bmo *= stay;
                for (int i = 0; i < n; ++i) {
                    if (defaulted(z, i)) {
                        Zl[i] = 0.0;
                        continue;
                    }
                    const Config zi = with_default(z, i);
                    const auto& js = jumps[id * n + i];
                    const double yj = apply(js, Ynext + zi * nn);
                    Vl[i] = yj - Yz[j];
                    cont += each * yj;
                    bmo += each * apply(js, &bmo_next[zi * nn]);
                    bmo += Zl[i] * Zl[i] * dt;
                }
                const std::span<const double> zs(Zl.data(), n), vs(Vl.data(), n);
                const double f = opt.driver ? opt.driver(points[id], zs, vs)
                                            : driver_f(prm, points[id], zs, vs, opt.trunc,
                                                       &guess[id * n]);
                Ycur[id] = cont - f * dt;
                bmo_cur[id] = bmo;
                double* Zo = &sol.Z[(kk * nc * nn + id) * n];
                double* Vo = &sol.V[(kk * nc * nn + id) * n];
                for (int i = 0; i < n; ++i) {
                    Zo[i] = Zl[i];
                    Vo[i] = Vl[i];
                }
            }
        }
        for (double b : bmo_cur) sol.bmo_sup = std::max(sol.bmo_sup, b);
        std::swap(bmo_cur, bmo_next);
        for (double y : std::span<const double>(Ycur, nc * nn))
            if (!std::isfinite(y)) throw NumericalError("grid solver produced a non-finite value");
    }
    return sol;
}

// ---------------------------------------------------------------- regression

namespace {

std::vector<std::vector<int>> monomials(int vars, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(vars, 0);
    for (int d = 0; d <= degree; ++d) {
        // all exponent vectors with total degree d, in lexicographic order
        std::function<void(int, int)> rec = [&](int v, int left) {
            if (v == vars - 1) {
                e[v] = left;
                out.push_back(e);
                return;
            }
            for (int a = left; a >= 0; --a) {
                e[v] = a;
                rec(v + 1, left - a);
            }
        };
        if (vars == 0) {
            if (d == 0) out.push_back({});
        } else {
            rec(0, d);
        }
    }
    return out;
}

void basis_row(const std::vector<std::vector<int>>& exps, std::span<const double> p,
               double* row) {
    for (std::size_t b = 0; b < exps.size(); ++b) {
        double v = 1.0;
        for (std::size_t c = 0; c < exps[b].size(); ++c)
            for (int a = 0; a < exps[b][c]; ++a) v *= 2.0 * p[c] - 1.0;
        row[b] = v;
    }
}

}  // namespace

double LsmcResult::basis(std::size_t k, Config z, std::span<const double> p) const {
    const auto& beta = coeffs[k][z];
    const auto exps = monomials(int(p.size()) - 1, degree);
    std::vector<double> row(exps.size());
    basis_row(exps, p, row.data());
    double s = 0.0;
    for (std::size_t b = 0; b < row.size() && b < beta.size(); ++b) s += beta[b] * row[b];
    return s;
}

LsmcResult solve_lsmc(const ModelParams& prm, const LsmcOptions& opt) {
    const int n = prm.n, m = prm.m;
    check_prior(prm, opt.p0);
    if (opt.paths < 2 || opt.steps < 1) throw ValidationError("regression solver needs paths and steps");
    if (opt.degree < 0) throw ValidationError("basis degree must be non-negative");
    const std::size_t M = opt.paths, K = opt.steps, nc = prm.num_configs();
    const double dt = prm.horizon / double(K);

    std::vector<double> P((K + 1) * M * m);
    std::vector<Config> Zc((K + 1) * M);
    std::vector<double> DW(K * M * n);
    for (std::size_t r = 0; r < M; ++r) {
        Rng rng = path_stream(opt.seed, r);
        StatePath sp = simulate_pstar_path(prm, opt.p0, opt.z0, 0.0, dt, K, rng);
        for (std::size_t k = 0; k <= K; ++k) {
            std::copy(sp.p_at(k), sp.p_at(k) + m, &P[(k * M + r) * m]);
            Zc[k * M + r] = sp.z[k];
            if (k < K) std::copy(sp.dW_at(k), sp.dW_at(k) + n, &DW[(k * M + r) * n]);
        }
    }

    const auto exps = monomials(m - 1, opt.degree);
    const std::size_t B = exps.size();
    LsmcResult res;
    res.degree = opt.degree;
    res.coeffs.assign(K + 1, std::vector<std::vector<double>>(nc, std::vector<double>(B, 0.0)));

    auto fitted = [&](std::size_t k, Config z, std::span<const double> p) {
        double row[64];
        basis_row(exps, p, row);
        double s = 0.0;
        for (std::size_t b = 0; b < B; ++b) s += res.coeffs[k][z][b] * row[b];
        return s;
    };
    if (B > 64) throw ValidationError("regression basis too large");

    std::vector<double> Ynext(M, 0.0), Ycur(M, 0.0);
    std::vector<std::vector<std::size_t>> bucket(nc);
    std::vector<double> pj(m);
    for (std::size_t kk = K; kk-- > 0;) {
        for (auto& b : bucket) b.clear();
        for (std::size_t r = 0; r < M; ++r) bucket[Zc[kk * M + r]].push_back(r);
        for (Config z = 0; z < nc; ++z) {
            const auto& rows = bucket[z];
            if (rows.empty()) {
                res.coeffs[kk][z] = res.coeffs[kk + 1][z];
                continue;
            }
            // Use a lower-degree prefix when few paths sit in this configuration.
            std::size_t Bz = B;
            while (Bz > 1 && rows.size() < 10 * Bz) --Bz;
            Eigen::MatrixXd X(rows.size(), Bz);
            Eigen::VectorXd y(rows.size());
            Eigen::MatrixXd zt(rows.size(), n);
            double row[64];
            for (std::size_t a = 0; a < rows.size(); ++a) {
                const std::size_t r = rows[a];
                basis_row(exps, std::span<const double>(&P[(kk * M + r) * m], m), row);
                for (std::size_t b = 0; b < Bz; ++b) X(a, b) = row[b];
                y(a) = Ynext[r];
                for (int i = 0; i < n; ++i) zt(a, i) = Ynext[r] * DW[(kk * M + r) * n + i] / dt;
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            const Eigen::VectorXd cont = X * qr.solve(y);
            const Eigen::MatrixXd zfit = X * qr.solve(zt);
            std::array<double, kMaxAssets> Zl{}, Vl{};
            for (std::size_t a = 0; a < rows.size(); ++a) {
                const std::size_t r = rows[a];
                const std::span<const double> pk(&P[(kk * M + r) * m], m);
                const DriverPoint pt = driver_point(prm, pk, z);
                const double here = fitted(kk + 1, z, pk);
                for (int i = 0; i < n; ++i) {
                    if (defaulted(z, i)) {
                        Zl[i] = Vl[i] = 0.0;
                        continue;
                    }
                    Zl[i] = zfit(a, i);
                    std::copy(pk.begin(), pk.end(), pj.begin());
                    jump_update(prm, pj, z, i);
                    Vl[i] = fitted(kk + 1, with_default(z, i), pj) - here;
                }
                const std::span<const double> zs(Zl.data(), n), vs(Vl.data(), n);
                const double f = opt.driver ? opt.driver(pt, zs, vs)
                                            : driver_f(prm, pt, zs, vs, opt.trunc);
                Ycur[r] = cont(a) - f * dt;
                if (kk == 0 && a == 0) {
                    res.z0 = Zl;
                    res.v0 = Vl;
                }
            }
            for (std::size_t a = 0; a < rows.size(); ++a) y(a) = Ycur[rows[a]];
            const Eigen::VectorXd beta = qr.solve(y);
            auto& dst = res.coeffs[kk][z];
            std::fill(dst.begin(), dst.end(), 0.0);
            for (std::size_t b = 0; b < Bz; ++b) dst[b] = beta(b);
        }
        std::swap(Ynext, Ycur);
    }
    double s = 0.0;
    for (double v : Ynext) s += v;
    res.y0 = s / double(M);
    return res;
}

// ---------------------------------------------------------------- truncation

GridSolution refine_truncation(const ModelParams& prm, GridOptions opt, double level0,
                               double tol, int max_doublings, RefinementTrace* trace) {
    double level = level0 > 0.0 ? level0 : initial_truncation_level(prm);
    RefinementTrace local;
    RefinementTrace& tr = trace ? *trace : local;
    tr = RefinementTrace{};
    opt.trunc = Truncation::at(level);
    GridSolution prev = solve_grid(prm, opt);
    tr.levels.push_back(level);
    for (int j = 1; j <= max_doublings; ++j) {
        level *= 2.0;
        opt.trunc = Truncation::at(level);
        GridSolution cur = solve_grid(prm, opt);
        double gap = 0.0, inc = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < cur.Y.size(); ++s) {
            const double d = cur.Y[s] - prev.Y[s];
            gap = std::max(gap, std::abs(d));
            inc = std::min(inc, d);
        }
        tr.levels.push_back(level);
        tr.gaps.push_back(gap);
        tr.min_increase.push_back(inc);
        if (gap < tol) {
            tr.converged = true;
            return cur;
        }
        prev = std::move(cur);
    }
    throw NumericalError("truncation refinement did not converge after " +
                         std::to_string(max_doublings) + " doublings");
}

// ---------------------------------------------------------------- bounds

double bmo_reference_bound(const ModelParams& prm) {
    const double th = prm.risk_aversion, C = prm.cap_bound, T = prm.horizon;
    const double zs = zeta_bound(prm, 0.0, 0);
    const double g = C + std::abs(prm.rate);
    const int n = prm.n;
    // |f(xi,v) - f(0,0)| <= R4 + R5 |xi|^2 whenever |v| <= 2 sup|zeta|.
    double r4 = 2.0 * n * zs + n * std::max(bound_r1(prm), bound_r3(prm));
    for (double s : prm.vol)
        r4 += C * C / (2.0 * s * s) + th * g * g / (4.0 * s * s) + C * (1.0 + std::exp(2.0 * zs));
    const double r5 = 1.0, r0 = 1.0;
    const double beta = r5 + std::sqrt(r5 * r5 + 2.0 * r0);
    const double r6 = std::exp(beta * zs) * (1.0 + r4 * beta * T +
                                             n * T * (std::exp(2.0 * beta * zs) + 1.0) +
                                             2.0 * n * T * beta * zs);
    return std::exp(beta * zs) * r6 / r0;
}

BoundsReport check_solution_bounds(const ModelParams& prm, const GridSolution& sol) {
    BoundsReport rep;
    const std::size_t nn = sol.grid.size(), nc = sol.num_configs();
    const double level = sol.trunc.active ? sol.trunc.level : initial_truncation_level(prm);
    rep.slack = 10.0 * sol.dt * lipschitz_bound(prm, level);
    rep.zeta_sup = zeta_bound(prm, 0.0, 0);
    rep.y_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= sol.steps; ++k) {
        const double t = double(k) * sol.dt;
        for (Config z = 0; z < nc; ++z) {
            const double bound = zeta_bound(prm, t, z);
            for (std::size_t j = 0; j < nn; ++j) {
                const double y = std::abs(sol.y(k, z, j));
                rep.y_sup = std::max(rep.y_sup, y);
                rep.y_excess = std::max(rep.y_excess, y - bound);
            }
        }
    }
    rep.y_ok = rep.y_excess <= rep.slack;
    for (double v : sol.V) rep.v_sup = std::max(rep.v_sup, std::abs(v));
    rep.v_ok = rep.v_sup <= 2.0 * rep.y_sup + 1e-12;
    rep.bmo_stat = sol.bmo_sup;
    rep.bmo_bound = bmo_reference_bound(prm);
    rep.bmo_ok = rep.bmo_stat <= rep.bmo_bound;
    return rep;
}

// ---------------------------------------------------------------- export

namespace {
void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}
}  // namespace

void write_solution_csv(std::ostream& os, const GridSolution& sol, std::size_t stride) {
    const int n = sol.n;
    const std::size_t nn = sol.grid.size(), nc = sol.num_configs();
    if (stride < 1) stride = 1;
    os << "time,node,config,Y";
    for (int i = 0; i < n; ++i) os << ",Z_" << i + 1;
    for (int i = 0; i < n; ++i) os << ",V_" << i + 1;
    os << '\n';
    for (std::size_t k = 0; k <= sol.steps; ++k) {
        if (k % stride != 0 && k != sol.steps) continue;
        for (Config z = 0; z < nc; ++z)
            for (std::size_t j = 0; j < nn; ++j) {
                put(os, double(k) * sol.dt);
                os << ',' << j << ',' << z << ',';
                put(os, sol.y(k, z, j));
                for (int i = 0; i < n; ++i) {
                    os << ',';
                    put(os, k < sol.steps ? sol.Z[sol.slot(k, z, j) * n + i] : 0.0);
                }
                for (int i = 0; i < n; ++i) {
                    os << ',';
                    put(os, k < sol.steps ? sol.V[sol.slot(k, z, j) * n + i] : 0.0);
                }
                os << '\n';
            }
    }
}

nlohmann::json solution_metadata(const ModelParams& prm, const GridSolution& sol) {
    nlohmann::json j;
    j["assets"] = sol.n;
    j["regimes"] = sol.m;
    j["steps"] = sol.steps;
    j["dt"] = sol.dt;
    j["horizon"] = sol.horizon;
    j["grid"] = {{"resolution", sol.grid.resolution()},
                 {"margin", sol.grid.delta()},
                 {"nodes", sol.grid.size()}};
    nlohmann::json coords = nlohmann::json::array();
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        auto p = sol.grid.node(k);
        coords.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["node_coordinates"] = coords;
    j["truncation"] = sol.trunc.active ? nlohmann::json(sol.trunc.level) : nlohmann::json("exact");
    j["filter_projections"] = sol.projections;
    j["constants"] = {{"eps", prm.eps_bound},
                      {"cap", prm.cap_bound},
                      {"r1", bound_r1(prm)},
                      {"r3", bound_r3(prm)},
                      {"zeta_bound", zeta_bound(prm, 0.0, 0)},
                      {"initial_level", initial_truncation_level(prm)}};
    if (sol.trunc.active) {
        const double N = sol.trunc.level;
        j["constants"]["rn"] = bound_rn(prm, N);
        j["constants"]["rn1"] = bound_rn1(prm, N);
        j["constants"]["rn2"] = bound_rn2(prm, N);
        j["constants"]["rn3"] = bound_rn3(prm, N);
    }
    return j;
}

}  // namespace hrc
