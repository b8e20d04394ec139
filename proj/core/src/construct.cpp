#include "multikink/construct.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mk {

namespace {

// Nodes at integer multiples of dx, so grids of different extent share nodes.
UniformGrid anchored_grid(double lo, double hi, double dx) {
    const double start = std::floor(lo / dx);
    const double stop = std::ceil(hi / dx);
    return UniformGrid{start * dx, dx, static_cast<std::size_t>(stop - start) + 1};
}

std::pair<double, double> center_range(const MultikinkAnsatz& ansatz, double t) {
    const auto& p = ansatz.params();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < p.kinks(); ++k) {
        const double c = p.velocities[k] * t + p.shifts[k];
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (p.kinks() == 0) lo = hi = 0.0;
    return {lo, hi};
}

double default_margin(const MultikinkAnsatz& ansatz, const ConstructConfig& config) {
    return config.margin > 0.0 ? config.margin : 15.0 / ansatz.min_mass();
}

// -W'(H) + sum_k W'(H_k) on the grid at time t.
std::vector<double> cross_term(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid) {
    const Potential& W = ansatz.model();
    std::vector<double> H(grid.n, ansatz.omega_left());
    std::vector<double> sum(grid.n, 0.0);
    for (std::size_t k = 0; k < ansatz.kinks(); ++k) {
        const KinkProfile& prof = ansatz.profile(k);
        const double base = ansatz.omega_before(k);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double hk = prof.value(ansatz.argument(k, t, grid.x(i)));
            H[i] += hk - base;
            sum[i] += W.derivative(hk, 1);
        }
    }
    for (std::size_t i = 0; i < grid.n; ++i) sum[i] -= W.derivative(H[i], 1);
    return sum;
}

double n0_norm(const MultikinkAnsatz& ansatz, double t, double dx, double margin) {
    const auto [lo, hi] = center_range(ansatz, t);
    const UniformGrid grid = anchored_grid(lo - margin, hi + margin, dx);
    const auto c = cross_term(ansatz, t, grid);
    return std::sqrt(simpson_dot(c, c, grid.dx));
}

double energy_norm(std::span<const double> g, std::span<const double> g_t, double dx) {
    const auto gx = d_dx(g, dx);
    std::vector<double> density(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) density[i] = g[i] * g[i] + gx[i] * gx[i] + g_t[i] * g_t[i];
    return std::sqrt(std::max(simpson(density, dx), 0.0));
}

ConstructPlan make_plan(const MultikinkAnsatz& ansatz, const ConstructConfig& config, double T, double delta,
                        double eta, double T_final, double n0) {
    ConstructPlan plan;
    plan.T = T;
    plan.delta = delta;
    plan.eta = eta;
    plan.dt = config.dt;
    plan.levels = static_cast<std::size_t>(std::ceil((T_final - T) / config.dt - 1e-9)) + 1;
    plan.T_final = T + static_cast<double>(plan.levels - 1) * config.dt;
    plan.n0_at_T = n0;
    if (config.x_min < config.x_max) {
        plan.grid = anchored_grid(config.x_min, config.x_max, config.dx);
    } else {
        const double margin = default_margin(ansatz, config);
        const auto [lo0, hi0] = center_range(ansatz, T);
        const auto [lo1, hi1] = center_range(ansatz, plan.T_final);
        plan.grid = anchored_grid(std::min(lo0, lo1) - margin, std::max(hi0, hi1) + margin, config.dx);
    }
    return plan;
}

LevelField n0_levels(const ConstructionProblem& problem) {
    LevelField f(problem.levels());
    for (std::size_t l = 0; l < problem.levels(); ++l) f[l].assign(problem.cross(l).begin(), problem.cross(l).end());
    return f;
}

}  // namespace

double weighted_norm(const SpaceTimeSlab& slab, const WeightedNormConfig& config) {
    double best = -1.0;
    for (const FieldState& s : slab.snapshots) {
        if (s.t < config.T - 1e-9) continue;
        best = std::max(best, std::exp(config.delta * s.t) * energy_norm(s.phi, s.phi_dot, s.grid.dx));
    }
    if (best < 0.0) throw ArgumentError("weighted_norm: no snapshot at or beyond T");
    return best;
}

ConstructPlan plan_construction(const MultikinkAnsatz& ansatz, const ConstructConfig& config) {
    if (!(config.dx > 0.0) || !(config.dt > 0.0)) throw ConfigError("construct: dx and dt must be positive");
    if (config.dt > 0.9 * config.dx) {
        std::ostringstream msg;
        msg << "construct: CFL violation, dt = " << config.dt << " exceeds 0.9 * dx = " << 0.9 * config.dx;
        throw ConfigError(msg.str());
    }
    if (config.delta < 0.0) throw ConfigError("construct: delta must be positive");
    const double margin = default_margin(ansatz, config);
    const double step = config.scan_step > 0.0 ? config.scan_step : 0.5;

    double T = config.T;
    double n0 = 0.0;
    if (T <= 0.0) {
        T = step;
        while ((n0 = n0_norm(ansatz, T, config.dx, margin)) > config.n0_threshold) {
            T += step;
            if (T > 1000.0) throw NumericalError("construct: ||N(0)(t)|| stays above threshold up to t = 1000");
        }
    } else {
        n0 = n0_norm(ansatz, T, config.dx, margin);
    }

    double eta = 0.0;
    {
        std::vector<double> ts;
        std::vector<double> logs;
        for (int j = 0; j <= 20; ++j) {
            const double t = T + step * j;
            const double v = n0_norm(ansatz, t, config.dx, margin);
            if (v > 1e-13) {
                ts.push_back(t);
                logs.push_back(std::log(v));
            }
        }
        if (ts.size() >= 3) eta = std::max(0.0, -fit_line(ts, logs).slope);
    }
    double delta = config.delta;
    if (delta <= 0.0) delta = eta > 0.0 ? 0.5 * eta : 0.5 * ansatz.min_mass();

    if (config.T_final > T) return make_plan(ansatz, config, T, delta, eta, config.T_final, n0);
    if (n0 == 0.0 || eta == 0.0) return make_plan(ansatz, config, T, delta, eta, T + 10.0, n0);

    // Double the backward-solve horizon until R N(0) on [T, T + span] stops moving.
    double span = std::max(10.0, std::log(1.0 / config.truncation_tol) / eta);
    ConstructionProblem shorter(ansatz, make_plan(ansatz, config, T, delta, eta, T + span, n0));
    SpaceTimeSlab h_short = solve_R(shorter, n0_levels(shorter));
    for (int round = 0; round < 6; ++round) {
        ConstructionProblem longer(ansatz, make_plan(ansatz, config, T, delta, eta, T + 2.0 * span, n0));
        SpaceTimeSlab h_long = solve_R(longer, n0_levels(longer));
        const UniformGrid& gs = shorter.grid();
        const UniformGrid& gl = longer.grid();
        const auto offset = static_cast<long>(std::llround((gs.x_min - gl.x_min) / gl.dx));
        double change = 0.0;
        for (std::size_t l = 0; l < shorter.levels(); ++l) {
            const auto& a = h_short.snapshots[l].phi;
            const auto& b = h_long.snapshots[l].phi;
            for (std::size_t i = 0; i < gs.n; ++i) {
                const long j = static_cast<long>(i) + offset;
                const double other = (j >= 0 && j < static_cast<long>(gl.n)) ? b[static_cast<std::size_t>(j)] : 0.0;
                change = std::max(change, std::abs(a[i] - other));
            }
        }
        if (change < config.truncation_tol) return longer.plan();
        span *= 2.0;
        shorter = std::move(longer);
        h_short = std::move(h_long);
    }
    throw NumericalError("construct: backward solve does not settle when doubling T_final");
}

ConstructionProblem::ConstructionProblem(MultikinkAnsatz ansatz, const ConstructConfig& config)
    : ansatz_(std::move(ansatz)), plan_(plan_construction(ansatz_, config)) {
    sample();
}

ConstructionProblem::ConstructionProblem(MultikinkAnsatz ansatz, ConstructPlan plan)
    : ansatz_(std::move(ansatz)), plan_(std::move(plan)) {
    if (plan_.levels < 2 || plan_.grid.n < 3) throw ArgumentError("ConstructionProblem: plan too small");
    sample();
}

void ConstructionProblem::sample() {
    const Potential& W = ansatz_.model();
    const UniformGrid& grid = plan_.grid;
    const std::size_t L = plan_.levels;
    const std::size_t n = grid.n;
    H_.assign(L, std::vector<double>(n));
    H_dot_.assign(L, std::vector<double>(n));
    V_.assign(L, std::vector<double>(n));
    cross_.assign(L, std::vector<double>(n));
    v_minus_w2_.assign(L, std::vector<double>(n));
    for (std::size_t l = 0; l < L; ++l) {
        const double t = time(l);
        const FieldState s = multikink(ansatz_, t, grid);
        H_[l] = s.phi;
        H_dot_[l] = s.phi_dot;
        V_[l] = potential_V(ansatz_, t, grid);
        cross_[l] = cross_term(ansatz_, t, grid);
        for (std::size_t i = 0; i < n; ++i) v_minus_w2_[l][i] = V_[l][i] - W.derivative(H_[l][i], 2);
    }
}

std::vector<double> ConstructionProblem::nonlinearity(std::size_t l, std::span<const double> g) const {
    const Potential& W = ansatz_.model();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = cross_[l][i] + v_minus_w2_[l][i] * g[i] - W.first_derivative_remainder(H_[l][i], g[i]);
    }
    return out;
}

std::vector<double> nonlinearity_N(const MultikinkAnsatz& ansatz, const FieldState& g, double t) {
    const Potential& W = ansatz.model();
    const FieldState H = multikink(ansatz, t, g.grid);
    const auto V = potential_V(ansatz, t, g.grid);
    auto out = cross_term(ansatz, t, g.grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += (V[i] - W.derivative(H.phi[i], 2)) * g.phi[i] - W.first_derivative_remainder(H.phi[i], g.phi[i]);
    }
    return out;
}

SpaceTimeSlab solve_R(const ConstructionProblem& problem, const LevelField& f, const LevelField& extra) {
    const std::size_t L = problem.levels();
    const UniformGrid& grid = problem.grid();
    const std::size_t n = grid.n;
    if (f.size() != L || (!extra.empty() && extra.size() != L)) {
        throw ArgumentError("solve_R: forcing must provide every time level");
    }
    const double inv = 1.0 / (grid.dx * grid.dx);
    const double h = -problem.plan().dt;
    std::vector<double> u(n, 0.0);
    std::vector<double> p(n, 0.0);
    std::vector<double> acc(n, 0.0);
    auto accel = [&](std::size_t l) {
        const auto V = problem.V(l);
        const auto& fl = f[l];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double pot = V[i];
            if (!extra.empty()) pot += extra[l][i];
            acc[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv - pot * u[i] + fl[i];
        }
    };

    SpaceTimeSlab slab;
    slab.snapshots.resize(L);
    slab.dt_snapshot = problem.plan().dt;
    slab.snapshots[L - 1] = FieldState{problem.time(L - 1), grid, u, p, std::nullopt};
    accel(L - 1);
    for (std::size_t l = L - 1; l > 0; --l) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            p[i] += 0.5 * h * acc[i];
            u[i] += h * p[i];
        }
        accel(l - 1);
        for (std::size_t i = 1; i + 1 < n; ++i) p[i] += 0.5 * h * acc[i];
        for (double v : u) {
            if (!std::isfinite(v)) throw InstabilityError("solve_R: non-finite solution at t = " +
                                                          std::to_string(problem.time(l - 1)));
        }
        slab.snapshots[l - 1] = FieldState{problem.time(l - 1), grid, u, p, std::nullopt};
    }
    return slab;
}

namespace {

SpaceTimeSlab zero_slab(const ConstructionProblem& problem) {
    SpaceTimeSlab slab;
    slab.dt_snapshot = problem.plan().dt;
    const std::vector<double> zeros(problem.grid().n, 0.0);
    for (std::size_t l = 0; l < problem.levels(); ++l) {
        slab.snapshots.push_back(FieldState{problem.time(l), problem.grid(), zeros, zeros, std::nullopt});
    }
    return slab;
}

SpaceTimeSlab difference(const SpaceTimeSlab& a, const SpaceTimeSlab& b) {
    SpaceTimeSlab d = a;
    for (std::size_t l = 0; l < d.snapshots.size(); ++l) {
        for (std::size_t i = 0; i < d.snapshots[l].phi.size(); ++i) {
            d.snapshots[l].phi[i] -= b.snapshots[l].phi[i];
            d.snapshots[l].phi_dot[i] -= b.snapshots[l].phi_dot[i];
        }
    }
    return d;
}

double fitted_ratio(const std::vector<double>& norms, double floor) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 1; i < norms.size(); ++i) {
        if (norms[i] > floor) {
            xs.push_back(static_cast<double>(i));
            ys.push_back(std::log(norms[i]));
        }
    }
    if (xs.size() >= 2) return std::exp(fit_line(xs, ys).slope);
    if (norms.size() >= 2 && norms[0] > 0.0) return norms[1] / norms[0];
    return 0.0;
}

}  // namespace

ConstructResult fixed_point(const ConstructionProblem& problem, double tol, std::size_t max_iter,
                            const SpaceTimeSlab* g0) {
    if (!(tol > 0.0)) throw ConfigError("fixed_point: tol must be positive");
    const std::size_t L = problem.levels();
    const WeightedNormConfig wn{problem.plan().T, problem.plan().delta};
    SpaceTimeSlab g = g0 ? *g0 : zero_slab(problem);
    if (g.snapshots.size() != L || !g.grid().matches(problem.grid())) {
        throw ArgumentError("fixed_point: initial iterate does not match the construction levels");
    }

    ConstructReport report;
    report.plan = problem.plan();
    int rising = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        LevelField f(L);
        for (std::size_t l = 0; l < L; ++l) f[l] = problem.nonlinearity(l, g.snapshots[l].phi);
        SpaceTimeSlab next;
        try {
            next = solve_R(problem, f);
        } catch (const InstabilityError& e) {
            std::ostringstream msg;
            msg << "fixed_point: iterate " << it + 1 << " diverged at T = " << problem.plan().T << " (" << e.what()
                << "); try a larger T";
            throw NoContractionError(msg.str());
        }
        const double step = weighted_norm(difference(next, g), wn);
        report.iterate_norms.push_back(step);
        g = std::move(next);
        report.iterations = it + 1;
        if (report.iterate_norms.size() >= 2) {
            const double prev = report.iterate_norms[report.iterate_norms.size() - 2];
            rising = (step >= prev && step >= tol) ? rising + 1 : 0;
            if (rising >= 3) {
                std::ostringstream msg;
                msg << "fixed_point: no contraction at T = " << problem.plan().T
                    << " (step ratio >= 1 for 3 iterations); try a larger T";
                throw NoContractionError(msg.str());
            }
        }
        if (step < tol) {
            report.converged = true;
            break;
        }
    }
    report.contraction_ratio = fitted_ratio(report.iterate_norms, 10.0 * tol);
    report.final_residual = pde_residual(problem, g);
    report.psi_weighted_norm = weighted_norm(g, wn);

    const double T = problem.plan().T;
    const double window = std::min(10.0, 0.5 * (problem.plan().T_final - T));
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(0.5 / problem.plan().dt)));
    std::vector<double> fit_t;
    std::vector<double> fit_y;
    for (std::size_t l = 0; l < L; l += stride) {
        const FieldState& s = g.snapshots[l];
        const double norm = energy_norm(s.phi, s.phi_dot, s.grid.dx);
        report.decay_times.push_back(s.t);
        report.decay_norms.push_back(norm);
        if (s.t <= T + window + 1e-9 && norm > 0.0) {
            fit_t.push_back(s.t);
            fit_y.push_back(std::log(norm));
        }
    }
    if (fit_t.size() >= 3) {
        const LineFit line = fit_line(fit_t, fit_y);
        report.fitted_decay_rate = -line.slope;
        report.decay_fit_r_squared = line.r_squared;
    }
    return ConstructResult{std::move(g), std::move(report)};
}

ConstructResult construct(const MultikinkAnsatz& ansatz, const ConstructConfig& config) {
    const ConstructionProblem problem(ansatz, config);
    return fixed_point(problem, config.tol, config.max_iter);
}

SpaceTimeSlab full_field(const ConstructionProblem& problem, const SpaceTimeSlab& psi) {
    if (psi.snapshots.size() != problem.levels()) throw ArgumentError("full_field: level mismatch");
    SpaceTimeSlab out = psi;
    const auto& labels = problem.ansatz().params().chain.labels;
    for (std::size_t l = 0; l < out.snapshots.size(); ++l) {
        FieldState& s = out.snapshots[l];
        for (std::size_t i = 0; i < s.phi.size(); ++i) {
            s.phi[i] += problem.H(l)[i];
            s.phi_dot[i] += problem.H_dot(l)[i];
        }
        s.sector = std::make_pair(labels.front(), labels.back());
    }
    return out;
}

double pde_residual(const ConstructionProblem& problem, const SpaceTimeSlab& psi, double t_lo, double t_hi) {
    const std::size_t L = problem.levels();
    if (psi.snapshots.size() != L) throw ArgumentError("pde_residual: level mismatch");
    const UniformGrid& grid = problem.grid();
    const std::size_t n = grid.n;
    const double dt2 = problem.plan().dt * problem.plan().dt;
    const double dx2 = grid.dx * grid.dx;
    const Potential& W = problem.ansatz().model();
    auto phi = [&](std::size_t l, std::size_t i) { return problem.H(l)[i] + psi.snapshots[l].phi[i]; };
    double worst = 0.0;
    std::vector<double> r(n - 2);
    for (std::size_t l = 1; l + 1 < L; ++l) {
        const double t = problem.time(l);
        if (t < t_lo || t > t_hi) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double c = phi(l, i);
            r[i - 1] = (phi(l + 1, i) - 2.0 * c + phi(l - 1, i)) / dt2 -
                       (phi(l, i + 1) - 2.0 * c + phi(l, i - 1)) / dx2 + W.derivative(c, 1);
        }
        worst = std::max(worst, std::sqrt(simpson_dot(r, r, grid.dx)));
    }
    return worst;
}

SpaceTimeSlab param_derivative(const ConstructionProblem& problem, const SpaceTimeSlab& psi, std::size_t k,
                               ParamKind which) {
    const MultikinkAnsatz& ansatz = problem.ansatz();
    if (k >= ansatz.kinks()) throw ArgumentError("param_derivative: kink index out of range");
    const std::size_t L = problem.levels();
    if (psi.snapshots.size() != L) throw ArgumentError("param_derivative: level mismatch");
    const UniformGrid& grid = problem.grid();
    const Potential& W = ansatz.model();
    const KinkProfile& prof = ansatz.profile(k);
    const double v = ansatz.params().velocities[k];
    const double a = ansatz.params().shifts[k];
    const double g = ansatz.params().gammas[k];

    LevelField extra(L, std::vector<double>(grid.n));
    LevelField source(L, std::vector<double>(grid.n));
    for (std::size_t l = 0; l < L; ++l) {
        const double t = problem.time(l);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double w2 = W.derivative(problem.H(l)[i] + psi.snapshots[l].phi[i], 2);
            extra[l][i] = w2 - problem.V(l)[i];
            const double y = grid.x(i) - v * t - a;
            const KinkJet j = prof.jet(g * y);
            const double dH = which == ParamKind::shift ? -g * j.dh : j.dh * (v * g * g * g * y - g * t);
            source[l][i] = -(w2 - W.derivative(j.h, 2)) * dH;
        }
    }
    return solve_R(problem, source, extra);
}

}  // namespace mk
