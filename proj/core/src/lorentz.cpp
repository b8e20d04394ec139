#include "multikink/lorentz.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mk {

BoostSpec BoostSpec::make(double v, double t0, double x0) {
    if (!(std::abs(v) < 1.0)) throw ArgumentError("BoostSpec: need |v| < 1");
    return BoostSpec{v, t0, x0};
}

double BoostSpec::gamma() const { return lorentz_gamma(v); }

std::pair<double, double> BoostSpec::pull_back(double t_prime, double x_prime) const {
    const double g = gamma();
    return {t0 + g * (t_prime + v * x_prime), x0 + g * (x_prime + v * t_prime)};
}

std::pair<double, double> BoostSpec::push_forward(double t, double x) const {
    const double g = gamma();
    const double dt = t - t0;
    const double dx = x - x0;
    return {g * (dt - v * dx), g * (dx - v * dt)};
}

BoostSpec BoostSpec::inverse() const {
    const double g = gamma();
    return BoostSpec{-v, -g * (t0 - v * x0), -g * (x0 - v * t0)};
}

MultikinkParams boost_params(const MultikinkParams& params, const BoostSpec& boost) {
    (void)boost.gamma();
    std::vector<double> v(params.kinks());
    std::vector<double> a(params.kinks());
    for (std::size_t j = 0; j < params.kinks(); ++j) {
        const double vj = params.velocities[j];
        v[j] = (vj - boost.v) / (1.0 - vj * boost.v);
        a[j] = params.gammas[j] * (params.shifts[j] + vj * boost.t0 - boost.x0) / lorentz_gamma(v[j]);
    }
    return MultikinkParams::make(params.chain, std::move(v), std::move(a));
}

FieldState boost_field(const SpaceTimeSlab& slab, const BoostSpec& boost, double t_prime,
                       const UniformGrid& grid_prime) {
    if (slab.empty()) throw CoverageError("boost_field: empty slab");
    const double g = boost.gamma();
    const auto [ta, xa] = boost.pull_back(t_prime, grid_prime.x_min);
    const auto [tb, xb] = boost.pull_back(t_prime, grid_prime.x_max());
    const double t_lo = std::min(ta, tb);
    const double t_hi = std::max(ta, tb);
    const double x_lo = std::min(xa, xb);
    const double x_hi = std::max(xa, xb);
    const UniformGrid& grid = slab.grid();
    const double eps = 1e-9;
    if (t_lo < slab.t_first() - eps || t_hi > slab.t_last() + eps || x_lo < grid.x_min - eps ||
        x_hi > grid.x_max() + eps) {
        std::ostringstream msg;
        msg << std::setprecision(8) << "boost_field: t' = " << t_prime << " needs t in [" << t_lo << ", " << t_hi
            << "], x in [" << x_lo << ", " << x_hi << "] but the slab covers t in [" << slab.t_first() << ", "
            << slab.t_last() << "], x in [" << grid.x_min << ", " << grid.x_max() << "]";
        throw CoverageError(msg.str());
    }
    FieldState out;
    out.t = t_prime;
    out.grid = grid_prime;
    out.phi.resize(grid_prime.n);
    out.phi_dot.resize(grid_prime.n);
    out.sector = slab.snapshots.front().sector;
    for (std::size_t i = 0; i < grid_prime.n; ++i) {
        auto [t, x] = boost.pull_back(t_prime, grid_prime.x(i));
        t = std::clamp(t, slab.t_first(), slab.t_last());
        x = std::clamp(x, grid.x_min, grid.x_max());
        const SlabSample s = interpolate(slab, t, x);
        out.phi[i] = s.phi;
        out.phi_dot[i] = g * (s.phi_t + boost.v * s.phi_x);
    }
    return out;
}

namespace {

std::pair<double, double> centers_at(const MultikinkParams& p, double t) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < p.kinks(); ++k) {
        lo = std::min(lo, p.velocities[k] * t + p.shifts[k]);
        hi = std::max(hi, p.velocities[k] * t + p.shifts[k]);
    }
    return {lo, hi};
}

struct Window {
    double t_lo, t_hi, x_lo, x_hi;
};

// Unprimed (t, x) box covering the pull-back of a primed window.
Window pulled_back(const BoostSpec& boost, const Window& w) {
    Window out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double tp : {w.t_lo, w.t_hi}) {
        for (double xp : {w.x_lo, w.x_hi}) {
            const auto [t, x] = boost.pull_back(tp, xp);
            out.t_lo = std::min(out.t_lo, t);
            out.t_hi = std::max(out.t_hi, t);
            out.x_lo = std::min(out.x_lo, x);
            out.x_hi = std::max(out.x_hi, x);
        }
    }
    return out;
}

}  // namespace

CovarianceReport verify_covariance(const MultikinkAnsatz& ansatz, const BoostSpec& boost,
                                   const ConstructConfig& config, double window_length) {
    if (ansatz.kinks() == 0) throw ArgumentError("verify_covariance: needs at least one kink");
    if (!(window_length > 0.0)) throw ArgumentError("verify_covariance: window length must be positive");
    const MultikinkParams primed_params = boost_params(ansatz.params(), boost);
    const MultikinkAnsatz primed = ansatz.with_params(primed_params);
    const double half = 10.0 / ansatz.min_mass();

    const ConstructPlan plan = plan_construction(ansatz, config);
    const ConstructPlan plan_p = plan_construction(primed, config);

    // Slide the primed window forward until its pull-back starts after plan.T.
    Window w{};
    double t_start = plan_p.T;
    for (int it = 0; it < 100; ++it) {
        w.t_lo = t_start;
        w.t_hi = t_start + window_length;
        const auto [lo0, hi0] = centers_at(primed_params, w.t_lo);
        const auto [lo1, hi1] = centers_at(primed_params, w.t_hi);
        w.x_lo = std::min(lo0, lo1) - half;
        w.x_hi = std::max(hi0, hi1) + half;
        const Window back = pulled_back(boost, w);
        if (back.t_lo >= plan.T) break;
        t_start += (plan.T - back.t_lo) / boost.gamma() + config.dt;
    }
    const Window back = pulled_back(boost, w);
    if (back.t_lo < plan.T) throw CoverageError("verify_covariance: no primed window pulls back after T");

    const double pad = 4.0 * config.dx + 1.0;
    ConstructConfig original_cfg = config;
    original_cfg.T = plan.T;
    original_cfg.delta = plan.delta;
    original_cfg.T_final = std::max(plan.T_final, back.t_hi + 1.0);
    original_cfg.x_min = std::min(plan.grid.x_min, back.x_lo - pad);
    original_cfg.x_max = std::max(plan.grid.x_max(), back.x_hi + pad);
    ConstructConfig primed_cfg = config;
    primed_cfg.T = plan_p.T;
    primed_cfg.delta = plan_p.delta;
    primed_cfg.T_final = std::max(plan_p.T_final, w.t_hi + 1.0);
    primed_cfg.x_min = std::min(plan_p.grid.x_min, w.x_lo - pad);
    primed_cfg.x_max = std::max(plan_p.grid.x_max(), w.x_hi + pad);

    const ConstructionProblem problem(ansatz, original_cfg);
    const ConstructionProblem problem_p(primed, primed_cfg);
    ConstructResult result = fixed_point(problem, config.tol, config.max_iter);
    ConstructResult result_p = fixed_point(problem_p, config.tol, config.max_iter);
    const SpaceTimeSlab phi = full_field(problem, result.psi);
    const SpaceTimeSlab phi_p = full_field(problem_p, result_p.psi);

    const UniformGrid& gp = problem_p.grid();
    const auto i_lo = static_cast<std::size_t>(std::ceil((w.x_lo - gp.x_min) / gp.dx - 1e-9));
    const auto i_hi = static_cast<std::size_t>(std::floor((w.x_hi - gp.x_min) / gp.dx + 1e-9));
    const UniformGrid window_grid{gp.x(i_lo), gp.dx, i_hi - i_lo + 1};

    CovarianceReport report;
    report.t_lo = w.t_lo;
    report.t_hi = w.t_hi;
    report.x_lo = window_grid.x_min;
    report.x_hi = window_grid.x_max();
    report.boosted = primed_params;
    for (const FieldState& s : phi_p.snapshots) {
        if (s.t < w.t_lo - 1e-9 || s.t > w.t_hi + 1e-9) continue;
        const FieldState boosted = boost_field(phi, boost, s.t, window_grid);
        for (std::size_t i = 0; i < window_grid.n; ++i) {
            const double d = std::abs(boosted.phi[i] - s.phi[i + i_lo]);
            if (d > report.discrepancy) {
                report.discrepancy = d;
                report.worst_t = s.t;
                report.worst_x = window_grid.x(i);
            }
            report.rate_discrepancy = std::max(report.rate_discrepancy, std::abs(boosted.phi_dot[i] - s.phi_dot[i + i_lo]));
        }
    }
    report.original = std::move(result.report);
    report.primed = std::move(result_p.report);
    return report;
}

}  // namespace mk
