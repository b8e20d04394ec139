#include "multikink/evolve.hpp"

#include "multikink/errors.hpp"
#include "multikink/kink.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mk {

void EvolveConfig::validate() const {
    if (!(dx > 0.0) || !(dt > 0.0)) throw ConfigError("evolve: dx and dt must be positive");
    if (!(x_max > x_min)) throw ConfigError("evolve: need x_min < x_max");
    if (dt > 0.9 * dx) {
        std::ostringstream msg;
        msg << "evolve: CFL violation, dt = " << dt << " exceeds 0.9 * dx = " << 0.9 * dx;
        throw ConfigError(msg.str());
    }
}

UniformGrid EvolveConfig::grid() const { return UniformGrid::covering(x_min, x_max, dx); }

std::size_t SpaceTimeSlab::nearest(double t) const {
    if (snapshots.empty()) throw ArgumentError("SpaceTimeSlab::nearest: empty slab");
    if (snapshots.size() == 1 || dt_snapshot <= 0.0) return 0;
    const double u = std::round((t - t_first()) / dt_snapshot);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(snapshots.size() - 1)));
}

SlabSample interpolate(const SpaceTimeSlab& slab, double t, double x) {
    if (slab.snapshots.size() < 4) throw CoverageError("interpolate: slab needs at least 4 snapshots");
    const UniformGrid& g = slab.grid();
    const double eps_t = 1e-9 * std::max(1.0, std::abs(t));
    const double eps_x = 1e-9 * std::max(1.0, std::abs(x));
    if (t < slab.t_first() - eps_t || t > slab.t_last() + eps_t || x < g.x_min - eps_x || x > g.x_max() + eps_x) {
        std::ostringstream msg;
        msg << std::setprecision(10) << "interpolate: (t, x) = (" << t << ", " << x << ") outside slab t in ["
            << slab.t_first() << ", " << slab.t_last() << "], x in [" << g.x_min << ", " << g.x_max() << "]";
        throw CoverageError(msg.str());
    }
    const double ut = (t - slab.t_first()) / slab.dt_snapshot;
    const double ux = (x - g.x_min) / g.dx;
    const std::size_t jt = cubic_stencil_start(ut, slab.snapshots.size());
    const std::size_t jx = cubic_stencil_start(ux, g.n);
    const CubicWeights wt = cubic_lagrange_weights(ut - static_cast<double>(jt));
    const CubicWeights wx = cubic_lagrange_weights(ux - static_cast<double>(jx));
    SlabSample s;
    for (std::size_t a = 0; a < 4; ++a) {
        const FieldState& snap = slab.snapshots[jt + a];
        double phi = 0.0;
        double phi_x = 0.0;
        double phi_t = 0.0;
        for (std::size_t b = 0; b < 4; ++b) {
            phi += wx.w[b] * snap.phi[jx + b];
            phi_x += wx.dw[b] * snap.phi[jx + b];
            phi_t += wx.w[b] * snap.phi_dot[jx + b];
        }
        s.phi += wt.w[a] * phi;
        s.phi_x += wt.w[a] * phi_x;
        s.phi_t += wt.w[a] * phi_t;
    }
    s.phi_x /= g.dx;
    return s;
}

namespace {

struct Schedule {
    std::size_t steps = 0;
    std::size_t every = 1;
    double dt = 0.0;  // signed
};

Schedule make_schedule(double t0, const EvolveConfig& config) {
    config.validate();
    Schedule s;
    const double span = config.t_end - t0;
    if (span == 0.0) return s;
    const double raw = std::ceil(std::abs(span) / config.dt - 1e-9);
    s.every = config.snapshot_every;
    if (s.every == 0) {
        s.every = static_cast<std::size_t>(std::max(1.0, std::round(0.5 / config.dt)));
    }
    const auto blocks = static_cast<std::size_t>(std::ceil(raw / static_cast<double>(s.every) - 1e-9));
    s.steps = std::max<std::size_t>(1, blocks) * s.every;
    s.dt = span / static_cast<double>(s.steps);
    return s;
}

void check_finite(std::span<const double> u, double t) {
    for (double v : u) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "evolve: non-finite field at t = " << t;
            throw InstabilityError(msg.str());
        }
    }
}

void finish(SpaceTimeSlab& slab, const Schedule& s) {
    if (s.dt < 0.0) std::reverse(slab.snapshots.begin(), slab.snapshots.end());
    slab.dt_snapshot = std::abs(s.dt) * static_cast<double>(s.every);
}

}  // namespace

SpaceTimeSlab evolve_nonlinear(const FieldState& state, const Potential& model, const EvolveConfig& config) {
    const Schedule s = make_schedule(state.t, config);
    const UniformGrid& grid = state.grid;
    const std::size_t n = grid.n;
    if (n < 3 || state.phi.size() != n || state.phi_dot.size() != n) {
        throw ArgumentError("evolve_nonlinear: state does not match its grid");
    }
    std::vector<double> u = state.phi;
    std::vector<double> p = state.phi_dot;
    p.front() = 0.0;
    p.back() = 0.0;
    std::vector<double> acc(n, 0.0);
    const double inv = 1.0 / (grid.dx * grid.dx);
    auto accel = [&] {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            acc[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv - model.derivative(u[i], 1);
        }
    };

    SpaceTimeSlab slab;
    auto store = [&](double t) {
        FieldState snap{t, grid, u, p, state.sector};
        slab.snapshots.push_back(std::move(snap));
    };
    store(state.t);
    accel();
    const double h = s.dt;
    for (std::size_t step = 1; step <= s.steps; ++step) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            p[i] += 0.5 * h * acc[i];
            u[i] += h * p[i];
        }
        accel();
        for (std::size_t i = 1; i + 1 < n; ++i) p[i] += 0.5 * h * acc[i];
        if (step % s.every == 0) {
            const double t = state.t + static_cast<double>(step) * h;
            check_finite(u, t);
            store(t);
        }
    }
    finish(slab, s);
    return slab;
}

SpaceTimeSlab evolve_linear(const TwoField& h0, double t0, const PotentialFn& potential, const ForcingFn& forcing,
                            const EvolveConfig& config) {
    const Schedule s = make_schedule(t0, config);
    const UniformGrid& grid = h0.grid;
    const std::size_t n = grid.n;
    if (n < 3 || h0.first.size() != n || h0.second.size() != n) {
        throw ArgumentError("evolve_linear: data does not match its grid");
    }
    std::vector<double> u = h0.first;
    std::vector<double> p = h0.second;
    u.front() = u.back() = 0.0;
    p.front() = p.back() = 0.0;
    std::vector<double> V(n, 0.0);
    std::vector<double> f(n, 0.0);
    std::vector<double> acc(n, 0.0);
    const double inv = 1.0 / (grid.dx * grid.dx);
    auto accel = [&](std::size_t step, double t) {
        potential(t, V);
        std::fill(f.begin(), f.end(), 0.0);
        if (forcing) forcing(step, t, f);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            acc[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv - V[i] * u[i] + f[i];
        }
    };

    SpaceTimeSlab slab;
    auto store = [&](double t) { slab.snapshots.push_back(FieldState{t, grid, u, p, std::nullopt}); };
    store(t0);
    accel(0, t0);
    const double h = s.dt;
    for (std::size_t step = 1; step <= s.steps; ++step) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            p[i] += 0.5 * h * acc[i];
            u[i] += h * p[i];
        }
        const double t = t0 + static_cast<double>(step) * h;
        accel(step, t);
        for (std::size_t i = 1; i + 1 < n; ++i) p[i] += 0.5 * h * acc[i];
        if (step % s.every == 0) {
            check_finite(u, t);
            store(t);
        }
    }
    finish(slab, s);
    return slab;
}

SpaceTimeSlab evolve_linearized(const TwoField& h0, double t0, const MultikinkAnsatz& ansatz,
                                const EvolveConfig& config) {
    const UniformGrid grid = h0.grid;
    auto potential = [&ansatz, grid](double t, std::vector<double>& V) { V = potential_V(ansatz, t, grid); };
    return evolve_linear(h0, t0, potential, nullptr, config);
}

namespace {

std::vector<double> d_dx4(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out = d_dx(f, h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    }
    return out;
}

}  // namespace

Energies energy(const FieldState& state, const Potential& model) {
    const std::size_t n = state.grid.n;
    const auto phi_x = d_dx4(state.phi, state.grid.dx);
    std::vector<double> ep(n);
    std::vector<double> ek(n);
    for (std::size_t i = 0; i < n; ++i) {
        ep[i] = 0.5 * phi_x[i] * phi_x[i] + model.derivative(state.phi[i], 0);
        ek[i] = 0.5 * state.phi_dot[i] * state.phi_dot[i];
    }
    Energies e;
    e.potential = simpson(ep, state.grid.dx);
    e.kinetic = simpson(ek, state.grid.dx);
    e.total = e.potential + e.kinetic;
    return e;
}

Energies scheme_energy(const FieldState& state, const Potential& model) {
    const std::size_t n = state.grid.n;
    const double dx = state.grid.dx;
    Energies e;
    for (std::size_t i = 0; i < n; ++i) {
        e.potential += model.derivative(state.phi[i], 0);
        e.kinetic += 0.5 * state.phi_dot[i] * state.phi_dot[i];
        if (i + 1 < n) {
            const double g = (state.phi[i + 1] - state.phi[i]) / dx;
            e.potential += 0.5 * g * g;
        }
    }
    e.potential *= dx;
    e.kinetic *= dx;
    e.total = e.potential + e.kinetic;
    return e;
}

std::pair<int, int> detect_sector(const FieldState& state, const VacuumTable& table, double tol,
                                  std::size_t window) {
    const std::size_t n = state.phi.size();
    if (n == 0) throw ArgumentError("detect_sector: empty state");
    window = std::clamp<std::size_t>(window, 1, n);
    double left = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        left += state.phi[i];
        right += state.phi[n - 1 - i];
    }
    left /= static_cast<double>(window);
    right /= static_cast<double>(window);
    auto classify = [&](double value, const char* side) {
        int best = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < table.size(); ++l) {
            const double d = std::abs(value - table.vacua[l]);
            if (d < dist) {
                dist = d;
                best = static_cast<int>(l);
            }
        }
        if (best < 0 || dist > tol) {
            std::ostringstream msg;
            msg << std::setprecision(10) << "detect_sector: " << side << " boundary value " << value
                << " is not within " << tol << " of any vacuum";
            throw UnclassifiedSectorError(msg.str());
        }
        return best;
    };
    return {classify(left, "left"), classify(right, "right")};
}

GammaCheck gamma_inequality(const FieldState& state, const Potential& model) {
    const std::size_t n = state.phi.size();
    const double dx = state.grid.dx;
    GammaCheck check;
    check.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = state.phi[i];
        const double b = state.phi[i + 1];
        const double slope = (b - a) / dx;
        const double m = 0.5 * (a + b);
        const double wa = std::max(model.derivative(a, 0), 0.0);
        const double wm = std::max(model.derivative(m, 0), 0.0);
        const double wb = std::max(model.derivative(b, 0), 0.0);
        const double ep = 0.5 * slope * slope * dx + dx / 6.0 * (wa + 4.0 * wm + wb);
        const double gamma =
            std::abs(slope) * dx / 6.0 * (std::sqrt(2.0 * wa) + 4.0 * std::sqrt(2.0 * wm) + std::sqrt(2.0 * wb));
        check.min_margin = std::min(check.min_margin, ep - gamma);
        check.potential_energy += ep;
    }
    if (n < 2) check.min_margin = 0.0;
    check.gamma_endpoints = n > 0 ? std::abs(gamma_functional(model, state.phi.front(), state.phi.back())) : 0.0;
    return check;
}

ZeroModeSeries zero_mode_drift(const MultikinkAnsatz& ansatz, const TwoField& h0, double t0,
                               const EvolveConfig& config) {
    const SpaceTimeSlab slab = evolve_linearized(h0, t0, ansatz, config);
    const std::size_t K = ansatz.kinks();
    ZeroModeSeries out;
    out.psi0.assign(K, {});
    out.psi1.assign(K, {});
    for (const FieldState& snap : slab.snapshots) {
        out.times.push_back(snap.t);
        const TwoField h{snap.grid, snap.phi, snap.phi_dot};
        for (std::size_t k = 0; k < K; ++k) {
            const ModePair m = zero_modes(ansatz, k, snap.t, snap.grid);
            out.psi0[k].push_back(project(h, m.psi0));
            out.psi1[k].push_back(project(h, m.psi1));
        }
    }
    return out;
}

void write_slab(const SpaceTimeSlab& slab, const std::string& directory, const std::string& prefix) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::ofstream manifest(fs::path(directory) / (prefix + "_manifest.csv"));
    if (!manifest) throw ArgumentError("write_slab: cannot write to " + directory);
    manifest << "index,t,file\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t j = 0; j < slab.snapshots.size(); ++j) {
        const FieldState& s = slab.snapshots[j];
        std::ostringstream name;
        name << prefix << '_' << std::setw(5) << std::setfill('0') << j << ".csv";
        std::ofstream out(fs::path(directory) / name.str());
        if (!out) throw ArgumentError("write_slab: cannot write " + name.str());
        out << "x,phi,phi_t\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (std::size_t i = 0; i < s.grid.n; ++i) out << s.grid.x(i) << ',' << s.phi[i] << ',' << s.phi_dot[i] << '\n';
        manifest << j << ',' << s.t << ',' << name.str() << '\n';
    }
}

}  // namespace mk
