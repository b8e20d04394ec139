#pragma once

#include "multikink/ansatz.hpp"
#include "multikink/grid.hpp"
#include "multikink/potential.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mk {

enum class BoundaryCondition { clamp_left_vacuum_right_vacuum };

struct EvolveConfig {
    double dx = 0.05;
    double dt = 0.04;
    double x_min = -40.0;
    double x_max = 40.0;
    BoundaryCondition boundary = BoundaryCondition::clamp_left_vacuum_right_vacuum;
    double t_end = 10.0;
    /// Steps between stored snapshots; 0 picks the step count closest to 0.5 time units.
    std::size_t snapshot_every = 0;

    /// Throws ConfigError on a CFL violation or a malformed domain.
    void validate() const;
    [[nodiscard]] UniformGrid grid() const;
};

/// Snapshots at uniformly spaced, strictly increasing times on a common grid.
struct SpaceTimeSlab {
    std::vector<FieldState> snapshots;
    double dt_snapshot = 0.0;

    [[nodiscard]] bool empty() const noexcept { return snapshots.empty(); }
    [[nodiscard]] const UniformGrid& grid() const { return snapshots.front().grid; }
    [[nodiscard]] double t_first() const { return snapshots.front().t; }
    [[nodiscard]] double t_last() const { return snapshots.back().t; }
    /// Index of the snapshot nearest to t.
    [[nodiscard]] std::size_t nearest(double t) const;
};

/// Interpolated field value, time derivative and space derivative.
struct SlabSample {
    double phi = 0.0;
    double phi_t = 0.0;
    double phi_x = 0.0;
};

/// Cubic-in-t, cubic-in-x interpolation of phi and phi_dot. Throws
/// CoverageError when (t, x) lies outside the stored range.
[[nodiscard]] SlabSample interpolate(const SpaceTimeSlab& slab, double t, double x);

/// Stormer-Verlet for phi_tt - phi_xx + W'(phi) = 0 with ends clamped to their
/// initial values. Integrates backward when config.t_end < state.t.
[[nodiscard]] SpaceTimeSlab evolve_nonlinear(const FieldState& state, const Potential& model,
                                             const EvolveConfig& config);

/// Fills V(t) on the grid.
using PotentialFn = std::function<void(double t, std::vector<double>& V)>;
/// Adds the source at time level `step` (time t) to `f`.
using ForcingFn = std::function<void(std::size_t step, double t, std::vector<double>& f)>;

/// Stormer-Verlet for h_tt = h_xx - V(t) h + f with zero Dirichlet ends.
/// Snapshots are stored every `snapshot_every` steps (and at the final level)
/// and reported in increasing time order.
[[nodiscard]] SpaceTimeSlab evolve_linear(const TwoField& h0, double t0, const PotentialFn& potential,
                                          const ForcingFn& forcing, const EvolveConfig& config);

/// Linearization around the multikink: V(v,a;t,x) resampled each step.
[[nodiscard]] SpaceTimeSlab evolve_linearized(const TwoField& h0, double t0, const MultikinkAnsatz& ansatz,
                                              const EvolveConfig& config);

struct Energies {
    double total = 0.0;
    double potential = 0.0;  ///< integral of phi_x^2 / 2 + W(phi)
    double kinetic = 0.0;    ///< integral of phi_t^2 / 2
};

/// Fourth-order differences and Simpson quadrature; the fields beyond the ends
/// are taken at the boundary vacuum values and contribute nothing.
[[nodiscard]] Energies energy(const FieldState& state, const Potential& model);

/// Discrete energy of the leapfrog scheme (forward differences, rectangle
/// rule); conserved up to O(dt^2) by evolve_nonlinear.
[[nodiscard]] Energies scheme_energy(const FieldState& state, const Potential& model);

/// Labels of the vacua nearest to the averaged boundary windows.
/// Throws UnclassifiedSectorError when an end is farther than tol from every vacuum.
[[nodiscard]] std::pair<int, int> detect_sector(const FieldState& state, const VacuumTable& table,
                                                double tol = 1e-6, std::size_t window = 5);

/// Per-cell check of E_p[x_i, x_{i+1}] >= |Gamma(phi(x_i), phi(x_{i+1}))| on the
/// piecewise-linear interpolant. `min_margin` is the smallest cell slack,
/// negative only through round-off.
struct GammaCheck {
    double min_margin = 0.0;
    double potential_energy = 0.0;
    double gamma_endpoints = 0.0;  ///< |Gamma(phi(x_min), phi(x_max))|
    [[nodiscard]] bool holds(double tol) const noexcept {
        return min_margin >= -tol && potential_energy >= gamma_endpoints - tol;
    }
};
[[nodiscard]] GammaCheck gamma_inequality(const FieldState& state, const Potential& model);

/// Pairings <psi^i_k(t), h(t)> for every kink k, i in {0, 1}.
struct ZeroModeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> psi0;  ///< [k][snapshot]
    std::vector<std::vector<double>> psi1;
};

[[nodiscard]] ZeroModeSeries zero_mode_drift(const MultikinkAnsatz& ansatz, const TwoField& h0, double t0,
                                             const EvolveConfig& config);

/// Writes one CSV per snapshot (x, phi, phi_t) plus <prefix>_manifest.csv listing times.
void write_slab(const SpaceTimeSlab& slab, const std::string& directory, const std::string& prefix = "snapshot");

}  // namespace mk
