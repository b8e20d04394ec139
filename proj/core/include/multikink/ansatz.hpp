#pragma once

#include "multikink/grid.hpp"
#include "multikink/kink.hpp"
#include "multikink/potential.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace mk {

/// Chain of vacua with admissible velocities -1 < v_1 < ... < v_K < 1 and shifts.
/// Kinks are indexed 0..K-1 here; kink k joins labels[k] -> labels[k+1].
struct MultikinkParams {
    ChainOfVacua chain;
    std::vector<double> velocities;
    std::vector<double> shifts;
    std::vector<double> gammas;

    /// Validates sizes and admissibility, fills the Lorentz factors.
    static MultikinkParams make(ChainOfVacua chain, std::vector<double> velocities, std::vector<double> shifts);

    [[nodiscard]] std::size_t kinks() const noexcept { return velocities.size(); }
};

[[nodiscard]] double lorentz_gamma(double v);

/// Sampled phase-space point (phi, d_t phi) at time t.
struct FieldState {
    double t = 0.0;
    UniformGrid grid;
    std::vector<double> phi;
    std::vector<double> phi_dot;
    std::optional<std::pair<int, int>> sector;
};

/// Two-component sampled field on a grid, e.g. a perturbation (h, d_t h).
struct TwoField {
    UniformGrid grid;
    std::vector<double> first;
    std::vector<double> second;

    static TwoField zeros(const UniformGrid& grid);
};

/// Generalized kernel of the linearization around kink k and its symplectic duals.
struct ModePair {
    std::size_t k = 0;
    TwoField Y0;
    TwoField Y1;
    TwoField psi0;
    TwoField psi1;
};

/// Multikink parameters bound to the potential and the kink profiles they need.
/// Cheap to copy; profiles are shared and immutable.
class MultikinkAnsatz {
public:
    MultikinkAnsatz(Potential model, VacuumTable table, MultikinkParams params, const ProfileOptions& options = {});

    /// Same chain and profiles, different (v, a).
    [[nodiscard]] MultikinkAnsatz with_params(MultikinkParams params) const;

    [[nodiscard]] const Potential& model() const noexcept { return model_; }
    [[nodiscard]] const VacuumTable& table() const noexcept { return table_; }
    [[nodiscard]] const MultikinkParams& params() const noexcept { return params_; }
    [[nodiscard]] std::size_t kinks() const noexcept { return params_.kinks(); }
    [[nodiscard]] const KinkProfile& profile(std::size_t k) const;

    /// gamma_k (x - v_k t - a_k)
    [[nodiscard]] double argument(std::size_t k, double t, double x) const noexcept {
        return params_.gammas[k] * (x - params_.velocities[k] * t - params_.shifts[k]);
    }
    [[nodiscard]] double omega_left() const;
    [[nodiscard]] double omega_right() const;
    /// omega of the vacuum to the left of kink k (labels[k]).
    [[nodiscard]] double omega_before(std::size_t k) const;
    [[nodiscard]] double mass_squared_before(std::size_t k) const;

    /// Largest tabulated half width among the profiles (tail onset).
    [[nodiscard]] double core_half_width() const noexcept;
    [[nodiscard]] double min_mass() const;

private:
    Potential model_;
    VacuumTable table_;
    MultikinkParams params_;
    std::vector<std::shared_ptr<const KinkProfile>> profiles_;
};

/// H(v,a;t,x) and its exact time derivative on `grid`.
[[nodiscard]] FieldState multikink(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid);

/// V(v,a;t,x) = W''(H_1) + sum_{k>=2} (W''(H_k) - m^2_{n_{k-1}}).
[[nodiscard]] std::vector<double> potential_V(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid);

/// Y^0_k, Y^1_k and psi^i_k = J Y^i_k sampled at time t.
[[nodiscard]] ModePair zero_modes(const MultikinkAnsatz& ansatz, std::size_t k, double t, const UniformGrid& grid);

/// Smooth bump: 1 on [-1,1], 0 outside [-2,2], quintic smoothstep joins.
[[nodiscard]] double bump_chi(double s) noexcept;

/// chi((x - v_k t - a_k) / (rho t)); t must be positive.
[[nodiscard]] double cutoff_chi(const MultikinkAnsatz& ansatz, std::size_t k, double t, double x, double rho);

/// 0.05 * min_k (v_{k+1} - v_k); 0.05 for a single kink.
[[nodiscard]] double default_rho(const MultikinkParams& params);

/// Multikink quadratic form with cutoffs around each kink.
[[nodiscard]] double quad_form_Q(const MultikinkAnsatz& ansatz, double t, const TwoField& h, double rho);

/// Single moving-kink form Q_{v_k}(v_k t + a_k; h, h) built from kink k alone.
[[nodiscard]] double quad_form_single(const MultikinkAnsatz& ansatz, std::size_t k, double t, const TwoField& h);

/// L^2 x L^2 inner product by Simpson quadrature; grids must match.
[[nodiscard]] double project(const TwoField& h, const TwoField& mode);

/// ||h||_E^2 = integral of h^2 + (d_x h)^2 + (second)^2.
[[nodiscard]] double energy_norm_sq(const TwoField& h);

/// Removes the span of `modes` from h (modified Gram-Schmidt, two passes).
void remove_projections(TwoField& h, const std::vector<TwoField>& modes);

/// Random smooth two-component field: a few Gaussian bumps per component with
/// centers in [c_lo, c_hi] and widths in [w_lo, w_hi].
[[nodiscard]] TwoField random_bump_field(const UniformGrid& grid, std::mt19937_64& rng, double c_lo, double c_hi,
                                         double w_lo = 0.3, double w_hi = 3.0);

struct CoercivityReport {
    std::size_t samples = 0;
    double min_ratio = 0.0;  ///< fitted lambda: min Q / ||h||_E^2
    double max_ratio = 0.0;
    double max_projection_residual = 0.0;
    std::size_t positive = 0;
};

/// Samples Q / ||h||_E^2 over seeded random fields with all 2K zero-mode
/// pairings removed. `single_kink` selects the cutoff-free single form (K = 1).
[[nodiscard]] CoercivityReport sample_coercivity(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid,
                                                 std::size_t count, std::uint64_t seed, bool single_kink,
                                                 double rho = 0.0);

}  // namespace mk
