#pragma once

#include "multikink/ansatz.hpp"
#include "multikink/evolve.hpp"
#include "multikink/grid.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mk {

struct WeightedNormConfig {
    double T = 0.0;
    double delta = 0.0;
};

/// max over snapshots with t >= T of e^{delta t} ||(g, d_t g)(t)||_{H^1 x L^2}.
/// Throws ArgumentError when no snapshot lies at or beyond T.
[[nodiscard]] double weighted_norm(const SpaceTimeSlab& slab, const WeightedNormConfig& config);

/// Zero entries select the automatic choice.
struct ConstructConfig {
    double dx = 0.05;
    double dt = 0.04;
    double T = 0.0;        ///< auto: first time with ||N(0)(t)||_{L^2} <= n0_threshold
    double delta = 0.0;    ///< auto: half the fitted decay rate of ||N(0)(t)||
    double T_final = 0.0;  ///< auto: doubled until R N(0) is stable to truncation_tol
    double tol = 1e-9;
    std::size_t max_iter = 60;
    double x_min = 0.0;  ///< x_min == x_max: sized from the kink trajectories
    double x_max = 0.0;
    double margin = 0.0;  ///< auto: 15 / min mass
    double n0_threshold = 1e-3;
    double truncation_tol = 1e-8;
    double scan_step = 0.5;
};

/// Resolved time window, grid and rates of a construction.
struct ConstructPlan {
    UniformGrid grid;
    double T = 0.0;
    double delta = 0.0;
    double eta = 0.0;  ///< fitted decay rate of ||N(0)(t)||_{L^2}
    double T_final = 0.0;
    double dt = 0.0;
    std::size_t levels = 0;  ///< time levels T + l dt, l = 0..levels-1
    double n0_at_T = 0.0;
};

/// Per-level fields for a time-indexed family of grid functions.
using LevelField = std::vector<std::vector<double>>;

/// The multikink sampled on every time level of a plan: H, V, the cross term
/// -W'(H) + sum W'(H_k) and V - W''(H).
class ConstructionProblem {
public:
    ConstructionProblem(MultikinkAnsatz ansatz, const ConstructConfig& config);
    ConstructionProblem(MultikinkAnsatz ansatz, ConstructPlan plan);

    [[nodiscard]] const MultikinkAnsatz& ansatz() const noexcept { return ansatz_; }
    [[nodiscard]] const ConstructPlan& plan() const noexcept { return plan_; }
    [[nodiscard]] const UniformGrid& grid() const noexcept { return plan_.grid; }
    [[nodiscard]] std::size_t levels() const noexcept { return plan_.levels; }
    [[nodiscard]] double time(std::size_t level) const noexcept {
        return plan_.T + static_cast<double>(level) * plan_.dt;
    }
    [[nodiscard]] std::span<const double> H(std::size_t l) const { return H_[l]; }
    [[nodiscard]] std::span<const double> H_dot(std::size_t l) const { return H_dot_[l]; }
    [[nodiscard]] std::span<const double> V(std::size_t l) const { return V_[l]; }
    [[nodiscard]] std::span<const double> cross(std::size_t l) const { return cross_[l]; }

    /// N(g) at level l.
    [[nodiscard]] std::vector<double> nonlinearity(std::size_t l, std::span<const double> g) const;

private:
    void sample();

    MultikinkAnsatz ansatz_;
    ConstructPlan plan_;
    LevelField H_;
    LevelField H_dot_;
    LevelField V_;
    LevelField cross_;
    LevelField v_minus_w2_;
};

/// Chooses grid, T, delta and T_final for `ansatz` according to `config`.
[[nodiscard]] ConstructPlan plan_construction(const MultikinkAnsatz& ansatz, const ConstructConfig& config);

/// N(v,a; g) = -W'(H + g) + sum_k W'(H_k) + V g at time t on g's grid.
[[nodiscard]] std::vector<double> nonlinearity_N(const MultikinkAnsatz& ansatz, const FieldState& g, double t);

/// Solves h_tt - h_xx + (V + extra) h = f backward from zero data at T_final
/// down to T, storing every level. `extra` may be empty.
[[nodiscard]] SpaceTimeSlab solve_R(const ConstructionProblem& problem, const LevelField& f,
                                    const LevelField& extra = {});

struct ConstructReport {
    std::vector<double> iterate_norms;
    double contraction_ratio = 0.0;
    double final_residual = 0.0;
    double fitted_decay_rate = 0.0;
    double decay_fit_r_squared = 0.0;
    std::vector<double> decay_times;  ///< sampled ||(Psi, d_t Psi)(t)||_E, for plotting
    std::vector<double> decay_norms;
    std::size_t iterations = 0;
    bool converged = false;
    double psi_weighted_norm = 0.0;
    ConstructPlan plan;
};

struct ConstructResult {
    SpaceTimeSlab psi;
    ConstructReport report;
};

/// Iterates g <- R N(g) from g0 (zero when absent) until successive iterates
/// differ by less than tol in the weighted norm. Throws NoContractionError when
/// the step ratio stays >= 1 for three consecutive iterations.
[[nodiscard]] ConstructResult fixed_point(const ConstructionProblem& problem, double tol, std::size_t max_iter,
                                          const SpaceTimeSlab* g0 = nullptr);

/// Plans, samples and runs the fixed point with the settings of `config`.
[[nodiscard]] ConstructResult construct(const MultikinkAnsatz& ansatz, const ConstructConfig& config);

/// H + Psi with its time derivative on every level of the construction.
[[nodiscard]] SpaceTimeSlab full_field(const ConstructionProblem& problem, const SpaceTimeSlab& psi);

/// sup over interior levels in [t_lo, t_hi] of the L^2 norm of
/// D_tt phi - D_xx phi + W'(phi), phi = H + Psi, with second differences.
[[nodiscard]] double pde_residual(const ConstructionProblem& problem, const SpaceTimeSlab& psi,
                                  double t_lo = -1e300, double t_hi = 1e300);

enum class ParamKind { shift, velocity };

/// d Psi / d a_k or d Psi / d v_k: solves the linearization with potential
/// W''(H + Psi) and source -(W''(H + Psi) - W''(H_k)) d H_k.
[[nodiscard]] SpaceTimeSlab param_derivative(const ConstructionProblem& problem, const SpaceTimeSlab& psi,
                                             std::size_t k, ParamKind which);

}  // namespace mk
