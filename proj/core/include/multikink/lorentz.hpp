#pragma once

#include "multikink/ansatz.hpp"
#include "multikink/construct.hpp"
#include "multikink/evolve.hpp"

#include <utility>

namespace mk {

/// (t, x) = (t0 + gamma (t' + v x'), x0 + gamma (x' + v t')).
struct BoostSpec {
    double v = 0.0;
    double t0 = 0.0;
    double x0 = 0.0;

    /// Throws ArgumentError unless |v| < 1.
    static BoostSpec make(double v, double t0 = 0.0, double x0 = 0.0);
    [[nodiscard]] double gamma() const;
    /// Primed coordinates -> unprimed coordinates.
    [[nodiscard]] std::pair<double, double> pull_back(double t_prime, double x_prime) const;
    /// Unprimed coordinates -> primed coordinates.
    [[nodiscard]] std::pair<double, double> push_forward(double t, double x) const;
    /// The boost whose pull-back undoes this one.
    [[nodiscard]] BoostSpec inverse() const;
};

/// v'_j = (v_j - v) / (1 - v_j v), a'_j = gamma_j (a_j + v_j t0 - x0) / gamma'_j.
[[nodiscard]] MultikinkParams boost_params(const MultikinkParams& params, const BoostSpec& boost);

/// phi'(t', x') = phi(t, x) by bicubic space-time interpolation of the slab,
/// d_t' phi' = gamma (phi_t + v phi_x). Throws CoverageError naming the
/// required (t, x) range when the pull-back leaves the slab.
[[nodiscard]] FieldState boost_field(const SpaceTimeSlab& slab, const BoostSpec& boost, double t_prime,
                                     const UniformGrid& grid_prime);

struct CovarianceReport {
    double discrepancy = 0.0;      ///< sup |phi_boosted - phi_primed| over the window
    double rate_discrepancy = 0.0; ///< same for the time derivatives
    double worst_t = 0.0;
    double worst_x = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    MultikinkParams boosted;
    ConstructReport original;
    ConstructReport primed;
};

/// Constructs Psi(v, a), boosts H + Psi into the primed frame and compares it
/// with an independent construction of H(v', a') + Psi(v', a') over
/// t' in [t_lo, t_lo + window_length], where t_lo is the first primed time whose
/// pulled-back window lies after the original construction time.
[[nodiscard]] CovarianceReport verify_covariance(const MultikinkAnsatz& ansatz, const BoostSpec& boost,
                                                 const ConstructConfig& config, double window_length = 5.0);

}  // namespace mk
