#pragma once

#include "multikink/grid.hpp"
#include "multikink/kink.hpp"
#include "multikink/potential.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mk {

/// -d_x^2 + V on the grid nodes with zero values beyond both ends.
struct OperatorDiscretization {
    UniformGrid grid;
    std::vector<double> potential;     ///< V = W''(H) at the nodes
    std::vector<double> diagonal;      ///< 2 / dx^2 + V
    std::vector<double> off_diagonal;  ///< -1 / dx^2, size n - 1

    [[nodiscard]] std::vector<double> apply(std::span<const double> g) const;
};

/// Linearization around the kink (or antikink) joining vacua n and n_prime.
[[nodiscard]] OperatorDiscretization build_L(const Potential& model, const VacuumTable& table, int n, int n_prime,
                                             const UniformGrid& grid, const ProfileOptions& options = {});

/// Operator with given potential samples; `grid` lists the unknowns.
[[nodiscard]] OperatorDiscretization build_schrodinger(const UniformGrid& grid, std::vector<double> potential);

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;  ///< unit Euclidean norm, positive largest component
};

/// The k smallest eigenpairs in ascending order: Sturm-sequence bisection for
/// the eigenvalues, inverse iteration for the vectors. Requires k >= 2.
[[nodiscard]] std::vector<Eigenpair> low_spectrum(const OperatorDiscretization& disc, std::size_t k);

/// Number of eigenvalues strictly below lambda.
[[nodiscard]] std::size_t sturm_count(const OperatorDiscretization& disc, double lambda);

/// dx * g . (L g)
[[nodiscard]] double quadratic_form(const OperatorDiscretization& disc, std::span<const double> g);

/// dx * sum (g_i^2 + ((g_{i+1} - g_i) / dx)^2), forward differences, zero ends.
[[nodiscard]] double h1_norm_sq(const UniformGrid& grid, std::span<const double> g);

struct CoercivityEstimate {
    double lambda = 0.0;  ///< min <g, L g> / ||g||_{H^1}^2 over the samples
    std::size_t samples = 0;
    double max_pairing = 0.0;  ///< largest residual |<Z, g>| / (|Z| |g|) after projection
};

/// Samples seeded random g, removes their Z component and reports the smallest
/// Rayleigh-type ratio. Throws InvalidMultiplierError when <Z, kernel> ~ 0.
[[nodiscard]] CoercivityEstimate coercivity_constant(const OperatorDiscretization& disc, std::span<const double> Z,
                                                     std::span<const double> kernel, std::size_t count = 200,
                                                     std::uint64_t seed = 1);

/// Writes eigenvalues.csv (index, lambda) and eigenvectors.csv (x, mode_0, ...).
void write_eigenpairs(const OperatorDiscretization& disc, const std::vector<Eigenpair>& pairs,
                      const std::string& directory);

}  // namespace mk
