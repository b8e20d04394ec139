#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mk {

/// Uniform 1-D grid x_i = x_min + i*dx, i = 0..n-1.
struct UniformGrid {
    double x_min = 0.0;
    double dx = 0.0;
    std::size_t n = 0;

    /// Grid covering [x_min, x_max] with spacing as close to `dx` as possible
    /// (spacing is shrunk so that x_max lands on a node).
    static UniformGrid covering(double x_min, double x_max, double dx);

    /// Grid symmetric about zero: nodes (i - half)*dx, so x(i) == -x(n-1-i) exactly.
    static UniformGrid symmetric(std::size_t half, double dx);

    /// Set by symmetric(); nodes are then (i - half)*dx.
    bool centered = false;

    [[nodiscard]] double x(std::size_t i) const noexcept {
        if (centered) return (static_cast<double>(i) - static_cast<double>(n / 2)) * dx;
        return x_min + static_cast<double>(i) * dx;
    }
    [[nodiscard]] double x_max() const noexcept { return x(n - 1); }
    [[nodiscard]] std::vector<double> nodes() const;

    /// Same node set, compared to round-off.
    [[nodiscard]] bool matches(const UniformGrid& other) const noexcept;
};

/// Composite Simpson rule on uniformly spaced samples. An even number of
/// samples closes with the 3/8 rule on the last four.
[[nodiscard]] double simpson(std::span<const double> f, double h);

/// Simpson quadrature of the pointwise product f*g.
[[nodiscard]] double simpson_dot(std::span<const double> f, std::span<const double> g, double h);

/// Second-order central first derivative; one-sided second-order at the ends.
[[nodiscard]] std::vector<double> d_dx(std::span<const double> f, double h);

/// Central second derivative on interior nodes; ends set to zero.
[[nodiscard]] std::vector<double> d2_dx2(std::span<const double> f, double h);

/// Ordinary least-squares line y = intercept + slope*x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double rms_residual = 0.0;
};

[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Weights of the 4-point Lagrange interpolant on nodes 0,1,2,3 at local
/// coordinate s (node units), and of its derivative.
struct CubicWeights {
    double w[4];
    double dw[4];
};
[[nodiscard]] CubicWeights cubic_lagrange_weights(double s) noexcept;

/// Starting index of the 4-point stencil around continuous index u in [0, n-1],
/// clamped so the stencil stays inside. Requires n >= 4.
[[nodiscard]] std::size_t cubic_stencil_start(double u, std::size_t n) noexcept;

}  // namespace mk
