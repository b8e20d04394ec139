#include "multikink/grid.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mk {

UniformGrid UniformGrid::covering(double x_min, double x_max, double dx) {
    if (!(x_max > x_min) || !(dx > 0.0)) {
        throw ArgumentError("UniformGrid::covering: need x_max > x_min and dx > 0");
    }
    const auto cells = static_cast<std::size_t>(std::ceil((x_max - x_min) / dx - 1e-9));
    return UniformGrid{x_min, (x_max - x_min) / static_cast<double>(cells), cells + 1};
}

UniformGrid UniformGrid::symmetric(std::size_t half, double dx) {
    if (!(dx > 0.0)) throw ArgumentError("UniformGrid::symmetric: dx must be positive");
    return UniformGrid{-static_cast<double>(half) * dx, dx, 2 * half + 1, true};
}

std::vector<double> UniformGrid::nodes() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

bool UniformGrid::matches(const UniformGrid& other) const noexcept {
    if (n != other.n) return false;
    const double scale = std::max(1.0, std::abs(x_min));
    return std::abs(x_min - other.x_min) <= 1e-12 * scale && std::abs(dx - other.dx) <= 1e-12 * dx;
}

namespace {

template <typename F>
double simpson_impl(std::size_t n, double h, F&& f) {
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (f(0) + f(1));
    if (n == 4) return 3.0 * h / 8.0 * (f(0) + 3.0 * f(1) + 3.0 * f(2) + f(3));
    std::size_t m = n;  // samples handled by the 1/3 rule (odd count)
    double tail = 0.0;
    if (n % 2 == 0) {
        m = n - 3;
        tail = 3.0 * h / 8.0 * (f(n - 4) + 3.0 * f(n - 3) + 3.0 * f(n - 2) + f(n - 1));
    }
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < m; i += 2) odd += f(i);
    for (std::size_t i = 2; i + 1 < m; i += 2) even += f(i);
    return h / 3.0 * (f(0) + 4.0 * odd + 2.0 * even + f(m - 1)) + tail;
}

}  // namespace

double simpson(std::span<const double> f, double h) {
    return simpson_impl(f.size(), h, [&](std::size_t i) { return f[i]; });
}

double simpson_dot(std::span<const double> f, std::span<const double> g, double h) {
    if (f.size() != g.size()) throw ArgumentError("simpson_dot: size mismatch");
    return simpson_impl(f.size(), h, [&](std::size_t i) { return f[i] * g[i]; });
}

std::vector<double> d_dx(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 3) return out;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

std::vector<double> d2_dx2(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    const double inv = 1.0 / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need >= 2 paired samples");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ArgumentError("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.rms_residual = std::sqrt(ss_res / n);
    return fit;
}

CubicWeights cubic_lagrange_weights(double s) noexcept {
    // nodes at 0,1,2,3
    const double a = s;
    const double b = s - 1.0;
    const double c = s - 2.0;
    const double d = s - 3.0;
    CubicWeights cw{};
    cw.w[0] = -b * c * d / 6.0;
    cw.w[1] = a * c * d / 2.0;
    cw.w[2] = -a * b * d / 2.0;
    cw.w[3] = a * b * c / 6.0;
    cw.dw[0] = -(c * d + b * d + b * c) / 6.0;
    cw.dw[1] = (c * d + a * d + a * c) / 2.0;
    cw.dw[2] = -(b * d + a * d + a * b) / 2.0;
    cw.dw[3] = (b * c + a * c + a * b) / 6.0;
    return cw;
}

std::size_t cubic_stencil_start(double u, std::size_t n) noexcept {
    const double fl = std::floor(u);
    long start = static_cast<long>(fl) - 1;
    start = std::clamp(start, 0L, static_cast<long>(n) - 4);
    return static_cast<std::size_t>(start);
}

}  // namespace mk
