#include "multikink/spectral.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

namespace mk {

std::vector<double> OperatorDiscretization::apply(std::span<const double> g) const {
    const std::size_t n = diagonal.size();
    if (g.size() != n) throw ArgumentError("OperatorDiscretization::apply: size mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diagonal[i] * g[i];
        if (i > 0) s += off_diagonal[i - 1] * g[i - 1];
        if (i + 1 < n) s += off_diagonal[i] * g[i + 1];
        out[i] = s;
    }
    return out;
}

OperatorDiscretization build_schrodinger(const UniformGrid& grid, std::vector<double> potential) {
    if (grid.n < 3 || potential.size() != grid.n) throw ArgumentError("build_schrodinger: bad grid or potential");
    OperatorDiscretization d;
    d.grid = grid;
    const double inv = 1.0 / (grid.dx * grid.dx);
    d.diagonal.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) d.diagonal[i] = 2.0 * inv + potential[i];
    d.off_diagonal.assign(grid.n - 1, -inv);
    d.potential = std::move(potential);
    return d;
}

OperatorDiscretization build_L(const Potential& model, const VacuumTable& table, int n, int n_prime,
                               const UniformGrid& grid, const ProfileOptions& options) {
    ProfileOptions opts = options;
    const double reach = std::max(std::abs(grid.x_min), std::abs(grid.x_max()));
    if (opts.half_width <= 0.0) opts.half_width = std::max(reach, 20.0 / std::min(table.mass(n), table.mass(n_prime)));
    const KinkProfile H = kink_profile(model, table, n, n_prime, opts);
    std::vector<double> V(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) V[i] = model.derivative(H.value(grid.x(i)), 2);
    return build_schrodinger(grid, std::move(V));
}

std::size_t sturm_count(const OperatorDiscretization& disc, double lambda) {
    const auto& d = disc.diagonal;
    const auto& e = disc.off_diagonal;
    std::size_t count = 0;
    double q = d[0] - lambda;
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == d.size()) break;
        q = d[i + 1] - lambda - e[i] * e[i] / q;
    }
    return count;
}

namespace {

// (A - mu I) x = b for tridiagonal A, Gaussian elimination with partial pivoting.
std::vector<double> solve_shifted(const OperatorDiscretization& disc, double mu, std::vector<double> b) {
    const std::size_t n = disc.diagonal.size();
    std::vector<double> dl(disc.off_diagonal);  // sub
    std::vector<double> du(disc.off_diagonal);  // super
    std::vector<double> d(n);
    std::vector<double> du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = disc.diagonal[i] - mu;
    const double tiny = 1e-300;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = tmp;
            std::swap(b[i], b[i + 1]);
            b[i + 1] -= f * b[i];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    return x;
}

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s == 0.0) return;
    for (double& x : v) x /= s;
}

}  // namespace

std::vector<Eigenpair> low_spectrum(const OperatorDiscretization& disc, std::size_t k) {
    const std::size_t n = disc.diagonal.size();
    if (k < 2) throw ArgumentError("low_spectrum: need k >= 2");
    if (k > n) throw ArgumentError("low_spectrum: k exceeds the matrix size");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(disc.off_diagonal[i - 1]);
        if (i + 1 < n) r += std::abs(disc.off_diagonal[i]);
        lo = std::min(lo, disc.diagonal[i] - r);
        hi = std::max(hi, disc.diagonal[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));

    std::vector<Eigenpair> out;
    for (std::size_t j = 0; j < k; ++j) {
        double a = lo;
        double b = hi;
        while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * scale) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (sturm_count(disc, mid) > j) b = mid;
            else a = mid;
        }
        Eigenpair pair;
        pair.value = 0.5 * (a + b);

        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i) + j);
        for (int it = 0; it < 4; ++it) {
            v = solve_shifted(disc, pair.value, std::move(v));
            for (const Eigenpair& prev : out) {
                if (std::abs(prev.value - pair.value) > 1e-8 * scale) continue;
                double c = 0.0;
                for (std::size_t i = 0; i < n; ++i) c += prev.vector[i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * prev.vector[i];
            }
            normalize(v);
        }
        const auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        if (*big < 0.0) {
            for (double& x : v) x = -x;
        }
        pair.vector = std::move(v);
        out.push_back(std::move(pair));
    }
    return out;
}

double quadratic_form(const OperatorDiscretization& disc, std::span<const double> g) {
    const auto Lg = disc.apply(g);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * Lg[i];
    return s * disc.grid.dx;
}

double h1_norm_sq(const UniformGrid& grid, std::span<const double> g) {
    if (g.size() != grid.n) throw ArgumentError("h1_norm_sq: size mismatch");
    double s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = (g[i] - prev) / grid.dx;
        s += g[i] * g[i] + d * d;
        prev = g[i];
    }
    const double d = -prev / grid.dx;
    s += d * d;
    return s * grid.dx;
}

CoercivityEstimate coercivity_constant(const OperatorDiscretization& disc, std::span<const double> Z,
                                       std::span<const double> kernel, std::size_t count, std::uint64_t seed) {
    const UniformGrid& grid = disc.grid;
    if (Z.size() != grid.n || kernel.size() != grid.n) throw ArgumentError("coercivity_constant: size mismatch");
    double zk = 0.0;
    double zz = 0.0;
    double kk = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        zk += Z[i] * kernel[i];
        zz += Z[i] * Z[i];
        kk += kernel[i] * kernel[i];
    }
    if (!(std::abs(zk) > 1e-8 * std::sqrt(zz * kk))) {
        throw InvalidMultiplierError("coercivity_constant: multiplier is orthogonal to the kernel");
    }

    std::mt19937_64 rng(seed);
    const double reach = 0.6 * std::min(std::abs(grid.x_min), std::abs(grid.x_max()));
    std::uniform_real_distribution<double> center(-std::min(reach, 10.0), std::min(reach, 10.0));
    std::uniform_real_distribution<double> width(0.3, 3.0);
    std::normal_distribution<double> amplitude(0.0, 1.0);
    std::uniform_int_distribution<int> bumps(1, 4);

    CoercivityEstimate est;
    est.samples = count;
    est.lambda = std::numeric_limits<double>::infinity();
    std::vector<double> g(grid.n);
    for (std::size_t s = 0; s < count; ++s) {
        std::fill(g.begin(), g.end(), 0.0);
        const int m = bumps(rng);
        for (int b = 0; b < m; ++b) {
            const double c = center(rng);
            const double w = width(rng);
            const double A = amplitude(rng);
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double z = (grid.x(i) - c) / w;
                g[i] += A * std::exp(-0.5 * z * z);
            }
        }
        for (int pass = 0; pass < 2; ++pass) {
            double zg = 0.0;
            for (std::size_t i = 0; i < grid.n; ++i) zg += Z[i] * g[i];
            for (std::size_t i = 0; i < grid.n; ++i) g[i] -= zg / zz * Z[i];
        }
        double zg = 0.0;
        double gg = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            zg += Z[i] * g[i];
            gg += g[i] * g[i];
        }
        est.max_pairing = std::max(est.max_pairing, std::abs(zg) / std::sqrt(zz * gg));
        est.lambda = std::min(est.lambda, quadratic_form(disc, g) / h1_norm_sq(grid, g));
    }
    return est;
}

void write_eigenpairs(const OperatorDiscretization& disc, const std::vector<Eigenpair>& pairs,
                      const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::ofstream values(fs::path(directory) / "eigenvalues.csv");
    std::ofstream vectors(fs::path(directory) / "eigenvectors.csv");
    if (!values || !vectors) throw ArgumentError("write_eigenpairs: cannot write to " + directory);
    values << std::setprecision(std::numeric_limits<double>::max_digits10) << "index,lambda\n";
    for (std::size_t j = 0; j < pairs.size(); ++j) values << j << ',' << pairs[j].value << '\n';
    vectors << std::setprecision(std::numeric_limits<double>::max_digits10) << 'x';
    for (std::size_t j = 0; j < pairs.size(); ++j) vectors << ",mode_" << j;
    vectors << '\n';
    for (std::size_t i = 0; i < disc.grid.n; ++i) {
        vectors << disc.grid.x(i);
        for (const Eigenpair& p : pairs) vectors << ',' << p.vector[i];
        vectors << '\n';
    }
}

}  // namespace mk
