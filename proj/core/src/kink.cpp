#include "multikink/kink.hpp"

#include "multikink/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mk {

namespace {

double bogomolny_slope(const Potential& model, double h, double sign) {
    return sign * std::sqrt(2.0 * std::max(model.derivative(h, 0), 0.0));
}

template <typename F>
double gk_integrate(F&& f, double a, double b) {
    if (a == b) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &error);
}

}  // namespace

KinkProfile::KinkProfile(Potential model, int n, int n_prime, UniformGrid grid, std::vector<double> values,
                         TailModel left, TailModel right, double center_value)
    : model_(std::move(model)),
      n_(n),
      n_prime_(n_prime),
      grid_(grid),
      values_(std::move(values)),
      left_(left),
      right_(right),
      center_value_(center_value) {
    if (values_.size() != grid_.n || grid_.n < 2) throw ArgumentError("KinkProfile: values/grid size mismatch");
    const double sign = is_kink() ? 1.0 : -1.0;
    slopes_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) slopes_[i] = bogomolny_slope(model_, values_[i], sign);
}

double KinkProfile::value(double x) const noexcept {
    const double X = grid_.x_max();
    if (x < -X) return left_.omega + left_.coeff * std::exp(left_.mass * x);
    if (x > X) return right_.omega + right_.coeff * std::exp(-right_.mass * x);
    const double u = (x - grid_.x_min) / grid_.dx;
    auto i = static_cast<std::size_t>(u);
    if (i >= grid_.n - 1) i = grid_.n - 2;
    const double t = u - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[i] + h10 * grid_.dx * slopes_[i] + h01 * values_[i + 1] + h11 * grid_.dx * slopes_[i + 1];
}

KinkJet KinkProfile::jet(double x) const noexcept {
    const double X = grid_.x_max();
    KinkJet j;
    if (x < -X || x > X) {
        const TailModel& tail = x < 0.0 ? left_ : right_;
        const double rate = x < 0.0 ? tail.mass : -tail.mass;
        const double dev = tail.coeff * std::exp(rate * x);
        j.h = tail.omega + dev;
        j.dh = rate * dev;
        j.d2h = rate * rate * dev;
        j.d3h = rate * rate * rate * dev;
        return j;
    }
    j.h = value(x);
    j.dh = bogomolny_slope(model_, j.h, is_kink() ? 1.0 : -1.0);
    j.d2h = model_.derivative(j.h, 1);
    j.d3h = model_.derivative(j.h, 2) * j.dh;
    return j;
}

KinkProfile KinkProfile::reflected() const {
    std::vector<double> mirrored(values_.rbegin(), values_.rend());
    return KinkProfile(model_, n_prime_, n_, grid_, std::move(mirrored), right_, left_, center_value_);
}

double quadrature_G(const Potential& model, const VacuumTable& table, int n, double psi) {
    const double lo = table.omega(n);
    const double hi = table.omega(n + 1);
    if (!(psi > lo && psi < hi)) {
        std::ostringstream msg;
        msg << "quadrature_G: psi = " << psi << " not strictly inside (" << lo << ", " << hi << ")";
        throw DomainError(msg.str());
    }
    const double base = 0.5 * (lo + hi);
    // y = end - (end - base) e^{-u}; the integrand tends to 1/m at the vacuum
    const double end = psi > base ? hi : lo;
    const double span = end - base;
    auto integrand = [&](double u) {
        const double d = span * std::exp(-u);
        const double w = model.derivative(end - d, 0);
        return w > 0.0 ? std::abs(d) / std::sqrt(2.0 * w) : 0.0;
    };
    const double u_end = -std::log((end - psi) / span);
    const double g = gk_integrate(integrand, 0.0, u_end);
    return psi > base ? g : -g;
}

KinkProfile kink_profile(const Potential& model, const VacuumTable& table, int n, int n_prime,
                         const ProfileOptions& options) {
    if (std::abs(n - n_prime) != 1) {
        throw InvalidChainError("kink_profile: vacua " + std::to_string(n) + " and " + std::to_string(n_prime) +
                                " are not adjacent");
    }
    if (n_prime < n) return kink_profile(model, table, n_prime, n, options).reflected();
    if (!(options.dx > 0.0)) throw ArgumentError("kink_profile: dx must be positive");

    const double lo = table.omega(n);
    const double hi = table.omega(n_prime);
    const double m_lo = table.mass(n);
    const double m_hi = table.mass(n_prime);
    const double X = options.half_width > 0.0 ? options.half_width : 20.0 / std::min(m_lo, m_hi);
    const auto half = static_cast<std::size_t>(std::ceil(X / options.dx - 1e-9));
    const UniformGrid grid = UniformGrid::symmetric(half, options.dx);
    const double center = 0.5 * (lo + hi);

    std::vector<double> values(grid.n, center);

    // Integrate in s = |x| outward from the center; direction +1 heads to hi, -1 to lo.
    auto integrate_half = [&](int direction) -> TailModel {
        namespace odeint = boost::numeric::odeint;
        using State = std::array<double, 1>;
        const double target = direction > 0 ? hi : lo;
        const double mass = direction > 0 ? m_hi : m_lo;
        auto rhs = [&](const State& y, State& dy, double) {
            dy[0] = bogomolny_slope(model, y[0], static_cast<double>(direction));
        };
        auto stepper = odeint::make_dense_output(options.ode_tol, options.ode_tol,
                                                 odeint::runge_kutta_dopri5<State>());
        stepper.initialize(State{center}, 0.0, options.dx * 0.25);
        State out{center};
        std::size_t switched_at = 0;  // node index (in s) where the tail formula takes over
        double gap = 0.0;
        for (std::size_t k = 1; k <= half; ++k) {
            const double s = static_cast<double>(k) * grid.dx;
            while (stepper.current_time() < s) stepper.do_step(rhs);
            stepper.calc_state(s, out);
            if (!(out[0] > lo && out[0] < hi) || !std::isfinite(out[0])) {
                std::ostringstream msg;
                msg << "kink_profile: Bogomolny integration left (" << lo << ", " << hi << ") at |x| = " << s;
                throw IntegrationError(msg.str());
            }
            const std::size_t idx = direction > 0 ? half + k : half - k;
            values[idx] = out[0];
            gap = std::abs(target - out[0]);
            if (gap < options.tail_switch) {
                switched_at = k;
                break;
            }
        }
        const std::size_t last = switched_at == 0 ? half : switched_at;
        const double s_last = static_cast<double>(last) * grid.dx;
        // H - omega = coeff * exp(-mass * s) with the sign of the deviation
        const double dev = values[direction > 0 ? half + last : half - last] - target;
        const double coeff = dev * std::exp(mass * s_last);
        for (std::size_t k = last + 1; k <= half; ++k) {
            const double s = static_cast<double>(k) * grid.dx;
            values[direction > 0 ? half + k : half - k] = target + coeff * std::exp(-mass * s);
        }
        return TailModel{target, mass, coeff};
    };

    values[half] = center;
    const TailModel right = integrate_half(+1);
    const TailModel left = integrate_half(-1);
    return KinkProfile(model, n, n_prime, grid, std::move(values), left, right, center);
}

double gamma_functional(const Potential& model, double phi_a, double phi_b) {
    auto integrand = [&](double y) { return std::sqrt(2.0 * std::max(model.derivative(y, 0), 0.0)); };
    return gk_integrate(integrand, phi_a, phi_b);
}

double kink_energy(const Potential& model, const VacuumTable& table, int n, int n_prime) {
    if (std::abs(n - n_prime) != 1) {
        throw InvalidChainError("kink_energy: vacua " + std::to_string(n) + " and " + std::to_string(n_prime) +
                                " are not adjacent");
    }
    const double a = table.omega(std::min(n, n_prime));
    const double b = table.omega(std::max(n, n_prime));
    return gamma_functional(model, a, b);
}

std::pair<TailFit, TailFit> fit_tails(const KinkProfile& profile, std::pair<double, double> window) {
    const auto [w0, w1] = window;
    const UniformGrid& g = profile.grid();
    if (!(w0 > 0.0 && w1 > w0 && w1 <= g.x_max() + 1e-12)) {
        throw ArgumentError("fit_tails: window must satisfy 0 < w0 < w1 <= half width");
    }
    auto fit_side = [&](TailFit::Side side) {
        const TailModel& tail = side == TailFit::Side::left ? profile.left_tail() : profile.right_tail();
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            const double ax = std::abs(x);
            if ((side == TailFit::Side::left) != (x < 0.0) || ax < w0 || ax > w1) continue;
            const double dev = std::abs(profile.values()[i] - tail.omega);
            if (!(dev > 1e-14)) {
                throw FitError("fit_tails: |H - omega| underflows inside the window at x = " + std::to_string(x));
            }
            xs.push_back(ax);
            ys.push_back(std::log(dev));
        }
        if (xs.size() < 3) throw FitError("fit_tails: fewer than three nodes inside the window");
        const LineFit line = fit_line(xs, ys);
        TailFit fit;
        fit.side = side;
        fit.fitted_rate = -line.slope;
        fit.expected_rate = tail.mass;
        fit.fit_residual = line.rms_residual;
        if (!(fit.fitted_rate > 0.0)) throw FitError("fit_tails: non-decaying tail");
        return fit;
    };
    return {fit_side(TailFit::Side::left), fit_side(TailFit::Side::right)};
}

double stationary_residual(const Potential& model, std::span<const double> field, double dx) {
    double worst = 0.0;
    const double inv = 1.0 / (dx * dx);
    for (std::size_t i = 1; i + 1 < field.size(); ++i) {
        const double lap = (field[i + 1] - 2.0 * field[i] + field[i - 1]) * inv;
        worst = std::max(worst, std::abs(lap - model.derivative(field[i], 1)));
    }
    return worst;
}

double profile_potential_energy(const KinkProfile& profile) {
    const auto values = profile.values();
    const auto slopes = profile.slopes();
    std::vector<double> density(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        density[i] = 0.5 * slopes[i] * slopes[i] + profile.model().derivative(values[i], 0);
    }
    const double X = profile.half_width();
    double tails = 0.0;
    for (const TailModel* t : {&profile.left_tail(), &profile.right_tail()}) {
        tails += 0.5 * t->mass * t->coeff * t->coeff * std::exp(-2.0 * t->mass * X);
    }
    return simpson(density, profile.grid().dx) + tails;
}

void write_profile_csv(const KinkProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path + " for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "x,H,dH\n";
    for (std::size_t i = 0; i < profile.grid().n; ++i) {
        out << profile.grid().x(i) << ',' << profile.values()[i] << ',' << profile.slopes()[i] << '\n';
    }
}

}  // namespace mk
