#pragma once

#include "multikink/grid.hpp"
#include "multikink/potential.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mk {

/// Exponential tail H(x) - omega = coeff * exp(-mass * |x|) beyond the table.
struct TailModel {
    double omega = 0.0;
    double mass = 0.0;
    double coeff = 0.0;  ///< signed
};

/// H and its first three x-derivatives at one point.
struct KinkJet {
    double h = 0.0;
    double dh = 0.0;
    double d2h = 0.0;
    double d3h = 0.0;
};

/// Tabulated static kink (n' = n+1) or antikink (n' = n-1).
///
/// Inside [-X, X] values come from cubic Hermite interpolation of the tabulated
/// H and dH; derivatives follow from the Bogomolny relations dH = +-sqrt(2W(H)),
/// d2H = W'(H). Outside, the single-exponential tails take over.
class KinkProfile {
public:
    KinkProfile(Potential model, int n, int n_prime, UniformGrid grid, std::vector<double> values,
                TailModel left, TailModel right, double center_value);

    [[nodiscard]] double value(double x) const noexcept;
    [[nodiscard]] KinkJet jet(double x) const noexcept;

    /// The same profile mirrored, x -> -x (kink <-> antikink).
    [[nodiscard]] KinkProfile reflected() const;

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int n_prime() const noexcept { return n_prime_; }
    [[nodiscard]] bool is_kink() const noexcept { return n_prime_ > n_; }
    [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> slopes() const noexcept { return slopes_; }
    [[nodiscard]] const TailModel& left_tail() const noexcept { return left_; }
    [[nodiscard]] const TailModel& right_tail() const noexcept { return right_; }
    [[nodiscard]] double center_value() const noexcept { return center_value_; }
    [[nodiscard]] double half_width() const noexcept { return grid_.x_max(); }
    [[nodiscard]] const Potential& model() const noexcept { return model_; }

private:
    Potential model_;
    int n_ = 0;
    int n_prime_ = 1;
    UniformGrid grid_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    TailModel left_;
    TailModel right_;
    double center_value_ = 0.0;
};

/// Least-squares estimate of one exponential tail rate.
struct TailFit {
    enum class Side { left, right };
    Side side = Side::left;
    double fitted_rate = 0.0;
    double expected_rate = 0.0;
    double fit_residual = 0.0;
};

/// G_n(psi) = integral from the midpoint of (omega_n, omega_{n+1}) to psi of dy / sqrt(2W(y)).
/// Throws DomainError unless omega_n < psi < omega_{n+1}.
[[nodiscard]] double quadrature_G(const Potential& model, const VacuumTable& table, int n, double psi);

struct ProfileOptions {
    double half_width = 0.0;  ///< 0 selects 20 / min(m_n, m_n')
    double dx = 0.01;
    double ode_tol = 1e-12;
    double tail_switch = 1e-10;
};

/// Static kink/antikink between adjacent vacua by integrating the Bogomolny
/// ODE outward from the midpoint value. Throws IntegrationError if the
/// numerical solution leaves the open vacuum interval.
[[nodiscard]] KinkProfile kink_profile(const Potential& model, const VacuumTable& table, int n, int n_prime,
                                       const ProfileOptions& options = {});

/// Integral of sqrt(2W) between the two vacua.
[[nodiscard]] double kink_energy(const Potential& model, const VacuumTable& table, int n, int n_prime);

/// Gamma(phi_b) - Gamma(phi_a) with Gamma(phi) = integral_0^phi sqrt(2W).
[[nodiscard]] double gamma_functional(const Potential& model, double phi_a, double phi_b);

/// Fits log|H - omega| against x on [w0, w1] (right tail) and [-w1, -w0]
/// (left tail), tabulated nodes only.
[[nodiscard]] std::pair<TailFit, TailFit> fit_tails(const KinkProfile& profile, std::pair<double, double> window);

/// sup over interior nodes of |D2 psi - W'(psi)|.
[[nodiscard]] double stationary_residual(const Potential& model, std::span<const double> field, double dx);

/// Potential energy of the tabulated profile including the analytic tail pieces.
[[nodiscard]] double profile_potential_energy(const KinkProfile& profile);

/// CSV with header x,H,dH over the tabulated grid.
void write_profile_csv(const KinkProfile& profile, const std::string& path);

}  // namespace mk
