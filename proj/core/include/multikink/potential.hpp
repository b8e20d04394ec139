#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mk {

enum class PotentialKind { phi4, phi6, sine_gordon, custom };

/// Basis of a user-supplied potential. Coefficient lists make every
/// derivative order exact.
enum class CustomBasis {
    polynomial,     ///< W = sum_k c_k phi^k
    trigonometric,  ///< W = a_0 + sum_k (a_k cos(k phi) + b_k sin(k phi))
};

/// External potential W >= 0 with non-degenerate isolated zeros.
///
/// Built-in models use closed forms. Immutable after construction.
class Potential {
public:
    static Potential phi4();         ///< (1 - phi^2)^2
    static Potential phi6();         ///< phi^2 (1 - phi^2)^2
    static Potential sine_gordon();  ///< 1 - cos(phi)
    static Potential polynomial(std::vector<double> coeffs, std::pair<double, double> search_interval);
    static Potential trigonometric(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                                   std::pair<double, double> search_interval);

    /// d^order W / dphi^order for order in {0,1,2,3}; anything else throws ArgumentError.
    [[nodiscard]] double eval(double phi, int order) const;

    /// Unchecked derivative up to order 4 (used internally by Taylor remainders).
    [[nodiscard]] double derivative(double phi, int order) const noexcept;

    /// W'(phi + g) - W'(phi) - W''(phi) g, evaluated without cancellation for small g.
    [[nodiscard]] double first_derivative_remainder(double phi, double g) const noexcept;

    [[nodiscard]] PotentialKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;
    [[nodiscard]] std::pair<double, double> search_interval() const noexcept { return search_interval_; }

private:
    PotentialKind kind_ = PotentialKind::phi4;
    CustomBasis basis_ = CustomBasis::polynomial;
    std::vector<double> coeffs_;
    std::vector<double> sin_coeffs_;
    std::pair<double, double> search_interval_{-2.0, 2.0};
};

/// Vacua omega_n in increasing order with masses m_n = sqrt(W''(omega_n)).
/// Labels are positions in this table.
struct VacuumTable {
    std::vector<double> vacua;
    std::vector<double> masses;

    [[nodiscard]] std::size_t size() const noexcept { return vacua.size(); }
    [[nodiscard]] double omega(int label) const;
    [[nodiscard]] double mass(int label) const;
};

/// Labels (n_0, ..., n_K) with |n_{k-1} - n_k| = 1.
struct ChainOfVacua {
    std::vector<int> labels;

    [[nodiscard]] std::size_t kinks() const noexcept { return labels.empty() ? 0 : labels.size() - 1; }
};

[[nodiscard]] double eval_potential(const Potential& model, double phi, int order);

/// All zeros of W in `interval`, located by sign-change bracketing of W' on a
/// fine scan followed by bisection and Newton polishing to `tol`.
/// Throws DegenerateVacuumError if a zero has W'' <= tol.
[[nodiscard]] VacuumTable find_vacua(const Potential& model, std::pair<double, double> interval,
                                     double tol = 1e-12);

/// Throws ArgumentError for out-of-range labels, InvalidChainError for
/// non-adjacent consecutive labels.
[[nodiscard]] ChainOfVacua validate_chain(const VacuumTable& table, const std::vector<int>& labels);

}  // namespace mk
