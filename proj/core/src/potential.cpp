#include "multikink/potential.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mk {

Potential Potential::phi4() {
    Potential p;
    p.kind_ = PotentialKind::phi4;
    p.search_interval_ = {-2.0, 2.0};
    return p;
}

Potential Potential::phi6() {
    Potential p;
    p.kind_ = PotentialKind::phi6;
    p.search_interval_ = {-2.0, 2.0};
    return p;
}

Potential Potential::sine_gordon() {
    Potential p;
    p.kind_ = PotentialKind::sine_gordon;
    p.search_interval_ = {-1.0, 13.0};
    return p;
}

Potential Potential::polynomial(std::vector<double> coeffs, std::pair<double, double> search_interval) {
    if (coeffs.empty()) throw ConfigError("potential.coeffs: polynomial needs at least one coefficient");
    Potential p;
    p.kind_ = PotentialKind::custom;
    p.basis_ = CustomBasis::polynomial;
    p.coeffs_ = std::move(coeffs);
    p.search_interval_ = search_interval;
    return p;
}

Potential Potential::trigonometric(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                                   std::pair<double, double> search_interval) {
    if (cos_coeffs.empty()) throw ConfigError("potential.coeffs: trigonometric needs a_0");
    Potential p;
    p.kind_ = PotentialKind::custom;
    p.basis_ = CustomBasis::trigonometric;
    p.coeffs_ = std::move(cos_coeffs);
    p.sin_coeffs_ = std::move(sin_coeffs);
    p.search_interval_ = search_interval;
    return p;
}

std::string Potential::name() const {
    switch (kind_) {
        case PotentialKind::phi4: return "phi4";
        case PotentialKind::phi6: return "phi6";
        case PotentialKind::sine_gordon: return "sine_gordon";
        case PotentialKind::custom:
            return basis_ == CustomBasis::polynomial ? "custom_polynomial" : "custom_trigonometric";
    }
    return "unknown";
}

namespace {

double polynomial_derivative(const std::vector<double>& c, double x, int order) {
    // Horner on the order-th derivative coefficients.
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(order);) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - static_cast<std::size_t>(j));
        acc = acc * x + c[k] * falling;
    }
    return acc;
}

double trig_derivative(const std::vector<double>& a, const std::vector<double>& b, double x, int order) {
    const double shift = order * M_PI / 2.0;
    double acc = order == 0 ? a[0] : 0.0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        const double kk = static_cast<double>(k);
        acc += a[k] * std::pow(kk, order) * std::cos(kk * x + shift);
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        const double kk = static_cast<double>(k + 1);
        acc += b[k] * std::pow(kk, order) * std::sin(kk * x + shift);
    }
    return acc;
}

}  // namespace

double Potential::derivative(double phi, int order) const noexcept {
    switch (kind_) {
        case PotentialKind::phi4: {
            const double p2 = phi * phi;
            // factored so that W and W' keep full relative accuracy near the vacua
            const double q = (1.0 - phi) * (1.0 + phi);
            switch (order) {
                case 0: return q * q;
                case 1: return -4.0 * phi * q;
                case 2: return 12.0 * p2 - 4.0;
                case 3: return 24.0 * phi;
                case 4: return 24.0;
                default: return 0.0;
            }
        }
        case PotentialKind::phi6: {
            const double p2 = phi * phi;
            const double q = (1.0 - phi) * (1.0 + phi);
            switch (order) {
                case 0: return p2 * q * q;
                case 1: return 2.0 * phi * q * (1.0 - 3.0 * p2);
                case 2: return 2.0 - 24.0 * p2 + 30.0 * p2 * p2;
                case 3: return -48.0 * phi + 120.0 * p2 * phi;
                case 4: return -48.0 + 360.0 * p2;
                case 5: return 720.0 * phi;
                case 6: return 720.0;
                default: return 0.0;
            }
        }
        case PotentialKind::sine_gordon:
            switch (order % 4) {
                case 0: {
                    if (order != 0) return -std::cos(phi);
                    const double s = std::sin(0.5 * phi);
                    return 2.0 * s * s;
                }
                case 1: return std::sin(phi);
                case 2: return std::cos(phi);
                default: return -std::sin(phi);
            }
        case PotentialKind::custom:
            return basis_ == CustomBasis::polynomial ? polynomial_derivative(coeffs_, phi, order)
                                                     : trig_derivative(coeffs_, sin_coeffs_, phi, order);
    }
    return 0.0;
}

double Potential::eval(double phi, int order) const {
    if (order < 0 || order > 3) {
        throw ArgumentError("eval_potential: derivative order must be in {0,1,2,3}, got " + std::to_string(order));
    }
    return derivative(phi, order);
}

double Potential::first_derivative_remainder(double phi, double g) const noexcept {
    if (std::abs(g) < 1e-4) {
        return g * g * (0.5 * derivative(phi, 3) + g * derivative(phi, 4) / 6.0);
    }
    return derivative(phi + g, 1) - derivative(phi, 1) - derivative(phi, 2) * g;
}

double eval_potential(const Potential& model, double phi, int order) { return model.eval(phi, order); }

double VacuumTable::omega(int label) const {
    if (label < 0 || static_cast<std::size_t>(label) >= vacua.size()) {
        throw ArgumentError("vacuum label " + std::to_string(label) + " outside table of size " +
                            std::to_string(vacua.size()));
    }
    return vacua[static_cast<std::size_t>(label)];
}

double VacuumTable::mass(int label) const {
    (void)omega(label);
    return masses[static_cast<std::size_t>(label)];
}

VacuumTable find_vacua(const Potential& model, std::pair<double, double> interval, double tol) {
    const auto [lo, hi] = interval;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw ArgumentError("find_vacua: interval must be finite with lo < hi");
    }
    if (!(tol > 0.0)) throw ArgumentError("find_vacua: tol must be positive");

    const auto samples = static_cast<std::size_t>(std::max(4000.0, (hi - lo) / 1e-3));
    const double step = (hi - lo) / static_cast<double>(samples);
    auto dW = [&](double x) { return model.derivative(x, 1); };

    std::vector<double> candidates;
    double x_prev = lo;
    double d_prev = dW(lo);
    for (std::size_t i = 1; i <= samples; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double d = dW(x);
        if (d_prev < 0.0 && d >= 0.0) {
            double a = x_prev;
            double b = x;
            if (d == 0.0) {
                candidates.push_back(x);
            } else {
                while (b - a > tol) {
                    const double mid = 0.5 * (a + b);
                    if (dW(mid) < 0.0) a = mid;
                    else b = mid;
                }
                double root = 0.5 * (a + b);
                for (int it = 0; it < 3; ++it) {
                    const double w2 = model.derivative(root, 2);
                    if (w2 <= 0.0) break;
                    const double next = root - dW(root) / w2;
                    if (next < x_prev || next > x) break;
                    root = next;
                }
                candidates.push_back(root);
            }
        }
        x_prev = x;
        d_prev = d;
    }

    // Zeros of W are minima where W itself vanishes; W' is expected to be
    // O(m^2 * tol) there, so W is O(m^2 tol^2).
    VacuumTable table;
    for (double c : candidates) {
        const double w0 = model.derivative(c, 0);
        if (std::abs(w0) > std::max(tol, 1e-10)) continue;  // positive local minimum, not a vacuum
        const double w2 = model.derivative(c, 2);
        if (w2 <= tol) {
            std::ostringstream msg;
            msg << "find_vacua: degenerate vacuum at phi = " << c << " (W'' = " << w2 << ")";
            throw DegenerateVacuumError(msg.str());
        }
        if (!table.vacua.empty() && std::abs(table.vacua.back() - c) <= 10.0 * tol) continue;
        table.vacua.push_back(c);
        table.masses.push_back(std::sqrt(w2));
    }
    return table;
}

ChainOfVacua validate_chain(const VacuumTable& table, const std::vector<int>& labels) {
    if (labels.empty()) throw ArgumentError("validate_chain: empty label sequence");
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= table.size()) {
            throw ArgumentError("validate_chain: label " + std::to_string(l) + " outside vacuum table of size " +
                                std::to_string(table.size()));
        }
    }
    for (std::size_t k = 1; k < labels.size(); ++k) {
        if (std::abs(labels[k - 1] - labels[k]) != 1) {
            throw InvalidChainError("invalid chain of vacua: labels (" + std::to_string(labels[k - 1]) + ", " +
                                    std::to_string(labels[k]) + ") at position " + std::to_string(k) +
                                    " are not adjacent");
        }
    }
    return ChainOfVacua{labels};
}

}  // namespace mk
