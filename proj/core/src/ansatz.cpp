#include "multikink/ansatz.hpp"

#include "multikink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mk {

double lorentz_gamma(double v) {
    if (!(std::abs(v) < 1.0)) throw ArgumentError("Lorentz factor needs |v| < 1");
    return 1.0 / std::sqrt(1.0 - v * v);
}

MultikinkParams MultikinkParams::make(ChainOfVacua chain, std::vector<double> velocities,
                                      std::vector<double> shifts) {
    const std::size_t K = chain.kinks();
    if (velocities.size() != K || shifts.size() != K) {
        std::ostringstream msg;
        msg << "multikink parameters: chain has " << K << " kinks but got " << velocities.size()
            << " velocities and " << shifts.size() << " shifts";
        throw ConfigError(msg.str());
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (!(velocities[k] > -1.0 && velocities[k] < 1.0)) {
            throw ConfigError("inadmissible velocity " + std::to_string(velocities[k]) + ": need -1 < v < 1");
        }
        if (k > 0 && !(velocities[k - 1] < velocities[k])) {
            throw ConfigError("inadmissible velocities: need strictly increasing v_1 < ... < v_K");
        }
    }
    MultikinkParams p{std::move(chain), std::move(velocities), std::move(shifts), {}};
    p.gammas.reserve(K);
    for (double v : p.velocities) p.gammas.push_back(lorentz_gamma(v));
    return p;
}

TwoField TwoField::zeros(const UniformGrid& grid) {
    return TwoField{grid, std::vector<double>(grid.n, 0.0), std::vector<double>(grid.n, 0.0)};
}

MultikinkAnsatz::MultikinkAnsatz(Potential model, VacuumTable table, MultikinkParams params,
                                 const ProfileOptions& options)
    : model_(std::move(model)), table_(std::move(table)), params_(std::move(params)) {
    const auto& labels = params_.chain.labels;
    if (labels.empty()) throw ConfigError("multikink: empty chain");
    (void)validate_chain(table_, labels);
    std::map<int, std::shared_ptr<const KinkProfile>> kinks;  // keyed by lower label
    for (std::size_t k = 0; k + 1 < labels.size(); ++k) {
        const int lower = std::min(labels[k], labels[k + 1]);
        auto it = kinks.find(lower);
        if (it == kinks.end()) {
            it = kinks.emplace(lower, std::make_shared<const KinkProfile>(
                                          kink_profile(model_, table_, lower, lower + 1, options)))
                     .first;
        }
        if (labels[k + 1] > labels[k]) {
            profiles_.push_back(it->second);
        } else {
            profiles_.push_back(std::make_shared<const KinkProfile>(it->second->reflected()));
        }
    }
}

MultikinkAnsatz MultikinkAnsatz::with_params(MultikinkParams params) const {
    if (params.chain.labels != params_.chain.labels) {
        throw ArgumentError("MultikinkAnsatz::with_params: chain must not change");
    }
    MultikinkAnsatz copy = *this;
    copy.params_ = std::move(params);
    return copy;
}

const KinkProfile& MultikinkAnsatz::profile(std::size_t k) const {
    if (k >= profiles_.size()) throw ArgumentError("kink index out of range");
    return *profiles_[k];
}

double MultikinkAnsatz::omega_left() const { return table_.omega(params_.chain.labels.front()); }
double MultikinkAnsatz::omega_right() const { return table_.omega(params_.chain.labels.back()); }
double MultikinkAnsatz::omega_before(std::size_t k) const { return table_.omega(params_.chain.labels.at(k)); }
double MultikinkAnsatz::mass_squared_before(std::size_t k) const {
    const double m = table_.mass(params_.chain.labels.at(k));
    return m * m;
}

double MultikinkAnsatz::core_half_width() const noexcept {
    double w = 0.0;
    for (const auto& p : profiles_) w = std::max(w, p->half_width());
    return w;
}

double MultikinkAnsatz::min_mass() const {
    double m = table_.mass(params_.chain.labels.front());
    for (int l : params_.chain.labels) m = std::min(m, table_.mass(l));
    return m;
}

FieldState multikink(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid) {
    FieldState s;
    s.t = t;
    s.grid = grid;
    s.phi.assign(grid.n, ansatz.omega_left());
    s.phi_dot.assign(grid.n, 0.0);
    const auto& p = ansatz.params();
    for (std::size_t k = 0; k < ansatz.kinks(); ++k) {
        const KinkProfile& prof = ansatz.profile(k);
        const double base = ansatz.omega_before(k);
        const double gv = p.gammas[k] * p.velocities[k];
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double y = ansatz.argument(k, t, grid.x(i));
            const KinkJet j = prof.jet(y);
            s.phi[i] += j.h - base;
            s.phi_dot[i] -= gv * j.dh;
        }
    }
    s.sector = std::make_pair(ansatz.params().chain.labels.front(), ansatz.params().chain.labels.back());
    return s;
}

std::vector<double> potential_V(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid) {
    const std::size_t K = ansatz.kinks();
    if (K == 0) return std::vector<double>(grid.n, ansatz.mass_squared_before(0));
    std::vector<double> V(grid.n, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const KinkProfile& prof = ansatz.profile(k);
        const double offset = k == 0 ? 0.0 : ansatz.mass_squared_before(k);
        for (std::size_t i = 0; i < grid.n; ++i) {
            V[i] += ansatz.model().derivative(prof.value(ansatz.argument(k, t, grid.x(i))), 2) - offset;
        }
    }
    return V;
}

ModePair zero_modes(const MultikinkAnsatz& ansatz, std::size_t k, double t, const UniformGrid& grid) {
    if (k >= ansatz.kinks()) throw ArgumentError("zero_modes: kink index out of range");
    const double v = ansatz.params().velocities[k];
    const double a = ansatz.params().shifts[k];
    const double g = ansatz.params().gammas[k];
    const KinkProfile& prof = ansatz.profile(k);
    ModePair m;
    m.k = k;
    m.Y0 = TwoField::zeros(grid);
    m.Y1 = TwoField::zeros(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double y = grid.x(i) - v * t - a;
        const KinkJet j = prof.jet(g * y);
        m.Y0.first[i] = j.dh;
        m.Y0.second[i] = -g * v * j.d2h;
        // velocity mode scaled so that d/dt <psi1, h> = -<psi0, h> / gamma exactly
        m.Y1.first[i] = -g * v * y * j.dh;
        m.Y1.second[i] = g * j.dh + g * g * v * v * y * j.d2h;
    }
    // J = [[0, 1], [-1, 0]]: J(a, b) = (b, -a)
    auto apply_J = [](const TwoField& f) {
        TwoField out = f;
        out.first = f.second;
        out.second.resize(f.first.size());
        for (std::size_t i = 0; i < f.first.size(); ++i) out.second[i] = -f.first[i];
        return out;
    };
    m.psi0 = apply_J(m.Y0);
    m.psi1 = apply_J(m.Y1);
    return m;
}

double bump_chi(double s) noexcept {
    const double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double u = 2.0 - a;  // 0 at |s| = 2, 1 at |s| = 1
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_chi(const MultikinkAnsatz& ansatz, std::size_t k, double t, double x, double rho) {
    if (!(t > 0.0)) throw DomainError("cutoff_chi: needs t > 0");
    if (!(rho > 0.0)) throw ArgumentError("cutoff_chi: rho must be positive");
    const auto& p = ansatz.params();
    return bump_chi((x - p.velocities.at(k) * t - p.shifts.at(k)) / (rho * t));
}

double default_rho(const MultikinkParams& params) {
    const auto& v = params.velocities;
    if (v.size() < 2) return 0.05;
    double gap = v[1] - v[0];
    for (std::size_t k = 2; k < v.size(); ++k) gap = std::min(gap, v[k] - v[k - 1]);
    return 0.05 * gap;
}

namespace {

double quad_form_with(const TwoField& h, std::span<const double> V, std::span<const double> drift) {
    const auto hx = d_dx(h.first, h.grid.dx);
    std::vector<double> density(h.grid.n);
    for (std::size_t i = 0; i < h.grid.n; ++i) {
        const double hd = h.second[i];
        density[i] = hd * hd + hx[i] * hx[i] + 2.0 * drift[i] * hd * hx[i] + V[i] * h.first[i] * h.first[i];
    }
    return 0.5 * simpson(density, h.grid.dx);
}

}  // namespace

double quad_form_Q(const MultikinkAnsatz& ansatz, double t, const TwoField& h, double rho) {
    const UniformGrid& grid = h.grid;
    const auto V = potential_V(ansatz, t, grid);
    std::vector<double> drift(grid.n, 0.0);
    for (std::size_t k = 0; k < ansatz.kinks(); ++k) {
        const double v = ansatz.params().velocities[k];
        for (std::size_t i = 0; i < grid.n; ++i) drift[i] += cutoff_chi(ansatz, k, t, grid.x(i), rho) * v;
    }
    return quad_form_with(h, V, drift);
}

double quad_form_single(const MultikinkAnsatz& ansatz, std::size_t k, double t, const TwoField& h) {
    const UniformGrid& grid = h.grid;
    const KinkProfile& prof = ansatz.profile(k);
    std::vector<double> V(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        V[i] = ansatz.model().derivative(prof.value(ansatz.argument(k, t, grid.x(i))), 2);
    }
    const std::vector<double> drift(grid.n, ansatz.params().velocities[k]);
    return quad_form_with(h, V, drift);
}

double project(const TwoField& h, const TwoField& mode) {
    if (!h.grid.matches(mode.grid) || h.first.size() != mode.first.size()) {
        throw ArgumentError("project: grid mismatch");
    }
    return simpson_dot(h.first, mode.first, h.grid.dx) + simpson_dot(h.second, mode.second, h.grid.dx);
}

double energy_norm_sq(const TwoField& h) {
    const auto hx = d_dx(h.first, h.grid.dx);
    std::vector<double> density(h.grid.n);
    for (std::size_t i = 0; i < h.grid.n; ++i) {
        density[i] = h.first[i] * h.first[i] + hx[i] * hx[i] + h.second[i] * h.second[i];
    }
    return simpson(density, h.grid.dx);
}

void remove_projections(TwoField& h, const std::vector<TwoField>& modes) {
    std::vector<TwoField> basis;
    for (const TwoField& m : modes) {
        TwoField e = m;
        for (int pass = 0; pass < 2; ++pass) {
            for (const TwoField& b : basis) {
                const double c = project(e, b);
                for (std::size_t i = 0; i < e.first.size(); ++i) {
                    e.first[i] -= c * b.first[i];
                    e.second[i] -= c * b.second[i];
                }
            }
        }
        const double norm = std::sqrt(project(e, e));
        if (norm == 0.0) continue;
        for (std::size_t i = 0; i < e.first.size(); ++i) {
            e.first[i] /= norm;
            e.second[i] /= norm;
        }
        basis.push_back(std::move(e));
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (const TwoField& b : basis) {
            const double c = project(h, b);
            for (std::size_t i = 0; i < h.first.size(); ++i) {
                h.first[i] -= c * b.first[i];
                h.second[i] -= c * b.second[i];
            }
        }
    }
}

TwoField random_bump_field(const UniformGrid& grid, std::mt19937_64& rng, double c_lo, double c_hi, double w_lo,
                           double w_hi) {
    std::uniform_real_distribution<double> center(c_lo, c_hi);
    std::uniform_real_distribution<double> width(w_lo, w_hi);
    std::normal_distribution<double> amplitude(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 3);
    TwoField f = TwoField::zeros(grid);
    for (std::vector<double>* comp : {&f.first, &f.second}) {
        const int bumps = count(rng);
        for (int b = 0; b < bumps; ++b) {
            const double c = center(rng);
            const double w = width(rng);
            const double A = amplitude(rng);
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double z = (grid.x(i) - c) / w;
                (*comp)[i] += A * std::exp(-0.5 * z * z);
            }
        }
    }
    return f;
}

CoercivityReport sample_coercivity(const MultikinkAnsatz& ansatz, double t, const UniformGrid& grid,
                                   std::size_t count, std::uint64_t seed, bool single_kink, double rho) {
    const std::size_t K = ansatz.kinks();
    if (K == 0) throw ArgumentError("sample_coercivity: needs at least one kink");
    if (single_kink && K != 1) throw ArgumentError("sample_coercivity: single-kink form needs K = 1");
    if (!single_kink && rho <= 0.0) rho = default_rho(ansatz.params());

    std::vector<TwoField> modes;
    double c_lo = grid.x_max();
    double c_hi = grid.x_min;
    for (std::size_t k = 0; k < K; ++k) {
        ModePair mp = zero_modes(ansatz, k, t, grid);
        modes.push_back(std::move(mp.psi0));
        modes.push_back(std::move(mp.psi1));
        const double c = ansatz.params().velocities[k] * t + ansatz.params().shifts[k];
        c_lo = std::min(c_lo, c);
        c_hi = std::max(c_hi, c);
    }
    c_lo = std::max(c_lo - 8.0, grid.x_min + 5.0);
    c_hi = std::min(c_hi + 8.0, grid.x_max() - 5.0);

    std::mt19937_64 rng(seed);
    CoercivityReport report;
    report.samples = count;
    report.min_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < count; ++s) {
        TwoField h = random_bump_field(grid, rng, c_lo, c_hi);
        remove_projections(h, modes);
        const double norm = energy_norm_sq(h);
        for (const TwoField& m : modes) {
            report.max_projection_residual =
                std::max(report.max_projection_residual, std::abs(project(h, m)) / std::sqrt(norm * project(m, m)));
        }
        const double q = single_kink ? quad_form_single(ansatz, 0, t, h) : quad_form_Q(ansatz, t, h, rho);
        const double ratio = q / norm;
        report.min_ratio = std::min(report.min_ratio, ratio);
        report.max_ratio = std::max(report.max_ratio, ratio);
        if (q > 0.0) ++report.positive;
    }
    return report;
}

}  // namespace mk
