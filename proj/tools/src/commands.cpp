#include "multikink_tools/commands.hpp"

#include <multikink/ansatz.hpp>
#include <multikink/construct.hpp>
#include <multikink/errors.hpp>
#include <multikink/evolve.hpp>
#include <multikink/lorentz.hpp>
#include <multikink/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>

namespace mkt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Model {
    mk::Potential W;
    mk::VacuumTable table;
};

Model load_model(const ExperimentConfig& config) {
    mk::Potential W = make_potential(config.potential);
    mk::VacuumTable table = mk::find_vacua(W, search_interval(W, config.potential));
    if (table.size() == 0) throw mk::ConfigError("config [potential]: no vacua inside the search interval");
    return {std::move(W), std::move(table)};
}

mk::MultikinkAnsatz load_ansatz(const ExperimentConfig& config, const Model& m) {
    const ChainSection& c = require_chain(config);
    mk::ChainOfVacua chain = mk::validate_chain(m.table, c.labels);
    return mk::MultikinkAnsatz(m.W, m.table, mk::MultikinkParams::make(chain, c.velocities, c.shifts),
                               profile_options(config));
}

fs::path out_dir(const ExperimentConfig& config) {
    fs::path dir(config.output.directory);
    fs::create_directories(dir);
    return dir;
}

std::string write_json(const ExperimentConfig& config, const fs::path& path, const std::string& command,
                       json result) {
    json doc;
    doc["version"] = MULTIKINK_VERSION;
    doc["command"] = command;
    doc["config"] = to_json(config);
    doc["result"] = std::move(result);
    std::ofstream out(path);
    if (!out) throw mk::ArgumentError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    return path.string();
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw mk::ArgumentError("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

json params_json(const mk::MultikinkParams& p) {
    return {{"labels", p.chain.labels}, {"velocities", p.velocities}, {"shifts", p.shifts}, {"gammas", p.gammas}};
}

json plan_json(const mk::ConstructPlan& p) {
    return {{"T", p.T},           {"delta", p.delta}, {"eta", p.eta},     {"T_final", p.T_final},
            {"dt", p.dt},         {"levels", p.levels}, {"x_min", p.grid.x_min}, {"x_max", p.grid.x_max()},
            {"dx", p.grid.dx},    {"n0_at_T", p.n0_at_T}};
}

json report_json(const mk::ConstructReport& r) {
    return {{"iterations", r.iterations},
            {"converged", r.converged},
            {"iterate_norms", r.iterate_norms},
            {"contraction_ratio", r.contraction_ratio},
            {"final_residual", r.final_residual},
            {"fitted_decay_rate", r.fitted_decay_rate},
            {"decay_fit_r_squared", r.decay_fit_r_squared},
            {"psi_weighted_norm", r.psi_weighted_norm},
            {"plan", plan_json(r.plan)}};
}

// Grid over the kink trajectories on [t_a, t_b] with a tail margin.
mk::UniformGrid trajectory_grid(const ExperimentConfig& config, const mk::MultikinkAnsatz& ansatz, double t_a,
                                double t_b) {
    if (config.grid.x_min < config.grid.x_max) {
        return mk::UniformGrid::covering(config.grid.x_min, config.grid.x_max, config.grid.dx);
    }
    const double margin = 15.0 / ansatz.min_mass();
    double lo = 0.0;
    double hi = 0.0;
    const auto& p = ansatz.params();
    for (std::size_t k = 0; k < p.kinks(); ++k) {
        for (double t : {t_a, t_b}) {
            const double c = p.velocities[k] * t + p.shifts[k];
            if (k == 0 && t == t_a) lo = hi = c;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return mk::UniformGrid::covering(lo - margin, hi + margin, config.grid.dx);
}

mk::EvolveConfig evolve_config(const ExperimentConfig& config, const mk::UniformGrid& grid, double t_end) {
    mk::EvolveConfig e;
    e.dx = grid.dx;
    e.dt = config.grid.dt;
    e.x_min = grid.x_min;
    e.x_max = grid.x_max();
    e.t_end = t_end;
    e.snapshot_every = config.grid.snapshot_every;
    return e;
}

}  // namespace

std::pair<double, double> tail_window(const mk::KinkProfile& profile) {
    const double m_left = profile.left_tail().mass;
    const double m_right = profile.right_tail().mass;
    const double w0 = 6.0 / std::min(m_left, m_right);
    double w1 = std::min(20.0 / std::max(m_left, m_right), 0.95 * profile.half_width());
    if (w1 < w0 + 1.0) w1 = std::min(w0 + 2.0, profile.half_width());
    return {w0, w1};
}

std::vector<std::string> cmd_kink(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const fs::path dir = out_dir(config);
    std::vector<std::pair<int, int>> pairs;
    if (config.chain) {
        const mk::ChainOfVacua chain = mk::validate_chain(m.table, config.chain->labels);
        std::set<std::pair<int, int>> seen;
        for (std::size_t k = 0; k + 1 < chain.labels.size(); ++k) {
            const std::pair<int, int> p{chain.labels[k], chain.labels[k + 1]};
            if (seen.insert(p).second) pairs.push_back(p);
        }
    } else {
        for (std::size_t n = 0; n + 1 < m.table.size(); ++n) pairs.emplace_back(static_cast<int>(n), static_cast<int>(n) + 1);
    }
    if (pairs.empty()) throw mk::ConfigError("kink: the vacuum table has fewer than two vacua");

    std::vector<std::string> files;
    json tails = json::array();
    json energies = json::array();
    for (const auto& [n, n_prime] : pairs) {
        const mk::KinkProfile profile = mk::kink_profile(m.W, m.table, n, n_prime, profile_options(config));
        const fs::path csv = dir / ("profile_" + std::to_string(n) + "_" + std::to_string(n_prime) + ".csv");
        mk::write_profile_csv(profile, csv.string());
        files.push_back(csv.string());
        const auto window = tail_window(profile);
        const auto [left, right] = mk::fit_tails(profile, window);
        tails.push_back({{"n", n},
                         {"n_prime", n_prime},
                         {"window", {window.first, window.second}},
                         {"left", {{"fitted_rate", left.fitted_rate}, {"expected_rate", left.expected_rate},
                                   {"fit_residual", left.fit_residual}}},
                         {"right", {{"fitted_rate", right.fitted_rate}, {"expected_rate", right.expected_rate},
                                    {"fit_residual", right.fit_residual}}}});
        energies.push_back({{"n", n},
                            {"n_prime", n_prime},
                            {"energy", mk::kink_energy(m.W, m.table, n, n_prime)},
                            {"profile_energy", mk::profile_potential_energy(profile)},
                            {"center_value", profile.value(0.0)}});
    }
    json vacua = {{"vacua", m.table.vacua}, {"masses", m.table.masses}};
    files.push_back(write_json(config, dir / "tails.json", "kink", {{"table", vacua}, {"kinks", tails}}));
    files.push_back(write_json(config, dir / "energy.json", "kink", {{"table", vacua}, {"kinks", energies}}));
    return files;
}

std::vector<std::string> cmd_multikink(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const mk::MultikinkAnsatz ansatz = load_ansatz(config, m);
    const fs::path dir = out_dir(config);
    const double t = config.grid.t0;
    const mk::UniformGrid grid = trajectory_grid(config, ansatz, t, t);
    const mk::FieldState H = mk::multikink(ansatz, t, grid);
    const auto V = mk::potential_V(ansatz, t, grid);

    std::vector<std::string> files;
    if (config.wants("csv")) {
        const fs::path csv = dir / "multikink.csv";
        auto out = open_csv(csv);
        out << "x,H,H_t,V\n";
        for (std::size_t i = 0; i < grid.n; ++i) out << grid.x(i) << ',' << H.phi[i] << ',' << H.phi_dot[i] << ',' << V[i] << '\n';
        files.push_back(csv.string());
    }
    const auto sector = mk::detect_sector(H, m.table, 1e-6);
    const mk::Energies e = mk::energy(H, m.W);
    files.push_back(write_json(config, dir / "multikink.json", "multikink",
                               {{"t", t},
                                {"params", params_json(ansatz.params())},
                                {"sector", {sector.first, sector.second}},
                                {"energy", {{"E", e.total}, {"E_p", e.potential}, {"E_k", e.kinetic}}}}));
    return files;
}

std::vector<std::string> cmd_evolve(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const mk::MultikinkAnsatz ansatz = load_ansatz(config, m);
    const fs::path dir = out_dir(config);
    const mk::UniformGrid grid = trajectory_grid(config, ansatz, config.grid.t0, config.grid.t_end);
    const mk::FieldState initial = mk::multikink(ansatz, config.grid.t0, grid);
    const mk::SpaceTimeSlab slab = mk::evolve_nonlinear(initial, m.W, evolve_config(config, grid, config.grid.t_end));

    std::vector<std::string> files;
    if (config.wants("csv")) {
        mk::write_slab(slab, (dir / "evolve").string());
        files.push_back((dir / "evolve" / "snapshot_manifest.csv").string());
    }
    const fs::path energy_csv = dir / "energy.csv";
    auto out = open_csv(energy_csv);
    out << "t,E,E_p,E_k,gamma_margin\n";
    const double E0 = mk::scheme_energy(slab.snapshots.front(), m.W).total;
    double drift = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool sectors_stable = true;
    const auto sector0 = mk::detect_sector(slab.snapshots.front(), m.table, 1e-6);
    for (const mk::FieldState& s : slab.snapshots) {
        const mk::Energies e = mk::energy(s, m.W);
        const mk::GammaCheck g = mk::gamma_inequality(s, m.W);
        drift = std::max(drift, std::abs(mk::scheme_energy(s, m.W).total - E0));
        worst_margin = std::min(worst_margin, g.min_margin);
        sectors_stable = sectors_stable && mk::detect_sector(s, m.table, 1e-6) == sector0;
        out << s.t << ',' << e.total << ',' << e.potential << ',' << e.kinetic << ',' << g.min_margin << '\n';
    }
    files.push_back(energy_csv.string());
    files.push_back(write_json(config, dir / "evolve.json", "evolve",
                               {{"params", params_json(ansatz.params())},
                                {"snapshots", slab.snapshots.size()},
                                {"dt_snapshot", slab.dt_snapshot},
                                {"initial_energy", E0},
                                {"max_energy_drift", drift},
                                {"sector", {sector0.first, sector0.second}},
                                {"sector_stable", sectors_stable},
                                {"min_gamma_margin", worst_margin}}));
    return files;
}

std::vector<std::string> cmd_construct(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const mk::MultikinkAnsatz ansatz = load_ansatz(config, m);
    const mk::ConstructConfig cc = construct_config(config);
    const fs::path dir = out_dir(config);
    const mk::ConstructionProblem problem(ansatz, cc);
    mk::ConstructResult result = mk::fixed_point(problem, cc.tol, cc.max_iter);

    std::vector<std::string> files;
    if (config.wants("csv")) {
        const std::size_t stride =
            config.grid.snapshot_every > 0
                ? config.grid.snapshot_every
                : static_cast<std::size_t>(std::max(1.0, std::round(0.5 / problem.plan().dt)));
        mk::SpaceTimeSlab thin;
        thin.dt_snapshot = problem.plan().dt * static_cast<double>(stride);
        for (std::size_t l = 0; l < result.psi.snapshots.size(); l += stride) thin.snapshots.push_back(result.psi.snapshots[l]);
        mk::write_slab(thin, (dir / "psi").string(), "psi");
        files.push_back((dir / "psi" / "psi_manifest.csv").string());

        const fs::path decay = dir / "decay.csv";
        auto out = open_csv(decay);
        out << "t,energy_norm\n";
        for (std::size_t i = 0; i < result.report.decay_times.size(); ++i) {
            out << result.report.decay_times[i] << ',' << result.report.decay_norms[i] << '\n';
        }
        files.push_back(decay.string());
    }
    json r = report_json(result.report);
    r["params"] = params_json(ansatz.params());
    files.push_back(write_json(config, dir / "report.json", "construct", std::move(r)));
    return files;
}

std::vector<std::string> cmd_boost(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const mk::MultikinkAnsatz ansatz = load_ansatz(config, m);
    const BoostSection& b = require_boost(config);
    const mk::BoostSpec boost = mk::BoostSpec::make(b.v, b.t0, b.x0);
    const mk::MultikinkParams primed = mk::boost_params(ansatz.params(), boost);
    const mk::MultikinkAnsatz primed_ansatz = ansatz.with_params(primed);
    const fs::path dir = out_dir(config);

    // Boost the exact ansatz slab and compare with the ansatz at the boosted parameters.
    const double tp = b.t_prime;
    const mk::UniformGrid grid_p = trajectory_grid(config, primed_ansatz, tp, tp);
    auto corner = [&](double x) { return boost.pull_back(tp, x); };
    const auto [ta, xa] = corner(grid_p.x_min);
    const auto [tb, xb] = corner(grid_p.x_max());
    const double dt = config.grid.dt;
    const double pad = 4.0 * dt;
    const mk::UniformGrid grid =
        mk::UniformGrid::covering(std::min(xa, xb) - 1.0, std::max(xa, xb) + 1.0, config.grid.dx);
    mk::SpaceTimeSlab slab;
    slab.dt_snapshot = dt;
    const double t_lo = std::min(ta, tb) - pad;
    const auto levels = static_cast<std::size_t>(std::ceil((std::max(ta, tb) + pad - t_lo) / dt)) + 1;
    for (std::size_t l = 0; l < levels; ++l) slab.snapshots.push_back(mk::multikink(ansatz, t_lo + dt * l, grid));
    const mk::FieldState boosted = mk::boost_field(slab, boost, tp, grid_p);
    const mk::FieldState direct = mk::multikink(primed_ansatz, tp, grid_p);
    double diff = 0.0;
    for (std::size_t i = 0; i < grid_p.n; ++i) diff = std::max(diff, std::abs(boosted.phi[i] - direct.phi[i]));

    std::vector<std::string> files;
    if (config.wants("csv")) {
        const fs::path csv = dir / "boosted.csv";
        auto out = open_csv(csv);
        out << "x,phi,phi_t,H_boosted_params\n";
        for (std::size_t i = 0; i < grid_p.n; ++i) {
            out << grid_p.x(i) << ',' << boosted.phi[i] << ',' << boosted.phi_dot[i] << ',' << direct.phi[i] << '\n';
        }
        files.push_back(csv.string());
    }
    files.push_back(write_json(config, dir / "boosted.json", "boost",
                               {{"boost", {{"v", boost.v}, {"t0", boost.t0}, {"x0", boost.x0}, {"gamma", boost.gamma()}}},
                                {"original", params_json(ansatz.params())},
                                {"boosted", params_json(primed)},
                                {"t_prime", tp},
                                {"ansatz_discrepancy", diff}}));
    return files;
}

std::vector<std::string> cmd_verify(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const mk::MultikinkAnsatz ansatz = load_ansatz(config, m);
    const BoostSection& b = require_boost(config);
    const mk::ConstructConfig cc = construct_config(config);
    const fs::path dir = out_dir(config);
    json result;

    const mk::CovarianceReport cov = mk::verify_covariance(ansatz, mk::BoostSpec::make(b.v, b.t0, b.x0), cc, b.window);
    result["covariance"] = {{"discrepancy", cov.discrepancy},
                            {"rate_discrepancy", cov.rate_discrepancy},
                            {"worst", {cov.worst_t, cov.worst_x}},
                            {"window", {{"t", {cov.t_lo, cov.t_hi}}, {"x", {cov.x_lo, cov.x_hi}}}},
                            {"boosted", params_json(cov.boosted)},
                            {"original_contraction_ratio", cov.original.contraction_ratio},
                            {"primed_contraction_ratio", cov.primed.contraction_ratio}};

    // Energy drift of the nonlinear evolution started from the ansatz.
    const double T = cov.original.plan.T;
    {
        const mk::UniformGrid grid = trajectory_grid(config, ansatz, T, T + config.grid.t_end);
        const mk::SpaceTimeSlab slab = mk::evolve_nonlinear(mk::multikink(ansatz, T, grid), m.W,
                                                            evolve_config(config, grid, T + config.grid.t_end));
        const double E0 = mk::scheme_energy(slab.snapshots.front(), m.W).total;
        double drift = 0.0;
        bool gamma_ok = true;
        for (const auto& s : slab.snapshots) {
            drift = std::max(drift, std::abs(mk::scheme_energy(s, m.W).total - E0));
            gamma_ok = gamma_ok && mk::gamma_inequality(s, m.W).holds(1e-10);
        }
        result["energy"] = {{"initial", E0}, {"max_drift", drift}, {"relative_drift", drift / E0},
                            {"gamma_inequality", gamma_ok}};
    }

    // Zero-mode pairings along the linearized flow from a seeded random perturbation.
    {
        mk::EvolveConfig ec;
        const mk::UniformGrid g0 = trajectory_grid(config, ansatz, T, T + config.verify.drift_t_end);
        ec.dx = config.verify.drift_dx;
        ec.dt = config.verify.drift_dt;
        ec.x_min = g0.x_min;
        ec.x_max = g0.x_max();
        ec.t_end = T + config.verify.drift_t_end;
        ec.snapshot_every = static_cast<std::size_t>(std::max(1.0, std::round(0.5 / ec.dt)));
        const mk::UniformGrid grid = ec.grid();
        std::mt19937_64 rng(config.seed);
        mk::TwoField h = mk::random_bump_field(grid, rng, grid.x_min + 10.0, grid.x_max() - 10.0);
        const mk::ZeroModeSeries series = mk::zero_mode_drift(ansatz, h, T, ec);
        json modes = json::array();
        for (std::size_t k = 0; k < ansatz.kinks(); ++k) {
            const mk::LineFit f0 = mk::fit_line(series.times, series.psi0[k]);
            const mk::LineFit f1 = mk::fit_line(series.times, series.psi1[k]);
            double spread = 0.0;
            for (double v : series.psi0[k]) spread = std::max(spread, std::abs(v - series.psi0[k].front()));
            modes.push_back({{"k", k},
                             {"psi0_initial", series.psi0[k].front()},
                             {"psi0_max_change", spread},
                             {"psi0_slope", f0.slope},
                             {"psi1_slope", f1.slope},
                             {"gamma_inverse", 1.0 / ansatz.params().gammas[k]}});
        }
        result["zero_modes"] = {{"t", {series.times.front(), series.times.back()}}, {"modes", modes}};
    }

    // Coercivity of the projected quadratic form at the construction time.
    {
        const mk::UniformGrid grid = trajectory_grid(config, ansatz, T, T);
        const mk::CoercivityReport r = mk::sample_coercivity(ansatz, T, grid, config.verify.coercivity_samples,
                                                             config.seed, ansatz.kinks() == 1);
        result["coercivity"] = {{"t", T},
                                {"samples", r.samples},
                                {"positive", r.positive},
                                {"min_ratio", r.min_ratio},
                                {"max_ratio", r.max_ratio},
                                {"max_projection_residual", r.max_projection_residual}};
    }
    return {write_json(config, dir / "verify.json", "verify", std::move(result))};
}

std::vector<std::string> cmd_spectrum(const ExperimentConfig& config) {
    const Model m = load_model(config);
    const SpectrumSection& s = config.spectrum;
    if (std::abs(s.n - s.n_prime) != 1) {
        throw mk::InvalidChainError("spectrum: vacua " + std::to_string(s.n) + " and " + std::to_string(s.n_prime) +
                                    " are not adjacent");
    }
    const fs::path dir = out_dir(config);
    const auto half = static_cast<std::size_t>(std::llround(s.half_width / s.dx));
    const mk::UniformGrid grid = mk::UniformGrid::symmetric(half, s.dx);
    const mk::OperatorDiscretization L = mk::build_L(m.W, m.table, s.n, s.n_prime, grid);
    const auto pairs = mk::low_spectrum(L, std::max<std::size_t>(2, s.modes));

    mk::ProfileOptions opts = profile_options(config);
    opts.half_width = std::max(opts.half_width, s.half_width);
    const mk::KinkProfile H = mk::kink_profile(m.W, m.table, s.n, s.n_prime, opts);
    std::vector<double> kernel(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) kernel[i] = H.jet(grid.x(i)).dh;
    double dot = 0.0;
    double kk = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        dot += kernel[i] * pairs[0].vector[i];
        kk += kernel[i] * kernel[i];
    }
    const mk::CoercivityEstimate coer = mk::coercivity_constant(L, kernel, kernel, 200, config.seed);

    std::vector<std::string> files;
    if (config.wants("csv")) {
        mk::write_eigenpairs(L, pairs, dir.string());
        files.push_back((dir / "eigenvalues.csv").string());
        files.push_back((dir / "eigenvectors.csv").string());
    }
    std::vector<double> values;
    for (const auto& p : pairs) values.push_back(p.value);
    const double edge = std::min(std::pow(m.table.mass(s.n), 2), std::pow(m.table.mass(s.n_prime), 2));
    files.push_back(write_json(config, dir / "spectrum.json", "spectrum",
                               {{"n", s.n},
                                {"n_prime", s.n_prime},
                                {"eigenvalues", values},
                                {"continuum_edge", edge},
                                {"kernel_cosine", std::abs(dot) / std::sqrt(kk)},
                                {"coercivity_lambda", coer.lambda}}));
    return files;
}

}  // namespace mkt
