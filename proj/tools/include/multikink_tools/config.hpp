#pragma once

#include <multikink/construct.hpp>
#include <multikink/kink.hpp>
#include <multikink/potential.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mkt {

struct PotentialSection {
    std::string kind = "phi4";
    std::vector<double> coeffs;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    std::optional<std::pair<double, double>> search_interval;
};

struct ChainSection {
    std::vector<int> labels;
    std::vector<double> velocities;
    std::vector<double> shifts;
};

struct GridSection {
    double x_min = 0.0;  // x_min == x_max: sized from the kink trajectories
    double x_max = 0.0;
    double dx = 0.05;
    double dt = 0.04;
    double t0 = 0.0;
    double t_end = 10.0;
    std::size_t snapshot_every = 0;
    double profile_dx = 0.01;
    double half_width = 0.0;
};

struct ConstructSection {
    double T = 0.0;
    double delta = 0.0;
    double tol = 1e-9;
    std::size_t max_iter = 60;
    double T_final = 0.0;
    double n0_threshold = 1e-3;
};

struct BoostSection {
    double v = 0.0;
    double t0 = 0.0;
    double x0 = 0.0;
    double window = 5.0;
    double t_prime = 0.0;
};

struct SpectrumSection {
    int n = 0;
    int n_prime = 1;
    std::size_t modes = 4;
    double half_width = 20.0;
    double dx = 0.01;
};

struct VerifySection {
    std::size_t coercivity_samples = 100;
    double drift_t_end = 10.0;
    double drift_dx = 0.01;
    double drift_dt = 0.009;
};

struct OutputSection {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
};

/// Parsed experiment file; optional sections are present only when the file has them.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    PotentialSection potential;
    std::optional<ChainSection> chain;
    GridSection grid;
    std::optional<ConstructSection> construct;
    std::optional<BoostSection> boost;
    SpectrumSection spectrum;
    VerifySection verify;
    OutputSection output;

    [[nodiscard]] bool wants(const std::string& format) const;
};

/// Reads an INI experiment file. Throws mk::ConfigError naming the line, section
/// or key at fault.
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);

[[nodiscard]] nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Throws mk::ConfigError when `section` is missing.
const ChainSection& require_chain(const ExperimentConfig& config);
const ConstructSection& require_construct(const ExperimentConfig& config);
const BoostSection& require_boost(const ExperimentConfig& config);

[[nodiscard]] mk::Potential make_potential(const PotentialSection& section);
[[nodiscard]] std::pair<double, double> search_interval(const mk::Potential& model, const PotentialSection& section);
[[nodiscard]] mk::ProfileOptions profile_options(const ExperimentConfig& config);
[[nodiscard]] mk::ConstructConfig construct_config(const ExperimentConfig& config);

}  // namespace mkt
