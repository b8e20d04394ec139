#pragma once

#include "multikink_tools/config.hpp"

#include <string>
#include <vector>

namespace mkt {

/// Each command writes into config.output.directory and returns the files it wrote.
std::vector<std::string> cmd_kink(const ExperimentConfig& config);
std::vector<std::string> cmd_multikink(const ExperimentConfig& config);
std::vector<std::string> cmd_evolve(const ExperimentConfig& config);
std::vector<std::string> cmd_construct(const ExperimentConfig& config);
std::vector<std::string> cmd_boost(const ExperimentConfig& config);
std::vector<std::string> cmd_verify(const ExperimentConfig& config);
std::vector<std::string> cmd_spectrum(const ExperimentConfig& config);

/// Window [w0, w1] inside which both tails of the profile are fitted.
[[nodiscard]] std::pair<double, double> tail_window(const mk::KinkProfile& profile);

}  // namespace mkt
