#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mvi/model.hpp"

namespace mvi {

// Simulation sizing shared by every subcommand.
struct SimConfig {
    std::size_t n_particles = 1;
    std::size_t n_paths = 1;
    double dt = 0.0;
    double horizon = 0.0;
    double x0 = 0.0;
    std::uint64_t seed = 0;
};

// Throws InvalidParam whose message names every violated bound.
void validate_sim(const SimConfig& sim);

struct RunConfig {
    ModelParams model;
    SimConfig sim;
};

// Key-value config, one `key = value` per line, '#' starts a comment. Exactly
// the fourteen known keys, each once; anything else is a ConfigError naming
// the offending or missing key. Model parameters are range-checked here too.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

// Canonical round-trippable rendering of a config (12 significant digits),
// embedded in the run manifest so a run can be replayed from it.
std::string config_text(const RunConfig& cfg);

} // namespace mvi
