#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvi/config.hpp"
#include "mvi/dividend.hpp"
#include "mvi/fokker_planck.hpp"
#include "mvi/impulse.hpp"
#include "mvi/qvi.hpp"

namespace mvi {

inline constexpr const char* kVersion = "0.1.0";

// 12-significant-digit rendering; every numeric output funnels through this
// so the same value prints identically wherever it appears.
std::string fmt12(double v);

// JSON is assembled by hand: outputs are small and flat, and the digit count
// stays under fmt12's control. Non-finite values render as null. Keys are
// emitted in a fixed order so byte comparison across runs is meaningful.
std::string json_solution(const DividendSolution& sol, double condition_vi_margin);
std::string json_summary(const PerformanceEstimate& est, const SimConfig& sim,
                         const std::string& policy_spec,
                         std::optional<double> phi_value = std::nullopt);
std::string json_residual(const ResidualStats& stats);
std::string json_qvi_report(const QviReport& rep);

struct RunManifest {
    std::string command;  // subcommand plus significant flags
    RunConfig config;     // effective config, seed overrides applied
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;  // informational; excluded from replay comparison
};
std::string json_manifest(const RunManifest& man);

// CSV tables: header row, '\n' endings, numbers through fmt12.
std::string csv_phi_table(const DividendSolution& sol, std::size_t n, double u_max);
std::string csv_events(const std::vector<std::vector<InterventionEvent>>& per_path);
std::string csv_qvi_grid(const QviReport& rep);
std::string csv_mean_paths(std::span<const Trajectory> trajectories, const ModelParams& p,
                           double x0);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace mvi
