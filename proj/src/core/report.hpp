#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/assembly.hpp"
#include "core/spectral_solver.hpp"

namespace neq {

enum class SolverKind { direct, split, iterative };

SolverKind solver_kind_from_name(const std::string& name);
std::string solver_kind_name(SolverKind kind);

/// Effective configuration of one end-to-end run. Everything that affects
/// the computed numbers lives here; output paths are handled by callers so
/// identical configurations always produce identical report payloads.
struct RunConfig {
  ProblemSpec problem;
  int32_t ranks = 1;
  int32_t threads = 1;
  bool deterministic_reduction = false;
  SolverKind solver = SolverKind::direct;
  double threshold = 0.0;
  double tolerance = 1e-4;
  int32_t prefetch_distance = 16;
  std::string dump_matrix_prefix;  // empty disables per-rank triplet dumps
};

struct RunOutcome {
  nlohmann::json report;  // canonical payload, keys sorted
  std::vector<double> solution;
  std::vector<double> predicted;
  std::optional<Spectrum> spectrum;  // present for the spectral solver paths
};

/// Executes the full pipeline: distributed build, gather, solve, predicted
/// values, report. Deterministic for a fixed configuration apart from the
/// "phases" timing section.
RunOutcome run(const RunConfig& config);

/// Per-element percentage difference statistics in the reporting style used
/// throughout: |a-b| / max(|a|, floor_guard) * 100, with elements whose
/// magnitudes both sit below the guard reported as 0% and counted as tiny.
inline constexpr double kDifferenceFloorGuard = 1e-30;

struct FamilyStats {
  int64_t count = 0;
  double min_pct = 0.0;
  double max_pct = 0.0;
  double mean_pct = 0.0;
  int64_t tiny_count = 0;
};

FamilyStats difference_stats(std::span<const double> baseline, std::span<const double> candidate);

/// Difference table between two run reports, covering the solution
/// coefficients and the predicted values.
nlohmann::json compare_reports(const nlohmann::json& baseline, const nlohmann::json& candidate);

std::string difference_table_csv(const nlohmann::json& table);

/// Merges per-rank triplet dump files into one dense matrix rendered as CSV.
std::string gather_dumps_csv(const std::vector<std::string>& paths);

}  // namespace neq
