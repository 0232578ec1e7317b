#include "core/report.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/iterative_solver.hpp"
#include "core/rank_net.hpp"

namespace neq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fnv1a64_hex(std::span<const double> values) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

nlohmann::json config_json(const RunConfig& c) {
  return {
      {"n", c.problem.n},
      {"data", c.problem.data_count},
      {"seed", c.problem.seed},
      {"weight_scale", c.problem.weight_scale},
      {"ranks", c.ranks},
      {"threads", c.threads},
      {"deterministic_reduction", c.deterministic_reduction},
      {"solver", solver_kind_name(c.solver)},
      {"threshold", c.threshold},
      {"tol", c.tolerance},
      {"prefetch_distance", c.prefetch_distance},
  };
}

std::vector<double> predicted_values(const ProblemSpec& spec, std::span<const double> x) {
  std::vector<double> out(static_cast<size_t>(spec.data_count), 0.0);
  ProblemGenerator gen(spec);
  for (int64_t d = 0; d < spec.data_count; ++d) {
    gen.load(d);
    out[d] = dot(gen.design_row(), x);
  }
  return out;
}

}  // namespace

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "direct") return SolverKind::direct;
  if (name == "split") return SolverKind::split;
  if (name == "iterative") return SolverKind::iterative;
  fail(Errc::usage, "unknown solver '" + name + "' (expected direct, split or iterative)");
}

std::string solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::direct: return "direct";
    case SolverKind::split: return "split";
    case SolverKind::iterative: return "iterative";
  }
  fail(Errc::usage, "unknown solver kind");
}

RunOutcome run(const RunConfig& config) {
  config.problem.validate();
  if (config.prefetch_distance < 0) fail(Errc::invalid_config, "prefetch distance must be non-negative");
  if (config.threshold < 0.0) fail(Errc::invalid_config, "threshold must be non-negative");

  AssembleOptions options;
  options.ranks = config.ranks;
  options.threads_per_rank = config.threads;
  options.deterministic_reduction = config.deterministic_reduction;
  const AssembleResult assembled = assemble(config.problem, options);

  if (!config.dump_matrix_prefix.empty()) {
    for (int32_t me = 0; me < assembled.partition.ranks; ++me) {
      write_block_triplets(assembled.blocks[me],
                           config.dump_matrix_prefix + ".rank" + std::to_string(me) + ".trp");
    }
  }

  const DenseMatrix a = gather_matrix(assembled.blocks);
  const std::vector<double> b = gather_rhs(assembled.blocks);

  RunOutcome outcome;
  nlohmann::json solver_result;
  const auto solve_start = Clock::now();
  if (config.solver == SolverKind::iterative) {
    IterativeConfig icfg;
    icfg.rel_tolerance = config.tolerance;
    const IterativeResult r = solve_iterative(a, b, icfg);
    outcome.solution = r.x;
    solver_result = {
        {"type", "iterative"},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"residual", r.final_residual},
    };
  } else {
    SolverConfig scfg;
    scfg.threshold = config.threshold;
    scfg.mode = config.solver == SolverKind::split ? SpectralMode::split : SpectralMode::full;
    Spectrum spectrum = eigendecompose(a);
    outcome.solution = config.solver == SolverKind::split ? solve_split(a, b, scfg)
                                                          : apply_eigenpairs(spectrum, b, scfg);
    int64_t retained = 0;
    for (double lambda : spectrum.eigenvalues) {
      if (std::fabs(lambda) > scfg.threshold) ++retained;
    }
    solver_result = {
        {"type", solver_kind_name(config.solver)},
        {"converged", true},
        {"retained_pairs", retained},
        {"residual", relative_residual(a, outcome.solution, b)},
    };
    outcome.spectrum = std::move(spectrum);
  }
  const double solve_seconds = seconds_since(solve_start);

  outcome.predicted = predicted_values(config.problem, outcome.solution);

  outcome.report = {
      {"schema", "normeq-run-report-v1"},
      {"config", config_json(config)},
      {"phases",
       {
           {"build_seconds", assembled.build_seconds},
           {"exchange_seconds", assembled.exchange_seconds},
           {"solve_seconds", solve_seconds},
       }},
      {"exchange", {{"triplets", assembled.triplets_exchanged}}},
      {"solver_result", solver_result},
      {"solution", outcome.solution},
      {"predicted", outcome.predicted},
      {"solution_digest",
       {
           {"fnv1a64", fnv1a64_hex(outcome.solution)},
           {"l2_norm", norm2(outcome.solution)},
       }},
  };
  return outcome;
}

FamilyStats difference_stats(std::span<const double> baseline, std::span<const double> candidate) {
  if (baseline.size() != candidate.size()) {
    fail(Errc::usage, "difference table inputs have mismatched lengths (" +
                          std::to_string(baseline.size()) + " vs " + std::to_string(candidate.size()) + ")");
  }
  FamilyStats stats;
  stats.count = static_cast<int64_t>(baseline.size());
  if (baseline.empty()) return stats;

  double pct_min = std::numeric_limits<double>::infinity();
  double pct_max = 0.0;
  double pct_sum = 0.0;
  for (size_t i = 0; i < baseline.size(); ++i) {
    const double fa = std::fabs(baseline[i]);
    const double fb = std::fabs(candidate[i]);
    double pct = 0.0;
    if (fa < kDifferenceFloorGuard && fb < kDifferenceFloorGuard) {
      ++stats.tiny_count;
    } else {
      pct = std::fabs(baseline[i] - candidate[i]) / std::max(fa, kDifferenceFloorGuard) * 100.0;
    }
    pct_min = std::min(pct_min, pct);
    pct_max = std::max(pct_max, pct);
    pct_sum += pct;
  }
  stats.min_pct = pct_min;
  stats.max_pct = pct_max;
  stats.mean_pct = pct_sum / static_cast<double>(baseline.size());
  return stats;
}

namespace {

nlohmann::json stats_json(const FamilyStats& s) {
  return {
      {"count", s.count},      {"min_pct", s.min_pct},        {"max_pct", s.max_pct},
      {"mean_pct", s.mean_pct}, {"tiny_count", s.tiny_count},
  };
}

std::vector<double> json_vector(const nlohmann::json& report, const char* key) {
  if (!report.contains(key) || !report[key].is_array()) {
    fail(Errc::usage, std::string("report is missing the '") + key + "' array");
  }
  return report[key].get<std::vector<double>>();
}

}  // namespace

nlohmann::json compare_reports(const nlohmann::json& baseline, const nlohmann::json& candidate) {
  const auto dim = [](const nlohmann::json& r) -> int64_t {
    if (!r.contains("config") || !r["config"].contains("n")) {
      fail(Errc::usage, "report has no config.n entry");
    }
    return r["config"]["n"].get<int64_t>();
  };
  if (dim(baseline) != dim(candidate)) {
    fail(Errc::usage, "reports have different dimensions (" + std::to_string(dim(baseline)) + " vs " +
                          std::to_string(dim(candidate)) + ")");
  }

  const FamilyStats coefficients =
      difference_stats(json_vector(baseline, "solution"), json_vector(candidate, "solution"));
  const FamilyStats predicted =
      difference_stats(json_vector(baseline, "predicted"), json_vector(candidate, "predicted"));

  return {
      {"schema", "normeq-diff-table-v1"},
      {"floor_guard", kDifferenceFloorGuard},
      {"families",
       {
           {"coefficients", stats_json(coefficients)},
           {"predicted", stats_json(predicted)},
       }},
  };
}

std::string difference_table_csv(const nlohmann::json& table) {
  if (!table.contains("families")) fail(Errc::usage, "not a difference table");
  std::ostringstream out;
  out.precision(17);
  out << "family,count,min_pct,max_pct,mean_pct,tiny_count\n";
  for (const auto& [name, s] : table["families"].items()) {
    out << name << ',' << s["count"].get<int64_t>() << ',' << s["min_pct"].get<double>() << ','
        << s["max_pct"].get<double>() << ',' << s["mean_pct"].get<double>() << ','
        << s["tiny_count"].get<int64_t>() << '\n';
  }
  return out.str();
}

std::string gather_dumps_csv(const std::vector<std::string>& paths) {
  if (paths.empty()) fail(Errc::usage, "no dump files given");

  std::vector<Triplet> cells;
  for (const std::string& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto decoded = unpack(std::as_bytes(std::span<const char>(raw)));
    cells.insert(cells.end(), decoded.begin(), decoded.end());
  }

  int32_t n = 0;
  for (const Triplet& t : cells) {
    if (t.global_row < 0 || t.global_col < 0) fail(Errc::protocol, "negative index in dump");
    n = std::max({n, t.global_row + 1, t.global_col + 1});
  }
  if (static_cast<int64_t>(cells.size()) != static_cast<int64_t>(n) * n) {
    fail(Errc::protocol, "dumps hold " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(static_cast<int64_t>(n) * n) + " for n=" + std::to_string(n));
  }

  DenseMatrix a(n, n);
  std::vector<uint8_t> seen(static_cast<size_t>(n) * n, 0);
  for (const Triplet& t : cells) {
    uint8_t& flag = seen[static_cast<size_t>(t.global_row) * n + t.global_col];
    if (flag) {
      fail(Errc::protocol, "cell (" + std::to_string(t.global_row) + ", " + std::to_string(t.global_col) +
                               ") appears in more than one dump");
    }
    flag = 1;
    a(t.global_row, t.global_col) = t.value;
  }

  std::ostringstream out;
  out.precision(17);
  for (int32_t i = 0; i < n; ++i) {
    for (int32_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << a(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace neq
