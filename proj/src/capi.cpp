#include "normeq/normeq.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/gather_kernel.hpp"
#include "core/report.hpp"

struct normeq_opts {
  neq::RunConfig config;
};

struct normeq_run {
  neq::RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

normeq_status status_from(neq::Errc code) {
  switch (code) {
    case neq::Errc::invalid_config: return NORMEQ_ERR_CONFIG;
    case neq::Errc::index_range: return NORMEQ_ERR_INDEX;
    case neq::Errc::protocol: return NORMEQ_ERR_PROTOCOL;
    case neq::Errc::validation: return NORMEQ_ERR_VALIDATION;
    case neq::Errc::numeric: return NORMEQ_ERR_NUMERIC;
    case neq::Errc::rank_deficient: return NORMEQ_ERR_RANK_DEFICIENT;
    case neq::Errc::io: return NORMEQ_ERR_IO;
    case neq::Errc::usage: return NORMEQ_ERR_INVALID_ARGUMENT;
  }
  return NORMEQ_ERR_UNKNOWN;
}

template <typename Fn>
normeq_status guarded(Fn&& fn) {
  try {
    fn();
    return NORMEQ_OK;
  } catch (const neq::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return NORMEQ_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NORMEQ_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return NORMEQ_ERR_UNKNOWN;
  }
}

normeq_status invalid_argument(const char* what) {
  g_last_error = what;
  return NORMEQ_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* normeq_version(void) { return "1.0.0"; }

const char* normeq_status_name(int status) {
  switch (status) {
    case NORMEQ_OK: return "NORMEQ_OK";
    case NORMEQ_ERR_INVALID_ARGUMENT: return "NORMEQ_ERR_INVALID_ARGUMENT";
    case NORMEQ_ERR_CONFIG: return "NORMEQ_ERR_CONFIG";
    case NORMEQ_ERR_INDEX: return "NORMEQ_ERR_INDEX";
    case NORMEQ_ERR_PROTOCOL: return "NORMEQ_ERR_PROTOCOL";
    case NORMEQ_ERR_VALIDATION: return "NORMEQ_ERR_VALIDATION";
    case NORMEQ_ERR_NUMERIC: return "NORMEQ_ERR_NUMERIC";
    case NORMEQ_ERR_RANK_DEFICIENT: return "NORMEQ_ERR_RANK_DEFICIENT";
    case NORMEQ_ERR_IO: return "NORMEQ_ERR_IO";
    default: return "NORMEQ_ERR_UNKNOWN";
  }
}

const char* normeq_last_error(void) { return g_last_error.c_str(); }

void normeq_string_free(char* s) { delete[] s; }

normeq_status normeq_opts_create(normeq_opts** out) {
  if (!out) return invalid_argument("out pointer is null");
  return guarded([&] {
    auto* opts = new normeq_opts();
    opts->config.problem.data_count = 1000;
    opts->config.problem.seed = 1;
    *out = opts;
  });
}

void normeq_opts_destroy(normeq_opts* opts) { delete opts; }

normeq_status normeq_opts_set_dimension(normeq_opts* opts, int32_t n) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.problem.n = n;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_data_count(normeq_opts* opts, int64_t count) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.problem.data_count = count;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_seed(normeq_opts* opts, uint64_t seed) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.problem.seed = seed;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_weight_scale(normeq_opts* opts, double scale) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.problem.weight_scale = scale;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_ranks(normeq_opts* opts, int32_t ranks) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.ranks = ranks;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_threads(normeq_opts* opts, int32_t threads) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.threads = threads;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_deterministic_reduction(normeq_opts* opts, int enabled) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.deterministic_reduction = enabled != 0;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_solver(normeq_opts* opts, const char* solver) {
  if (!opts) return invalid_argument("opts is null");
  if (!solver) return invalid_argument("solver name is null");
  return guarded([&] { opts->config.solver = neq::solver_kind_from_name(solver); });
}

normeq_status normeq_opts_set_threshold(normeq_opts* opts, double threshold) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.threshold = threshold;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_tolerance(normeq_opts* opts, double tolerance) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.tolerance = tolerance;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_prefetch_distance(normeq_opts* opts, int32_t distance) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.prefetch_distance = distance;
  return NORMEQ_OK;
}

normeq_status normeq_opts_set_matrix_dump_prefix(normeq_opts* opts, const char* prefix) {
  if (!opts) return invalid_argument("opts is null");
  opts->config.dump_matrix_prefix = prefix ? prefix : "";
  return NORMEQ_OK;
}

normeq_status normeq_run_execute(const normeq_opts* opts, normeq_run** out_run) {
  if (!opts) return invalid_argument("opts is null");
  if (!out_run) return invalid_argument("out_run is null");
  return guarded([&] {
    auto* run = new normeq_run{neq::run(opts->config)};
    *out_run = run;
  });
}

void normeq_run_destroy(normeq_run* run) { delete run; }

int32_t normeq_run_dimension(const normeq_run* run) {
  return run ? static_cast<int32_t>(run->outcome.solution.size()) : 0;
}

normeq_status normeq_run_solution(const normeq_run* run, double* out, size_t capacity) {
  if (!run) return invalid_argument("run is null");
  if (!out) return invalid_argument("out buffer is null");
  if (capacity < run->outcome.solution.size()) {
    return invalid_argument("solution buffer too small");
  }
  std::memcpy(out, run->outcome.solution.data(), run->outcome.solution.size() * sizeof(double));
  return NORMEQ_OK;
}

normeq_status normeq_run_report_json(const normeq_run* run, char** out_json) {
  if (!run) return invalid_argument("run is null");
  if (!out_json) return invalid_argument("out_json is null");
  return guarded([&] { *out_json = copy_string(run->outcome.report.dump(2)); });
}

normeq_status normeq_run_eigenvalues_csv(const normeq_run* run, char** out_csv) {
  if (!run) return invalid_argument("run is null");
  if (!out_csv) return invalid_argument("out_csv is null");
  if (!run->outcome.spectrum) {
    return invalid_argument("run has no spectrum (iterative solver)");
  }
  return guarded([&] { *out_csv = copy_string(neq::eigenvalues_csv(*run->outcome.spectrum)); });
}

normeq_status normeq_compare_reports_json(const char* baseline_json, const char* candidate_json,
                                          char** out_table_json) {
  if (!baseline_json || !candidate_json) return invalid_argument("report JSON is null");
  if (!out_table_json) return invalid_argument("out_table_json is null");
  return guarded([&] {
    const auto baseline = nlohmann::json::parse(baseline_json);
    const auto candidate = nlohmann::json::parse(candidate_json);
    *out_table_json = copy_string(neq::compare_reports(baseline, candidate).dump(2));
  });
}

normeq_status normeq_difference_table_csv(const char* table_json, char** out_csv) {
  if (!table_json) return invalid_argument("table JSON is null");
  if (!out_csv) return invalid_argument("out_csv is null");
  return guarded([&] {
    *out_csv = copy_string(neq::difference_table_csv(nlohmann::json::parse(table_json)));
  });
}

normeq_status normeq_gather_dumps_csv(const char* const* paths, size_t count, char** out_csv) {
  if (!paths && count > 0) return invalid_argument("paths is null");
  if (!out_csv) return invalid_argument("out_csv is null");
  return guarded([&] {
    std::vector<std::string> files;
    files.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!paths[i]) neq::fail(neq::Errc::usage, "dump path is null");
      files.emplace_back(paths[i]);
    }
    *out_csv = copy_string(neq::gather_dumps_csv(files));
  });
}

normeq_status normeq_bench_kernel_csv(int32_t extent, uint64_t seed, const int32_t* distances,
                                      size_t distance_count, int32_t repetitions, char** out_csv) {
  if (!out_csv) return invalid_argument("out_csv is null");
  if (!distances && distance_count > 0) return invalid_argument("distances is null");
  return guarded([&] {
    const neq::IrregularWorkload workload = neq::make_random_workload(extent, seed);
    const std::span<const int32_t> span{distances, distance_count};
    *out_csv = copy_string(neq::bench_kernel(workload, span, repetitions).to_csv());
  });
}

}  // extern "C"
