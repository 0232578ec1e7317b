#ifndef NORMEQ_H
#define NORMEQ_H

/*
 * normeq - desk-scale distributed normal-equations engine.
 *
 * C interface to the shared library. The engine builds a symmetric
 * normal-equations matrix across simulated ranks using a balanced
 * exactly-once cell assignment, exchanges mirrored cells as packed
 * 16-byte triplets, and solves the system by truncated eigendecomposition
 * (full or split-spectrum) or preconditioned conjugate gradients.
 *
 * All functions return a normeq_status; NORMEQ_OK means success. On
 * failure, normeq_last_error() gives a human-readable detail string for
 * the calling thread. Strings returned through char** out-parameters are
 * heap-allocated and must be released with normeq_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NORMEQ_API __declspec(dllexport)
#else
#define NORMEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NORMEQ_OK = 0,
  NORMEQ_ERR_INVALID_ARGUMENT = -1, /* null pointer, bad flag value, usage error */
  NORMEQ_ERR_CONFIG = -2,           /* configuration violates a precondition */
  NORMEQ_ERR_INDEX = -3,            /* index outside its valid range */
  NORMEQ_ERR_PROTOCOL = -4,         /* exchange protocol violation */
  NORMEQ_ERR_VALIDATION = -5,       /* input data failed validation */
  NORMEQ_ERR_NUMERIC = -6,          /* numerical failure (e.g. no convergence) */
  NORMEQ_ERR_RANK_DEFICIENT = -7,   /* singular system in a direct solve */
  NORMEQ_ERR_IO = -8,               /* file could not be read or written */
  NORMEQ_ERR_UNKNOWN = -99
} normeq_status;

/* Opaque run configuration. */
typedef struct normeq_opts normeq_opts;
/* Opaque completed run: solution, report, optional spectrum. */
typedef struct normeq_run normeq_run;

NORMEQ_API const char* normeq_version(void);

/* Stable identifier for a status code, e.g. "NORMEQ_ERR_CONFIG". */
NORMEQ_API const char* normeq_status_name(int status);

/* Detail message for the last failing call on this thread; never NULL. */
NORMEQ_API const char* normeq_last_error(void);

NORMEQ_API void normeq_string_free(char* s);

/*
 * Configuration. Defaults: n=0 (must be set), data=1000, seed=1,
 * weight_scale=1.0, ranks=1, threads=1, deterministic_reduction=0,
 * solver="direct", threshold=0.0, tolerance=1e-4, prefetch_distance=16,
 * no matrix dump.
 */
NORMEQ_API normeq_status normeq_opts_create(normeq_opts** out);
NORMEQ_API void normeq_opts_destroy(normeq_opts* opts);

NORMEQ_API normeq_status normeq_opts_set_dimension(normeq_opts* opts, int32_t n);
NORMEQ_API normeq_status normeq_opts_set_data_count(normeq_opts* opts, int64_t count);
NORMEQ_API normeq_status normeq_opts_set_seed(normeq_opts* opts, uint64_t seed);
NORMEQ_API normeq_status normeq_opts_set_weight_scale(normeq_opts* opts, double scale);
NORMEQ_API normeq_status normeq_opts_set_ranks(normeq_opts* opts, int32_t ranks);
NORMEQ_API normeq_status normeq_opts_set_threads(normeq_opts* opts, int32_t threads);
NORMEQ_API normeq_status normeq_opts_set_deterministic_reduction(normeq_opts* opts, int enabled);
/* solver is one of "direct", "split", "iterative" */
NORMEQ_API normeq_status normeq_opts_set_solver(normeq_opts* opts, const char* solver);
NORMEQ_API normeq_status normeq_opts_set_threshold(normeq_opts* opts, double threshold);
NORMEQ_API normeq_status normeq_opts_set_tolerance(normeq_opts* opts, double tolerance);
NORMEQ_API normeq_status normeq_opts_set_prefetch_distance(normeq_opts* opts, int32_t distance);
/* Writes <prefix>.rank<k>.trp per rank during the run; NULL or "" disables. */
NORMEQ_API normeq_status normeq_opts_set_matrix_dump_prefix(normeq_opts* opts, const char* prefix);

/*
 * Executes the full pipeline for the given configuration. On success the
 * caller owns *out_run and must destroy it with normeq_run_destroy().
 */
NORMEQ_API normeq_status normeq_run_execute(const normeq_opts* opts, normeq_run** out_run);
NORMEQ_API void normeq_run_destroy(normeq_run* run);

NORMEQ_API int32_t normeq_run_dimension(const normeq_run* run);

/* Copies the n solution coefficients into out (capacity elements). */
NORMEQ_API normeq_status normeq_run_solution(const normeq_run* run, double* out, size_t capacity);

/* Canonical report JSON (sorted keys). */
NORMEQ_API normeq_status normeq_run_report_json(const normeq_run* run, char** out_json);

/*
 * Eigenvalues of the assembled system as CSV in descending magnitude
 * order. Only available for the direct and split solvers.
 */
NORMEQ_API normeq_status normeq_run_eigenvalues_csv(const normeq_run* run, char** out_csv);

/*
 * Difference table between two run report JSON documents: min/max/mean
 * percentage difference over solution coefficients and predicted values,
 * with a tiny-magnitude guard of 1e-30.
 */
NORMEQ_API normeq_status normeq_compare_reports_json(const char* baseline_json,
                                                     const char* candidate_json, char** out_table_json);

/* Renders a difference table JSON document as CSV. */
NORMEQ_API normeq_status normeq_difference_table_csv(const char* table_json, char** out_csv);

/* Merges per-rank .trp dump files into one dense matrix rendered as CSV. */
NORMEQ_API normeq_status normeq_gather_dumps_csv(const char* const* paths, size_t count,
                                                 char** out_csv);

/*
 * Irregular-access kernel benchmark: times the plain kernel and the
 * software-pipelined variant at each requested prefetch distance over a
 * deterministic workload. CSV columns: variant, distance, median_ns,
 * iterations, machine_id.
 */
NORMEQ_API normeq_status normeq_bench_kernel_csv(int32_t extent, uint64_t seed,
                                                 const int32_t* distances, size_t distance_count,
                                                 int32_t repetitions, char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NORMEQ_H */
