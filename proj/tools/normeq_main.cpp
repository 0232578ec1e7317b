// Command-line front end. Talks to the engine exclusively through the
// C API in normeq/normeq.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "normeq/normeq.h"

namespace {

struct StringDeleter {
  void operator()(char* s) const { normeq_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

[[noreturn]] void die(const std::string& context, int status) {
  std::cerr << "error: " << context << ": " << normeq_status_name(status) << ": "
            << normeq_last_error() << "\n";
  std::exit(1);
}

void check(int status, const std::string& context) {
  if (status != NORMEQ_OK) die(context, status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(1);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
  out << content;
}

struct RunFlags {
  int32_t n = 0;
  int64_t data = 1000;
  int32_t ranks = 1;
  int32_t threads = 1;
  bool deterministic_reduction = false;
  std::string solver = "direct";
  double threshold = 0.0;
  double tol = 1e-4;
  int32_t prefetch_distance = 16;
  uint64_t seed = 1;
  std::string dump_matrix;
  std::string report_path;
  std::string bench_kernel_csv;
};

int command_run(const RunFlags& flags) {
  normeq_opts* opts = nullptr;
  check(normeq_opts_create(&opts), "creating options");
  std::unique_ptr<normeq_opts, decltype(&normeq_opts_destroy)> opts_guard(opts, &normeq_opts_destroy);

  check(normeq_opts_set_dimension(opts, flags.n), "--n");
  check(normeq_opts_set_data_count(opts, flags.data), "--data");
  check(normeq_opts_set_ranks(opts, flags.ranks), "--ranks");
  check(normeq_opts_set_threads(opts, flags.threads), "--threads");
  check(normeq_opts_set_deterministic_reduction(opts, flags.deterministic_reduction ? 1 : 0),
        "--deterministic-reduction");
  check(normeq_opts_set_solver(opts, flags.solver.c_str()), "--solver");
  check(normeq_opts_set_threshold(opts, flags.threshold), "--threshold");
  check(normeq_opts_set_tolerance(opts, flags.tol), "--tol");
  check(normeq_opts_set_prefetch_distance(opts, flags.prefetch_distance), "--prefetch-distance");
  check(normeq_opts_set_seed(opts, flags.seed), "--seed");
  if (!flags.dump_matrix.empty()) {
    check(normeq_opts_set_matrix_dump_prefix(opts, flags.dump_matrix.c_str()), "--dump-matrix");
  }

  normeq_run* run = nullptr;
  check(normeq_run_execute(opts, &run), "run");
  std::unique_ptr<normeq_run, decltype(&normeq_run_destroy)> run_guard(run, &normeq_run_destroy);

  char* report = nullptr;
  check(normeq_run_report_json(run, &report), "report");
  ApiString report_guard(report);

  if (flags.report_path.empty()) {
    std::cout << report << "\n";
  } else {
    write_file(flags.report_path, std::string(report) + "\n");
    std::cout << "report written to " << flags.report_path << "\n";
  }

  if (!flags.bench_kernel_csv.empty()) {
    const std::vector<int32_t> distances = {1, 2, 4, 8, 16, 32, 64};
    std::vector<int32_t> all = distances;
    bool present = false;
    for (int32_t d : distances) present = present || d == flags.prefetch_distance;
    if (!present && flags.prefetch_distance >= 1) all.push_back(flags.prefetch_distance);

    char* csv = nullptr;
    check(normeq_bench_kernel_csv(flags.n, flags.seed, all.data(), all.size(), 5, &csv),
          "--bench-kernel");
    ApiString csv_guard(csv);
    write_file(flags.bench_kernel_csv, csv);
    std::cout << "kernel benchmark written to " << flags.bench_kernel_csv << "\n";
  }
  return 0;
}

int command_compare(const std::string& baseline_path, const std::string& candidate_path,
                    const std::string& output_path, const std::string& csv_path) {
  const std::string baseline = read_file(baseline_path);
  const std::string candidate = read_file(candidate_path);

  char* table = nullptr;
  check(normeq_compare_reports_json(baseline.c_str(), candidate.c_str(), &table), "compare");
  ApiString table_guard(table);

  if (output_path.empty()) {
    std::cout << table << "\n";
  } else {
    write_file(output_path, std::string(table) + "\n");
    std::cout << "difference table written to " << output_path << "\n";
  }
  if (!csv_path.empty()) {
    char* csv = nullptr;
    check(normeq_difference_table_csv(table, &csv), "compare --csv");
    ApiString csv_guard(csv);
    write_file(csv_path, csv);
    std::cout << "difference table CSV written to " << csv_path << "\n";
  }
  return 0;
}

int command_gather(const std::vector<std::string>& dumps, const std::string& output_path) {
  std::vector<const char*> paths;
  paths.reserve(dumps.size());
  for (const std::string& p : dumps) paths.push_back(p.c_str());

  char* csv = nullptr;
  check(normeq_gather_dumps_csv(paths.data(), paths.size(), &csv), "gather");
  ApiString csv_guard(csv);

  if (output_path.empty()) {
    std::cout << csv;
  } else {
    write_file(output_path, csv);
    std::cout << "dense matrix written to " << output_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("normeq ") + normeq_version() +
               " - distributed symmetric normal-equations engine"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "build a synthetic system and solve it");
  run->add_option("--n", flags.n, "number of model coefficients (matrix dimension)")->required();
  run->add_option("--data", flags.data, "number of synthetic input data points");
  run->add_option("--ranks", flags.ranks, "simulated rank count");
  run->add_option("--threads", flags.threads, "threads per rank for the build");
  run->add_flag("--deterministic-reduction", flags.deterministic_reduction,
                "combine thread partial sums in guaranteed order");
  run->add_option("--solver", flags.solver, "direct, split or iterative")
      ->check(CLI::IsMember({"direct", "split", "iterative"}));
  run->add_option("--threshold", flags.threshold, "eigenvalue truncation threshold");
  run->add_option("--tol", flags.tol, "relative tolerance for the iterative solver");
  run->add_option("--prefetch-distance", flags.prefetch_distance, "kernel prefetch distance");
  run->add_option("--seed", flags.seed, "pseudo-random seed");
  run->add_option("--dump-matrix", flags.dump_matrix, "write per-rank triplet dumps with this prefix");
  run->add_option("--report", flags.report_path, "write the run report JSON to this path");
  run->add_option("--bench-kernel", flags.bench_kernel_csv,
                  "also run the irregular-access kernel benchmark, CSV to this path");

  std::string baseline_path, candidate_path, compare_output, compare_csv;
  CLI::App* compare = app.add_subcommand("compare", "difference table between two run reports");
  compare->add_option("baseline", baseline_path, "baseline report JSON")->required();
  compare->add_option("candidate", candidate_path, "candidate report JSON")->required();
  compare->add_option("--output", compare_output, "write the table JSON to this path");
  compare->add_option("--csv", compare_csv, "write the table as CSV to this path");

  std::vector<std::string> dump_paths;
  std::string gather_output;
  CLI::App* gather = app.add_subcommand("gather", "merge per-rank triplet dumps into a dense CSV matrix");
  gather->add_option("dumps", dump_paths, "triplet dump files")->required()->expected(-1);
  gather->add_option("--output", gather_output, "write the CSV matrix to this path");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return command_run(flags);
  if (compare->parsed()) return command_compare(baseline_path, candidate_path, compare_output, compare_csv);
  if (gather->parsed()) return command_gather(dump_paths, gather_output);
  return 1;
}
