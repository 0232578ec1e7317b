#include "core/gather_kernel.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <sys/utsname.h>
#include <unistd.h>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace neq {

namespace {

#if defined(__GNUC__) || defined(__clang__)
inline void prefetch_write(const double* p) { __builtin_prefetch(p, 1, 3); }
inline void prefetch_read(const double* p) { __builtin_prefetch(p, 0, 3); }
#else
inline void prefetch_write(const double*) {}
inline void prefetch_read(const double*) {}
#endif

}  // namespace

void IrregularWorkload::validate() const {
  if (extent < 0) fail(Errc::validation, "workload extent must be non-negative");
  if (prefetch_distance < 0) fail(Errc::validation, "prefetch distance must be non-negative");
  if (static_cast<int64_t>(matrix.size()) != static_cast<int64_t>(matrix_rows) * extent) {
    fail(Errc::validation, "matrix storage does not match matrix_rows x extent");
  }
  if (static_cast<int64_t>(equations.size()) != source_len) {
    fail(Errc::validation, "equations storage does not match source_len");
  }
  if (static_cast<int64_t>(dataloc.size()) != extent) {
    fail(Errc::validation, "dataloc must hold one destination row per inner index");
  }
  if (static_cast<int64_t>(inputdata.size()) != static_cast<int64_t>(extent) * extent) {
    fail(Errc::validation, "inputdata must hold extent x extent source offsets");
  }
  for (int32_t v : dataloc) {
    if (v < 0 || v >= matrix_rows) fail(Errc::validation, "dataloc entry " + std::to_string(v) + " out of range");
  }
  for (int32_t v : inputdata) {
    if (v < 0 || v >= source_len) fail(Errc::validation, "inputdata entry " + std::to_string(v) + " out of range");
  }
}

IrregularWorkload make_random_workload(int32_t extent, uint64_t seed) {
  if (extent < 0) fail(Errc::validation, "workload extent must be non-negative");
  IrregularWorkload w;
  w.extent = extent;
  w.matrix_rows = extent;
  // Source array sized extent^2 (capped) so reads scatter well beyond cache.
  const int64_t want = std::max<int64_t>(1, static_cast<int64_t>(extent) * extent);
  w.source_len = static_cast<int32_t>(std::min<int64_t>(want, int64_t{1} << 24));
  w.matrix.assign(static_cast<size_t>(w.matrix_rows) * extent, 0.0);
  w.equations.resize(w.source_len);
  for (int32_t k = 0; k < w.source_len; ++k) {
    w.equations[k] = 2.0 * unit_double(mix2(seed, 0x10000000ULL + k)) - 1.0;
  }
  w.dataloc.resize(extent);
  for (int32_t i = 0; i < extent; ++i) {
    w.dataloc[i] = static_cast<int32_t>(mix2(seed, 0x20000000ULL + i) % static_cast<uint64_t>(std::max(1, extent)));
  }
  w.inputdata.resize(static_cast<size_t>(extent) * extent);
  for (size_t k = 0; k < w.inputdata.size(); ++k) {
    w.inputdata[k] =
        static_cast<int32_t>(mix2(seed, 0x30000000ULL + k) % static_cast<uint64_t>(w.source_len));
  }
  w.weight = 0.5 + unit_double(mix2(seed, 0x40000000ULL));
  return w;
}

void run_plain(IrregularWorkload& w) {
  w.validate();
  const int32_t n = w.extent;
  const double weight = w.weight;
  double* matrix = w.matrix.data();
  const double* equations = w.equations.data();
  const int32_t* dataloc = w.dataloc.data();
  const int32_t* inputdata = w.inputdata.data();
  for (int32_t j = 0; j < n; ++j) {
    for (int32_t i = 0; i < n; ++i) {
      matrix[static_cast<size_t>(dataloc[i]) * n + j] +=
          weight * equations[inputdata[static_cast<size_t>(i) * n + j]];
    }
  }
}

void run_pipelined(IrregularWorkload& w) {
  w.validate();
  if (w.prefetch_distance < 1) {
    fail(Errc::invalid_config, "pipelined kernel needs prefetch_distance >= 1");
  }
  const int32_t n = w.extent;
  const int32_t distance = w.prefetch_distance;
  const double weight = w.weight;
  double* matrix = w.matrix.data();
  const double* equations = w.equations.data();
  const int32_t* dataloc = w.dataloc.data();
  const int32_t* inputdata = w.inputdata.data();
  for (int32_t j = 0; j < n; ++j) {
    const int32_t warmup = std::min(distance, n);
    for (int32_t i = 0; i < warmup; ++i) {
      prefetch_write(&matrix[static_cast<size_t>(dataloc[i]) * n + j]);
      prefetch_read(&equations[inputdata[static_cast<size_t>(i) * n + j]]);
    }
    for (int32_t i = 0; i < n; ++i) {
      const int32_t k = i + distance;
      if (k < n) {
        prefetch_write(&matrix[static_cast<size_t>(dataloc[k]) * n + j]);
        prefetch_read(&equations[inputdata[static_cast<size_t>(k) * n + j]]);
      }
      matrix[static_cast<size_t>(dataloc[i]) * n + j] +=
          weight * equations[inputdata[static_cast<size_t>(i) * n + j]];
    }
  }
}

std::string machine_id() {
  utsname u{};
  std::string id = "unknown";
  if (uname(&u) == 0) {
    id = std::string(u.sysname) + "-" + u.release + "-" + u.machine;
  }
  char host[256] = {0};
  if (gethostname(host, sizeof(host) - 1) == 0 && host[0] != '\0') {
    id += "-";
    id += host;
  }
  return id;
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "variant,distance,median_ns,iterations,machine_id\n";
  for (const BenchRow& r : rows) {
    out << r.variant << ',' << r.distance << ',' << r.median_ns << ',' << r.iterations << ','
        << machine_id << '\n';
  }
  return out.str();
}

namespace {

double time_variant_ns(const IrregularWorkload& pristine, int32_t distance, int32_t repetitions) {
  std::vector<double> samples;
  samples.reserve(repetitions);
  IrregularWorkload w = pristine;
  w.prefetch_distance = distance;
  for (int32_t rep = 0; rep < repetitions; ++rep) {
    std::fill(w.matrix.begin(), w.matrix.end(), 0.0);
    const auto t0 = std::chrono::steady_clock::now();
    if (distance == 0) {
      run_plain(w);
    } else {
      run_pipelined(w);
    }
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

}  // namespace

BenchReport bench_kernel(const IrregularWorkload& w, std::span<const int32_t> distances,
                         int32_t repetitions) {
  if (repetitions < 1) fail(Errc::invalid_config, "benchmark needs at least one repetition");
  w.validate();
  BenchReport report;
  report.machine_id = machine_id();
  report.rows.push_back({"plain", 0, time_variant_ns(w, 0, repetitions), repetitions});
  for (int32_t d : distances) {
    if (d < 1) fail(Errc::invalid_config, "benchmark distances must be >= 1");
    report.rows.push_back({"pipelined", d, time_variant_ns(w, d, repetitions), repetitions});
  }
  return report;
}

}  // namespace neq
