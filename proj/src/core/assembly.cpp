#include "core/assembly.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "core/errors.hpp"
#include "core/rank_net.hpp"
#include "core/rng.hpp"
#include "core/sym_assign.hpp"

namespace neq {

namespace {

// Chunk count for the guaranteed-order reduction. It is a fixed constant,
// not the thread count, so the combination tree (and therefore every
// rounding) is identical no matter how many threads execute the chunks.
constexpr int32_t kFixedChunks = 16;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// First exception thrown on any worker thread, rethrown on the caller.
class ExceptionSlot {
public:
  void capture() noexcept {
    std::lock_guard lock(mutex_);
    if (!first_) first_ = std::current_exception();
  }
  void rethrow_if_set() {
    if (first_) std::rethrow_exception(first_);
  }

private:
  std::mutex mutex_;
  std::exception_ptr first_;
};

}  // namespace

void ProblemSpec::validate() const {
  if (n < 1) fail(Errc::invalid_config, "coefficient count must be at least 1, got " + std::to_string(n));
  if (data_count < 1) {
    fail(Errc::invalid_config, "data count must be at least 1, got " + std::to_string(data_count));
  }
  if (!(weight_scale > 0.0)) fail(Errc::invalid_config, "weight scale must be positive");
}

ProblemGenerator::ProblemGenerator(const ProblemSpec& spec) : spec_(spec), g_(spec.n, 0.0) {
  spec.validate();
}

void ProblemGenerator::load(int64_t datum) {
  const uint64_t base = static_cast<uint64_t>(datum) * 4;
  const double t = unit_double(mix2(spec_.seed, base));
  const double uw = unit_double(mix2(spec_.seed, base + 1));
  const double ub = unit_double(mix2(spec_.seed, base + 2));
  weight_ = spec_.weight_scale * (1.0 - uw);  // (0, weight_scale]
  observation_ = 2.0 * ub - 1.0;
  for (int32_t i = 0; i < spec_.n; ++i) g_[i] = std::cos(std::numbers::pi * i * t);
}

DatumContribution ProblemGenerator::at(int64_t datum) {
  load(datum);
  DatumContribution c;
  c.index = datum;
  c.design_row.assign(g_.begin(), g_.end());
  c.weight = weight_;
  c.observation = observation_;
  return c;
}

void apply_contribution(std::span<const std::vector<int32_t>> assigned, int32_t first_row,
                        std::span<const double> g, double weight, double observation, int32_t n,
                        std::span<double> values, std::span<double> rhs) {
  for (size_t local = 0; local < assigned.size(); ++local) {
    const double gi = g[first_row + static_cast<int32_t>(local)];
    // w*(gi*gj) keeps one product order so per-cell sums stay bit-comparable
    // with the reference builder.
    rhs[local] += weight * (gi * observation);
    double* row = values.data() + local * static_cast<size_t>(n);
    for (int32_t col : assigned[local]) row[col] += weight * (gi * g[col]);
  }
}

std::vector<std::vector<int32_t>> assigned_for_rank(const RowPartition& p, int32_t me) {
  std::vector<std::vector<int32_t>> cols;
  cols.reserve(p.rows_of(me));
  for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
    cols.push_back(assigned_columns(p.n, row).columns);
  }
  return cols;
}

namespace {

void accumulate_range(const ProblemSpec& spec, std::span<const std::vector<int32_t>> assigned,
                      int32_t first_row, int64_t begin, int64_t end, std::span<double> values,
                      std::span<double> rhs) {
  ProblemGenerator gen(spec);
  for (int64_t d = begin; d < end; ++d) {
    gen.load(d);
    apply_contribution(assigned, first_row, gen.design_row(), gen.weight(), gen.observation(), spec.n,
                       values, rhs);
  }
}

struct Partial {
  std::vector<double> values;
  std::vector<double> rhs;
};

void add_into(std::vector<double>& acc, const std::vector<double>& part) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
}

LocalMatrixBlock block_with_assignment_marked(const RowPartition& p, int32_t me,
                                              std::span<const std::vector<int32_t>> assigned) {
  LocalMatrixBlock block = LocalMatrixBlock::for_rank(p, me);
  for (size_t local = 0; local < assigned.size(); ++local) {
    for (int32_t col : assigned[local]) {
      block.mark_filled(static_cast<int32_t>(local), col);
      ++block.cells_computed;
    }
  }
  return block;
}

LocalMatrixBlock accumulate_for_rank(int32_t me, const RowPartition& p, const ProblemSpec& spec,
                                     int32_t threads, bool deterministic) {
  const auto assigned = assigned_for_rank(p, me);
  LocalMatrixBlock block = block_with_assignment_marked(p, me, assigned);
  const int32_t first_row = p.starts[me];
  const int64_t d = spec.data_count;

  if (!deterministic && threads <= 1) {
    accumulate_range(spec, assigned, first_row, 0, d, block.values, block.rhs);
    return block;
  }

  const int32_t chunks = deterministic ? kFixedChunks : threads;
  auto chunk_begin = [&](int32_t c) { return d * c / chunks; };

  ExceptionSlot errors;
  if (deterministic) {
    // Fixed chunk partials merged in ascending chunk order; thread count
    // only decides who computes each partial, never the rounding.
    std::vector<Partial> partials(chunks);
    std::atomic<int32_t> next{0};
    auto worker = [&]() noexcept {
      try {
        for (int32_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
          Partial part;
          part.values.assign(block.values.size(), 0.0);
          part.rhs.assign(block.rhs.size(), 0.0);
          accumulate_range(spec, assigned, first_row, chunk_begin(c), chunk_begin(c + 1), part.values,
                           part.rhs);
          partials[c] = std::move(part);
        }
      } catch (...) {
        errors.capture();
      }
    };
    {
      std::vector<std::jthread> pool;
      for (int32_t t = 1; t < std::min(threads, chunks); ++t) pool.emplace_back(worker);
      worker();
    }
    errors.rethrow_if_set();
    for (const Partial& part : partials) {
      add_into(block.values, part.values);
      add_into(block.rhs, part.rhs);
    }
    return block;
  }

  // Free-order reduction: one contiguous slice per thread, merged as each
  // slice finishes.
  std::mutex merge_mutex;
  auto worker = [&](int32_t c) noexcept {
    try {
      Partial part;
      part.values.assign(block.values.size(), 0.0);
      part.rhs.assign(block.rhs.size(), 0.0);
      accumulate_range(spec, assigned, first_row, chunk_begin(c), chunk_begin(c + 1), part.values,
                       part.rhs);
      std::lock_guard lock(merge_mutex);
      add_into(block.values, part.values);
      add_into(block.rhs, part.rhs);
    } catch (...) {
      errors.capture();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int32_t c = 1; c < chunks; ++c) pool.emplace_back(worker, c);
    worker(0);
  }
  errors.rethrow_if_set();
  return block;
}

}  // namespace

LocalMatrixBlock accumulate_assigned(int32_t me, const RowPartition& p, const ProblemSpec& spec) {
  return accumulate_for_rank(me, p, spec, 1, false);
}

void mirror_local(const RowPartition& p, int32_t me, LocalMatrixBlock& block) {
  for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
    for (int32_t col : assigned_columns(p.n, row).columns) {
      if (col == row || owner_of_row(p, col) != me) continue;
      const int32_t src_local = block.local_of(row);
      const int32_t dst_local = block.local_of(col);
      if (block.is_filled(dst_local, row)) {
        fail(Errc::protocol, "mirror target (" + std::to_string(col) + ", " + std::to_string(row) +
                                 ") already populated");
      }
      block.at(dst_local, row) = block.at(src_local, col);
      block.mark_filled(dst_local, row);
    }
  }
}

namespace {

std::vector<std::vector<Triplet>> collect_outgoing(const RowPartition& p, int32_t me,
                                                   const LocalMatrixBlock& block) {
  std::vector<std::vector<Triplet>> outgoing(p.ranks);
  for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
    for (int32_t col : assigned_columns(p.n, row).columns) {
      const int32_t owner = owner_of_row(p, col);
      if (owner == me) continue;
      outgoing[owner].push_back({row, col, block.at(block.local_of(row), col)});
    }
  }
  return outgoing;
}

}  // namespace

AssembleResult assemble(const ProblemSpec& spec, const AssembleOptions& options) {
  spec.validate();
  if (options.threads_per_rank < 1) {
    fail(Errc::invalid_config, "threads per rank must be at least 1");
  }
  AssembleResult result;
  result.partition = partition_rows(spec.n, options.ranks);
  const RowPartition& part = result.partition;
  const int32_t ranks = part.ranks;

  std::vector<ExchangePlan> plans(ranks);
  for (int32_t me = 0; me < ranks; ++me) plans[me] = plan_exchange(part, me);

  Fabric fabric(ranks, plans);
  result.blocks.resize(ranks);
  std::atomic<uint64_t> triplets{0};

  auto build_one = [&](int32_t me) {
    result.blocks[me] =
        accumulate_for_rank(me, part, spec, options.threads_per_rank, options.deterministic_reduction);
    mirror_local(part, me, result.blocks[me]);
    auto outgoing = collect_outgoing(part, me, result.blocks[me]);
    for (int32_t dst = 0; dst < ranks; ++dst) {
      if (outgoing[dst].empty()) continue;
      triplets += outgoing[dst].size();
      fabric.post(me, dst, pack(outgoing[dst]));
    }
  };
  auto drain_one = [&](int32_t me) {
    for (const Message& m : fabric.take_inbox(me)) unpack_apply(m.bytes, part, me, result.blocks[me]);
  };

  const auto t0 = Clock::now();
  if (options.mode == ExecutionMode::single_threaded || ranks == 1) {
    for (int32_t me = 0; me < ranks; ++me) build_one(me);
    result.build_seconds = seconds_since(t0);
    for (int32_t me = 0; me < ranks; ++me) drain_one(me);
  } else {
    ExceptionSlot errors;
    std::barrier sync(ranks, [&]() noexcept { result.build_seconds = seconds_since(t0); });
    {
      // Every thread reaches the barrier even on failure, so a faulty rank
      // cannot deadlock the others.
      std::vector<std::jthread> rank_threads;
      rank_threads.reserve(ranks);
      for (int32_t me = 0; me < ranks; ++me) {
        rank_threads.emplace_back([&, me]() noexcept {
          try {
            build_one(me);
          } catch (...) {
            errors.capture();
          }
          sync.arrive_and_wait();
          try {
            drain_one(me);
          } catch (...) {
            errors.capture();
          }
        });
      }
    }
    errors.rethrow_if_set();
  }
  result.exchange_seconds = seconds_since(t0) - result.build_seconds;
  result.triplets_exchanged = triplets.load();
  return result;
}

DenseMatrix gather_matrix(std::span<const LocalMatrixBlock> blocks) {
  if (blocks.empty()) fail(Errc::invalid_config, "no blocks to gather");
  const int32_t n = blocks.front().n;
  DenseMatrix a(n, n);
  for (const LocalMatrixBlock& b : blocks) {
    if (!b.fully_filled()) {
      fail(Errc::protocol, "block at row offset " + std::to_string(b.row_offset) + " has unset cells");
    }
    for (int32_t lr = 0; lr < b.local_rows; ++lr)
      for (int32_t col = 0; col < n; ++col) a(b.row_offset + lr, col) = b.at(lr, col);
  }
  return a;
}

std::vector<double> gather_rhs(std::span<const LocalMatrixBlock> blocks) {
  if (blocks.empty()) fail(Errc::invalid_config, "no blocks to gather");
  std::vector<double> rhs(blocks.front().n, 0.0);
  for (const LocalMatrixBlock& b : blocks)
    for (int32_t lr = 0; lr < b.local_rows; ++lr) rhs[b.row_offset + lr] = b.rhs[lr];
  return rhs;
}

void write_block_triplets(const LocalMatrixBlock& block, const std::string& path) {
  std::vector<Triplet> cells;
  cells.reserve(static_cast<size_t>(block.local_rows) * block.n);
  for (int32_t lr = 0; lr < block.local_rows; ++lr)
    for (int32_t col = 0; col < block.n; ++col)
      cells.push_back({block.row_offset + lr, col, block.at(lr, col)});
  const std::vector<std::byte> bytes = pack(cells);

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io, "short write to " + path);
}

}  // namespace neq
