#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/block.hpp"
#include "core/matrix.hpp"
#include "core/partition.hpp"

namespace neq {

/// Synthetic problem definition. The generated normal matrix is a weighted
/// sum of outer products of bounded cosine-basis rows, so it is symmetric
/// positive semi-definite by construction and fully reproducible from the
/// seed.
struct ProblemSpec {
  int32_t n = 0;
  int64_t data_count = 0;
  uint64_t seed = 0;
  double weight_scale = 1.0;

  void validate() const;
};

struct DatumContribution {
  int64_t index = 0;
  std::vector<double> design_row;
  double weight = 0.0;
  double observation = 0.0;
};

/// Replayable data source. load(d) is a pure function of (spec, d), so any
/// rank or thread can generate any slice of the stream independently.
class ProblemGenerator {
public:
  explicit ProblemGenerator(const ProblemSpec& spec);

  void load(int64_t datum);

  std::span<const double> design_row() const { return g_; }
  double weight() const { return weight_; }
  double observation() const { return observation_; }

  DatumContribution at(int64_t datum);

private:
  ProblemSpec spec_;
  std::vector<double> g_;
  double weight_ = 0.0;
  double observation_ = 0.0;
};

/// Adds one datum's terms to the assigned cells and the RHS. Factored out of
/// the accumulation loop so the arithmetic has exactly one definition.
void apply_contribution(std::span<const std::vector<int32_t>> assigned, int32_t first_row,
                        std::span<const double> g, double weight, double observation, int32_t n,
                        std::span<double> values, std::span<double> rhs);

/// Assigned columns for every row a rank owns, indexed by local row.
std::vector<std::vector<int32_t>> assigned_for_rank(const RowPartition& p, int32_t me);

/// Single-threaded reduction of the full data stream into one rank's
/// assigned cells and RHS slice.
LocalMatrixBlock accumulate_assigned(int32_t me, const RowPartition& p, const ProblemSpec& spec);

/// Copies already-final values between transposed cells that live on the
/// same rank.
void mirror_local(const RowPartition& p, int32_t me, LocalMatrixBlock& block);

enum class ExecutionMode {
  single_threaded,  // phase-stepped round-robin over ranks
  thread_per_rank,
};

struct AssembleOptions {
  int32_t ranks = 1;
  int32_t threads_per_rank = 1;
  bool deterministic_reduction = false;
  ExecutionMode mode = ExecutionMode::thread_per_rank;
};

struct AssembleResult {
  RowPartition partition;
  std::vector<LocalMatrixBlock> blocks;
  double build_seconds = 0.0;
  double exchange_seconds = 0.0;
  uint64_t triplets_exchanged = 0;
};

/// Full distributed build: assigned-cell accumulation (optionally threaded
/// within each rank), local mirror copies, then the triplet exchange.
AssembleResult assemble(const ProblemSpec& spec, const AssembleOptions& options);

DenseMatrix gather_matrix(std::span<const LocalMatrixBlock> blocks);

std::vector<double> gather_rhs(std::span<const LocalMatrixBlock> blocks);

/// Dumps every cell of the block in the packed triplet wire format.
void write_block_triplets(const LocalMatrixBlock& block, const std::string& path);

}  // namespace neq
