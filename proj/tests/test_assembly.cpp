#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/assembly.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"
#include "core/spectral_solver.hpp"
#include "core/sym_assign.hpp"

using namespace neq;

namespace {

// Max elementwise |a - b| over the gathered matrix, scaled by max |entry|.
double scaled_max_diff(const DenseMatrix& a, const DenseMatrix& b) {
  REQUIRE(a.rows() == b.rows());
  const double scale = std::max({a.max_abs(), b.max_abs(), 1e-300});
  double worst = 0.0;
  for (int32_t i = 0; i < a.rows(); ++i)
    for (int32_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
  return worst / scale;
}

}  // namespace

TEST_CASE("generate_problem: 1x1 contribution matches the closed form") {
  const ProblemSpec spec{1, 1, 0, 1.0};
  ProblemGenerator gen(spec);
  const DatumContribution c = gen.at(0);
  REQUIRE(c.design_row.size() == 1);
  CHECK(c.weight > 0.0);
  CHECK(c.weight <= 1.0);

  const RowPartition p = partition_rows(1, 1);
  const LocalMatrixBlock block = accumulate_assigned(0, p, spec);
  CHECK(block.at(0, 0) == c.weight * (c.design_row[0] * c.design_row[0]));
  CHECK(block.rhs[0] == c.weight * (c.design_row[0] * c.observation));
}

TEST_CASE("generate_problem is deterministic for a given seed") {
  const ProblemSpec spec{8, 16, 7, 2.0};
  ProblemGenerator a(spec);
  ProblemGenerator b(spec);
  for (int64_t d = 0; d < spec.data_count; ++d) {
    const DatumContribution ca = a.at(d);
    const DatumContribution cb = b.at(d);
    REQUIRE(ca.design_row == cb.design_row);
    REQUIRE(ca.weight == cb.weight);
    REQUIRE(ca.observation == cb.observation);
    REQUIRE(ca.weight > 0.0);
    REQUIRE(ca.weight <= spec.weight_scale);
    for (double g : ca.design_row) REQUIRE(std::fabs(g) <= 1.0);
  }
}

TEST_CASE("assembled matrix is positive semi-definite") {
  const ProblemSpec spec{8, 100, 7, 1.0};
  const auto sys = oracle::build_full_matrix(spec);
  const Spectrum s = eigendecompose(sys.matrix);
  const double scale = sys.matrix.max_abs();
  for (double lambda : s.eigenvalues) CHECK(lambda >= -1e-10 * scale);
}

TEST_CASE("a zero-weight contribution adds nothing") {
  const RowPartition p = partition_rows(4, 1);
  const auto assigned = assigned_for_rank(p, 0);
  std::vector<double> values(static_cast<size_t>(4) * 4, 0.0);
  std::vector<double> rhs(4, 0.0);
  const std::vector<double> g = {0.5, -1.0, 0.25, 1.0};
  apply_contribution(assigned, 0, g, 0.0, 0.75, 4, values, rhs);
  CHECK(std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; }));
  CHECK(std::all_of(rhs.begin(), rhs.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("assigned cells match the reference build exactly (same summation order)") {
  const ProblemSpec spec{4, 10, 3, 1.0};
  const RowPartition p = partition_rows(4, 1);
  const LocalMatrixBlock block = accumulate_assigned(0, p, spec);
  const auto sys = oracle::build_full_matrix(spec);
  for (int32_t row = 0; row < 4; ++row) {
    for (int32_t col : assigned_columns(4, row).columns) {
      CHECK(block.at(row, col) == sys.matrix(row, col));
    }
    CHECK(block.rhs[row] == sys.rhs[row]);
  }
}

TEST_CASE("each rank computes exactly its quota of cells for n=6 over 3 ranks") {
  const ProblemSpec spec{6, 20, 1, 1.0};
  const RowPartition p = partition_rows(6, 3);
  for (int32_t me = 0; me < 3; ++me) {
    const LocalMatrixBlock block = accumulate_assigned(me, p, spec);
    CHECK(block.cells_computed == 7);  // quotas 4+3 per rank
  }
}

TEST_CASE("mirror_local") {
  const ProblemSpec spec{6, 25, 11, 1.0};
  const RowPartition p = partition_rows(6, 3);

  SUBCASE("copies (0,1) into (1,0) on rank 0") {
    LocalMatrixBlock block = accumulate_assigned(0, p, spec);
    REQUIRE_FALSE(block.is_filled(1, 0));
    mirror_local(p, 0, block);
    CHECK(block.is_filled(1, 0));
    CHECK(block.at(1, 0) == block.at(0, 1));
  }

  SUBCASE("diagonal cells are untouched") {
    LocalMatrixBlock block = accumulate_assigned(0, p, spec);
    const double d0 = block.at(0, 0);
    const double d1 = block.at(1, 1);
    mirror_local(p, 0, block);
    CHECK(block.at(0, 0) == d0);
    CHECK(block.at(1, 1) == d1);
  }

  SUBCASE("on a single rank, mirroring alone completes the symmetric matrix") {
    const ProblemSpec single{6, 25, 11, 1.0};
    const RowPartition p1 = partition_rows(6, 1);
    LocalMatrixBlock block = accumulate_assigned(0, p1, single);
    mirror_local(p1, 0, block);
    REQUIRE(block.fully_filled());
    const auto sys = oracle::build_full_matrix(single);
    const LocalMatrixBlock blocks[] = {block};
    CHECK(scaled_max_diff(gather_matrix(blocks), sys.matrix) == 0.0);
  }
}

TEST_CASE("distributed assembly equals the reference build bit-for-bit") {
  for (const auto& [n, d, ranks] : {std::tuple{6, 100, 3}, {17, 300, 4}, {32, 500, 5}}) {
    const ProblemSpec spec{n, d, static_cast<uint64_t>(n * 7 + ranks), 1.0};
    AssembleOptions opt;
    opt.ranks = ranks;
    const AssembleResult result = assemble(spec, opt);
    const DenseMatrix a = gather_matrix(result.blocks);
    const auto sys = oracle::build_full_matrix(spec);
    CHECK(scaled_max_diff(a, sys.matrix) == 0.0);

    // Bit-exact symmetry: mirrored values are copies, never recomputed.
    for (int32_t i = 0; i < n; ++i)
      for (int32_t j = 0; j < n; ++j) REQUIRE(a(i, j) == a(j, i));

    uint64_t computed = 0;
    for (const auto& block : result.blocks) computed += block.cells_computed;
    CHECK(computed == global_cell_count(n));
  }
}

TEST_CASE("rank count does not change the gathered matrix") {
  const ProblemSpec spec{6, 200, 5, 1.0};
  AssembleOptions one;
  one.ranks = 1;
  AssembleOptions three;
  three.ranks = 3;
  const DenseMatrix a1 = gather_matrix(assemble(spec, one).blocks);
  const DenseMatrix a3 = gather_matrix(assemble(spec, three).blocks);
  CHECK(scaled_max_diff(a1, a3) == 0.0);
  CHECK(gather_rhs(assemble(spec, one).blocks) == gather_rhs(assemble(spec, three).blocks));
}

TEST_CASE("single-threaded and thread-per-rank execution agree bit-for-bit") {
  const ProblemSpec spec{24, 400, 9, 1.0};
  AssembleOptions seq;
  seq.ranks = 4;
  seq.mode = ExecutionMode::single_threaded;
  AssembleOptions con;
  con.ranks = 4;
  con.mode = ExecutionMode::thread_per_rank;
  const AssembleResult rs = assemble(spec, seq);
  const AssembleResult rc = assemble(spec, con);
  for (int32_t me = 0; me < 4; ++me) {
    REQUIRE(rs.blocks[me].values == rc.blocks[me].values);
    REQUIRE(rs.blocks[me].rhs == rc.blocks[me].rhs);
  }
  CHECK(rs.triplets_exchanged == rc.triplets_exchanged);
}

TEST_CASE("deterministic reduction is bit-identical across thread counts") {
  const ProblemSpec spec{16, 500, 21, 1.0};
  AssembleOptions t1;
  t1.ranks = 2;
  t1.threads_per_rank = 1;
  t1.deterministic_reduction = true;
  AssembleOptions t4 = t1;
  t4.threads_per_rank = 4;
  const AssembleResult r1 = assemble(spec, t1);
  const AssembleResult r4 = assemble(spec, t4);
  for (int32_t me = 0; me < 2; ++me) {
    REQUIRE(r1.blocks[me].values == r4.blocks[me].values);
    REQUIRE(r1.blocks[me].rhs == r4.blocks[me].rhs);
  }
}

TEST_CASE("free-order reduction stays within 1e-12 of the single-threaded build") {
  const ProblemSpec spec{16, 500, 22, 1.0};
  AssembleOptions t1;
  t1.ranks = 2;
  AssembleOptions t4 = t1;
  t4.threads_per_rank = 4;
  const DenseMatrix a1 = gather_matrix(assemble(spec, t1).blocks);
  const DenseMatrix a4 = gather_matrix(assemble(spec, t4).blocks);
  CHECK(scaled_max_diff(a1, a4) <= 1e-12);
}

TEST_CASE("per-rank computed-cell counts stay balanced") {
  for (const auto& [n, ranks] : {std::pair{64, 8}, {100, 4}, {33, 4}}) {
    const ProblemSpec spec{n, 10, 3, 1.0};
    AssembleOptions opt;
    opt.ranks = ranks;
    const AssembleResult result = assemble(spec, opt);
    uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& block : result.blocks) {
      lo = std::min(lo, block.cells_computed);
      hi = std::max(hi, block.cells_computed);
    }
    CHECK(static_cast<double>(hi) / static_cast<double>(lo) <= 1.2);
  }
}

TEST_CASE("delivery order does not matter") {
  const ProblemSpec spec{16, 100, 4, 1.0};
  const RowPartition p = partition_rows(16, 4);
  std::vector<ExchangePlan> plans;
  for (int32_t me = 0; me < 4; ++me) plans.push_back(plan_exchange(p, me));

  // Build blocks and outboxes once.
  std::vector<LocalMatrixBlock> pristine;
  std::vector<Outbox> outboxes(4);
  for (int32_t me = 0; me < 4; ++me) {
    LocalMatrixBlock block = accumulate_assigned(me, p, spec);
    mirror_local(p, me, block);
    std::vector<std::vector<Triplet>> outgoing(4);
    for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
      for (int32_t col : assigned_columns(16, row).columns) {
        const int32_t owner = owner_of_row(p, col);
        if (owner != me) outgoing[owner].push_back({row, col, block.at(block.local_of(row), col)});
      }
    }
    for (int32_t dst = 0; dst < 4; ++dst) {
      if (!outgoing[dst].empty()) outboxes[me].push_back({dst, pack(outgoing[dst])});
    }
    pristine.push_back(std::move(block));
  }

  std::vector<LocalMatrixBlock> reference;
  for (uint64_t trial = 0; trial < 100; ++trial) {
    std::vector<LocalMatrixBlock> blocks = pristine;
    auto inboxes = deliver_all(outboxes, plans);
    for (int32_t me = 0; me < 4; ++me) {
      // Shuffle arrival order deterministically per trial.
      auto& inbox = inboxes[me];
      for (size_t k = inbox.size(); k > 1; --k) {
        std::swap(inbox[k - 1], inbox[mix2(trial, k) % k]);
      }
      for (const Message& m : inbox) unpack_apply(m.bytes, p, me, blocks[me]);
      REQUIRE(blocks[me].fully_filled());
    }
    if (trial == 0) {
      reference = blocks;
    } else {
      for (int32_t me = 0; me < 4; ++me) REQUIRE(blocks[me].values == reference[me].values);
    }
  }
}

TEST_CASE("triplet totals match the off-rank mirror count") {
  const ProblemSpec spec{12, 50, 2, 1.0};
  AssembleOptions opt;
  opt.ranks = 3;
  const AssembleResult result = assemble(spec, opt);
  const RowPartition& p = result.partition;
  uint64_t off_rank = 0;
  for (int32_t me = 0; me < 3; ++me) {
    for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
      for (int32_t col : assigned_columns(12, row).columns) {
        if (owner_of_row(p, col) != me) ++off_rank;
      }
    }
  }
  CHECK(result.triplets_exchanged == off_rank);
}
