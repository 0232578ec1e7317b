#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "core/block.hpp"
#include "core/partition.hpp"

namespace neq {

/// One matrix cell in transit. Wire format is 16 bytes little-endian:
/// i32 global row, i32 global column, f64 value.
struct Triplet {
  int32_t global_row = 0;
  int32_t global_col = 0;
  double value = 0.0;

  bool operator==(const Triplet&) const = default;
};

inline constexpr size_t kTripletBytes = 16;

std::vector<std::byte> pack(std::span<const Triplet> cells);

std::vector<Triplet> unpack(std::span<const std::byte> buffer);

/// Per-peer message volumes, derived on each side from the assignment rule
/// alone; no negotiation traffic is needed to agree on buffer sizes.
struct ExchangePlan {
  std::vector<int64_t> send_counts;  // indexed by destination rank
  std::vector<int64_t> recv_counts;  // indexed by source rank

  int64_t total_send() const;
  int64_t total_recv() const;
};

ExchangePlan plan_exchange(const RowPartition& p, int32_t me);

/// Writes each received cell to its transposed local position
/// (block[local(col), row] = value). Returns the number of cells written.
/// Mirror values are final, so writes are assignments; a destination outside
/// this rank's rows or an already-populated cell is a protocol violation.
size_t unpack_apply(std::span<const std::byte> buffer, const RowPartition& p, int32_t me,
                    LocalMatrixBlock& block);

struct Message {
  int32_t source = -1;
  std::vector<std::byte> bytes;
};

/// Per-rank outbound traffic: (destination, packed buffer) pairs.
using Outbox = std::vector<std::pair<int32_t, std::vector<std::byte>>>;

/// Moves every posted buffer to its destination's inbox. Buffers must match
/// the planned counts exactly, and a pair may exchange at most one batch per
/// direction.
std::vector<std::vector<Message>> deliver_all(std::vector<Outbox> outboxes,
                                              const std::vector<ExchangePlan>& plans);

/// Thread-safe mailbox fabric for concurrent rank execution. Message handoff
/// is the only channel between ranks; posting validates against the plan the
/// same way deliver_all does.
class Fabric {
public:
  Fabric(int32_t ranks, std::vector<ExchangePlan> plans);

  void post(int32_t source, int32_t destination, std::vector<std::byte> bytes);

  /// Drains and returns this rank's inbox.
  std::vector<Message> take_inbox(int32_t me);

private:
  std::vector<ExchangePlan> plans_;
  std::vector<std::vector<Message>> inboxes_;
  std::vector<uint8_t> posted_;  // ranks x ranks, one batch per direction
  std::mutex mutex_;
  int32_t ranks_;
};

}  // namespace neq
