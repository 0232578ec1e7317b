#include "core/rank_net.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "core/errors.hpp"
#include "core/sym_assign.hpp"

namespace neq {

namespace {

void put_u32le(std::byte* p, uint32_t v) {
  p[0] = static_cast<std::byte>(v & 0xff);
  p[1] = static_cast<std::byte>((v >> 8) & 0xff);
  p[2] = static_cast<std::byte>((v >> 16) & 0xff);
  p[3] = static_cast<std::byte>((v >> 24) & 0xff);
}

void put_u64le(std::byte* p, uint64_t v) {
  put_u32le(p, static_cast<uint32_t>(v & 0xffffffffULL));
  put_u32le(p + 4, static_cast<uint32_t>(v >> 32));
}

uint32_t get_u32le(const std::byte* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64le(const std::byte* p) {
  return static_cast<uint64_t>(get_u32le(p)) | (static_cast<uint64_t>(get_u32le(p + 4)) << 32);
}

}  // namespace

std::vector<std::byte> pack(std::span<const Triplet> cells) {
  std::vector<std::byte> buffer(cells.size() * kTripletBytes);
  std::byte* p = buffer.data();
  for (const Triplet& t : cells) {
    put_u32le(p, static_cast<uint32_t>(t.global_row));
    put_u32le(p + 4, static_cast<uint32_t>(t.global_col));
    put_u64le(p + 8, std::bit_cast<uint64_t>(t.value));
    p += kTripletBytes;
  }
  return buffer;
}

std::vector<Triplet> unpack(std::span<const std::byte> buffer) {
  if (buffer.size() % kTripletBytes != 0) {
    fail(Errc::protocol,
         "packed buffer length " + std::to_string(buffer.size()) + " is not a multiple of 16");
  }
  std::vector<Triplet> cells(buffer.size() / kTripletBytes);
  const std::byte* p = buffer.data();
  for (Triplet& t : cells) {
    t.global_row = static_cast<int32_t>(get_u32le(p));
    t.global_col = static_cast<int32_t>(get_u32le(p + 4));
    t.value = std::bit_cast<double>(get_u64le(p + 8));
    p += kTripletBytes;
  }
  return cells;
}

int64_t ExchangePlan::total_send() const {
  return std::accumulate(send_counts.begin(), send_counts.end(), int64_t{0});
}

int64_t ExchangePlan::total_recv() const {
  return std::accumulate(recv_counts.begin(), recv_counts.end(), int64_t{0});
}

ExchangePlan plan_exchange(const RowPartition& p, int32_t me) {
  if (me < 0 || me >= p.ranks) {
    fail(Errc::index_range, "rank " + std::to_string(me) + " outside [0, " + std::to_string(p.ranks) + ")");
  }
  ExchangePlan plan;
  plan.send_counts.assign(p.ranks, 0);
  plan.recv_counts.assign(p.ranks, 0);

  // Sends: my assigned off-rank cells, destined for the owner of the column
  // (the mirrored cell (col, row) lives in that rank's rows).
  for (int32_t row = p.starts[me]; row < p.ends[me]; ++row) {
    for (int32_t col : assigned_columns(p.n, row).columns) {
      const int32_t owner = owner_of_row(p, col);
      if (owner != me) plan.send_counts[owner]++;
    }
  }

  // Receives: evaluate the same rule for every peer row whose mirrored cell
  // lands in my rows.
  for (int32_t peer = 0; peer < p.ranks; ++peer) {
    if (peer == me) continue;
    for (int32_t row = p.starts[peer]; row < p.ends[peer]; ++row) {
      for (int32_t col : assigned_columns(p.n, row).columns) {
        if (owner_of_row(p, col) == me) plan.recv_counts[peer]++;
      }
    }
  }
  return plan;
}

size_t unpack_apply(std::span<const std::byte> buffer, const RowPartition& p, int32_t me,
                    LocalMatrixBlock& block) {
  size_t written = 0;
  for (const Triplet& t : unpack(buffer)) {
    if (t.global_row < 0 || t.global_row >= p.n || t.global_col < 0 || t.global_col >= p.n) {
      fail(Errc::protocol, "triplet (" + std::to_string(t.global_row) + ", " +
                               std::to_string(t.global_col) + ") outside matrix bounds");
    }
    if (owner_of_row(p, t.global_col) != me) {
      fail(Errc::protocol, "triplet (" + std::to_string(t.global_row) + ", " +
                               std::to_string(t.global_col) + ") transposes outside rank " +
                               std::to_string(me));
    }
    const int32_t local_row = block.local_of(t.global_col);
    if (block.is_filled(local_row, t.global_row)) {
      fail(Errc::protocol, "cell (" + std::to_string(t.global_col) + ", " +
                               std::to_string(t.global_row) + ") received twice");
    }
    block.at(local_row, t.global_row) = t.value;
    block.mark_filled(local_row, t.global_row);
    ++written;
  }
  return written;
}

std::vector<std::vector<Message>> deliver_all(std::vector<Outbox> outboxes,
                                              const std::vector<ExchangePlan>& plans) {
  const int32_t ranks = static_cast<int32_t>(outboxes.size());
  Fabric fabric(ranks, plans);
  for (int32_t src = 0; src < ranks; ++src)
    for (auto& [dst, bytes] : outboxes[src]) fabric.post(src, dst, std::move(bytes));

  std::vector<std::vector<Message>> inboxes(ranks);
  for (int32_t me = 0; me < ranks; ++me) inboxes[me] = fabric.take_inbox(me);
  return inboxes;
}

Fabric::Fabric(int32_t ranks, std::vector<ExchangePlan> plans)
    : plans_(std::move(plans)),
      inboxes_(ranks),
      posted_(static_cast<size_t>(ranks) * ranks, 0),
      ranks_(ranks) {
  if (static_cast<int32_t>(plans_.size()) != ranks) {
    fail(Errc::invalid_config, "fabric needs one exchange plan per rank");
  }
}

void Fabric::post(int32_t source, int32_t destination, std::vector<std::byte> bytes) {
  if (source < 0 || source >= ranks_ || destination < 0 || destination >= ranks_ || source == destination) {
    fail(Errc::protocol, "invalid rank pair " + std::to_string(source) + " -> " + std::to_string(destination));
  }
  const int64_t planned = plans_[source].send_counts[destination];
  if (bytes.size() != static_cast<size_t>(planned) * kTripletBytes) {
    fail(Errc::protocol, "buffer from rank " + std::to_string(source) + " to rank " +
                             std::to_string(destination) + " holds " +
                             std::to_string(bytes.size() / kTripletBytes) + " cells, plan says " +
                             std::to_string(planned));
  }
  std::lock_guard lock(mutex_);
  uint8_t& flag = posted_[static_cast<size_t>(source) * ranks_ + destination];
  if (flag) {
    fail(Errc::protocol,
         "second batch posted for direction " + std::to_string(source) + " -> " + std::to_string(destination));
  }
  flag = 1;
  inboxes_[destination].push_back({source, std::move(bytes)});
}

std::vector<Message> Fabric::take_inbox(int32_t me) {
  if (me < 0 || me >= ranks_) {
    fail(Errc::index_range, "rank " + std::to_string(me) + " outside [0, " + std::to_string(ranks_) + ")");
  }
  std::lock_guard lock(mutex_);
  return std::exchange(inboxes_[me], {});
}

}  // namespace neq
