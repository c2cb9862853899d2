// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"
#include "uniques.hpp"

namespace wimerge {

// A frame transmission seen by both captures: the digest plus its capture
// time and record position in each trace.
struct ReferencePair {
  Digest128 hash;
  uint64_t t1_us = 0;
  uint64_t t2_us = 0;
  uint64_t ord1 = 0;
  uint64_t ord2 = 0;

  friend bool operator==(const ReferencePair&, const ReferencePair&) = default;
};

struct CollisionReport {
  Digest128 hash;
  uint32_t count = 0;  // occurrences of the digest within trace 1
};

struct IntersectResult {
  std::vector<ReferencePair> pairs;         // in trace-2 scan order
  std::vector<CollisionReport> collisions;  // filtered before the scan
  uint64_t cross_trace_suspects = 0;        // repeat hits on one trace-1 entry
};

// Hash join between two digest streams. Trace 1 is loaded up front into a
// flat open-addressing table (~38 bytes per digest); digests that repeat
// within trace 1 are reported as collisions and excluded from matching.
// Trace 2 then streams through scan() one digest at a time.
class IntersectTable {
 public:
  explicit IntersectTable(std::vector<UniqueDigest> i1);

  void scan(const UniqueDigest& u2);
  IntersectResult take_result();

  size_t memory_bytes() const noexcept;

 private:
  // Entry states, indexed like entries_.
  enum : uint8_t { kLive = 0, kDead = 1, kMatched = 2 };

  uint32_t* find_slot(const Digest128& hash);

  std::vector<UniqueDigest> entries_;
  std::vector<uint8_t> state_;
  std::vector<uint32_t> slots_;  // 1-based entry indices; 0 means empty
  uint64_t mask_ = 0;
  IntersectResult result_;
  bool taken_ = false;
};

IntersectResult intersect(std::vector<UniqueDigest> i1, std::span<const UniqueDigest> i2);

struct PruneResult {
  std::vector<ReferencePair> kept;      // sorted by (t1, t2)
  std::vector<ReferencePair> rejected;
};

// Drops pairs that cannot be real co-captures: first pairs whose clock offset
// t2-t1 deviates from the median offset of their `neighbor_window` nearest
// pairs by more than delta_max_us, then anything breaking joint monotonicity
// (t1 and t2 must advance together). Throws Errc::too_few_refs when fewer
// than two pairs survive.
PruneResult prune_invalid_references(std::vector<ReferencePair> pairs, int neighbor_window = 5,
                                     int64_t delta_max_us = 100000);

}  // namespace wimerge
