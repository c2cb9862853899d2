// SPDX-License-Identifier: Apache-2.0
#include "intersect.hpp"

#include <algorithm>
#include <cassert>

namespace wimerge {

namespace {

uint64_t table_size_for(size_t n) {
  // Power of two, load factor <= 0.7.
  uint64_t size = 16;
  while (size * 7 < uint64_t{n} * 10) size <<= 1;
  return size;
}

}  // namespace

IntersectTable::IntersectTable(std::vector<UniqueDigest> i1) : entries_(std::move(i1)) {
  state_.assign(entries_.size(), kLive);
  uint64_t size = table_size_for(entries_.size());
  mask_ = size - 1;
  slots_.assign(size, 0);

  for (size_t i = 0; i < entries_.size(); ++i) {
    uint32_t* slot = find_slot(entries_[i].hash);
    if (*slot == 0) {
      *slot = static_cast<uint32_t>(i) + 1;
      continue;
    }
    // Same digest seen again within trace 1: poison the first occurrence and
    // record the collision. Later occurrences never enter the slot table.
    uint32_t first = *slot - 1;
    if (state_[first] == kLive) {
      state_[first] = kDead;
      result_.collisions.push_back({entries_[i].hash, 2});
    } else {
      for (CollisionReport& c : result_.collisions)
        if (c.hash == entries_[i].hash) {
          ++c.count;
          break;
        }
    }
  }
}

uint32_t* IntersectTable::find_slot(const Digest128& hash) {
  uint64_t idx = hash.low64() & mask_;
  for (;;) {
    uint32_t v = slots_[idx];
    if (v == 0 || entries_[v - 1].hash == hash) return &slots_[idx];
    idx = (idx + 1) & mask_;
  }
}

void IntersectTable::scan(const UniqueDigest& u2) {
  assert(!taken_);
  uint32_t slot = *find_slot(u2.hash);
  if (slot == 0) return;
  uint32_t i = slot - 1;
  if (state_[i] == kDead) return;
  if (state_[i] == kMatched) ++result_.cross_trace_suspects;
  state_[i] = kMatched;
  const UniqueDigest& e = entries_[i];
  result_.pairs.push_back({e.hash, e.ts_us, u2.ts_us, e.ordinal, u2.ordinal});
}

IntersectResult IntersectTable::take_result() {
  taken_ = true;
  return std::move(result_);
}

size_t IntersectTable::memory_bytes() const noexcept {
  return entries_.capacity() * sizeof(UniqueDigest) + state_.capacity() +
         slots_.capacity() * sizeof(uint32_t);
}

IntersectResult intersect(std::vector<UniqueDigest> i1, std::span<const UniqueDigest> i2) {
  IntersectTable table(std::move(i1));
  for (const UniqueDigest& u : i2) table.scan(u);
  return table.take_result();
}

PruneResult prune_invalid_references(std::vector<ReferencePair> pairs, int neighbor_window,
                                     int64_t delta_max_us) {
  if (neighbor_window < 1) fail(Errc::usage, "neighbor window must be at least 1");
  if (delta_max_us < 0) fail(Errc::usage, "offset deviation bound must be non-negative");

  std::stable_sort(pairs.begin(), pairs.end(), [](const ReferencePair& a, const ReferencePair& b) {
    if (a.t1_us != b.t1_us) return a.t1_us < b.t1_us;
    return a.t2_us < b.t2_us;
  });

  const size_t n = pairs.size();
  PruneResult out;

  // Offset filter: compare each pair's t2-t1 against the median offset of its
  // nearest neighbors in t1 order.
  std::vector<int64_t> offset(n);
  for (size_t i = 0; i < n; ++i)
    offset[i] = static_cast<int64_t>(pairs[i].t2_us) - static_cast<int64_t>(pairs[i].t1_us);

  const size_t w = std::min<size_t>(neighbor_window, n > 0 ? n - 1 : 0);
  std::vector<char> pass(n, 1);
  std::vector<int64_t> window;
  window.reserve(w);
  for (size_t i = 0; i < n && w > 0; ++i) {
    size_t lo = i, hi = i;
    while (hi - lo < w) {
      bool can_lo = lo > 0, can_hi = hi + 1 < n;
      if (can_lo && (!can_hi || i - (lo - 1) <= (hi + 1) - i))
        --lo;
      else if (can_hi)
        ++hi;
      else
        break;
    }
    window.clear();
    for (size_t j = lo; j <= hi; ++j)
      if (j != i) window.push_back(offset[j]);
    size_t mid = (window.size() - 1) / 2;
    std::nth_element(window.begin(), window.begin() + mid, window.end());
    int64_t median = window[mid];
    int64_t dev = offset[i] - median;
    if (dev < 0) dev = -dev;
    if (dev > delta_max_us) pass[i] = 0;
  }

  // Monotonicity: both clocks must advance strictly between kept pairs.
  bool have_prev = false;
  uint64_t prev_t1 = 0, prev_t2 = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!pass[i]) {
      out.rejected.push_back(pairs[i]);
      continue;
    }
    if (have_prev && (pairs[i].t1_us <= prev_t1 || pairs[i].t2_us <= prev_t2)) {
      out.rejected.push_back(pairs[i]);
      continue;
    }
    prev_t1 = pairs[i].t1_us;
    prev_t2 = pairs[i].t2_us;
    have_prev = true;
    out.kept.push_back(pairs[i]);
  }

  if (out.kept.size() < 2)
    fail(Errc::too_few_refs, "only " + std::to_string(out.kept.size()) +
                                 " usable reference pairs after pruning (need at least 2)");
  return out;
}

}  // namespace wimerge
