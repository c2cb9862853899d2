// SPDX-License-Identifier: Apache-2.0
#include "sync.hpp"

#include <algorithm>
#include <cmath>

namespace wimerge {

namespace {

// Clock rates this far from 1.0 mean the regression latched onto garbage;
// real oscillators are within tens of ppm.
constexpr double kMinSlope = 0.9;
constexpr double kMaxSlope = 1.1;

}  // namespace

ClockMapping ClockMapping::fit(std::span<const ReferencePair> pairs, int window_w) {
  if (window_w < 1) fail(Errc::usage, "regression window must be at least 1");
  const size_t n = pairs.size();
  const size_t m = static_cast<size_t>(window_w) + 1;  // points per fit
  if (n < m)
    fail(Errc::too_few_refs, "need at least " + std::to_string(m) + " reference pairs for w=" +
                                 std::to_string(window_w) + ", have " + std::to_string(n));
  for (size_t i = 1; i < n; ++i)
    if (pairs[i].t1_us <= pairs[i - 1].t1_us || pairs[i].t2_us <= pairs[i - 1].t2_us)
      fail(Errc::usage, "reference pairs must be strictly increasing in both clocks");

  ClockMapping out;
  out.segments_.reserve(n);
  const int64_t half_lo = window_w / 2;

  for (size_t i = 0; i < n; ++i) {
    int64_t lo = static_cast<int64_t>(i) - half_lo;
    int64_t hi = lo + window_w;
    if (lo < 0) {
      lo = 0;
      hi = window_w;
    }
    if (hi >= static_cast<int64_t>(n)) {
      hi = static_cast<int64_t>(n) - 1;
      lo = hi - window_w;
    }

    // Regress on deltas from the window's first reference. The deltas are
    // small, so none of the arithmetic here loses microseconds the way sums
    // of epoch-scale timestamps would.
    const uint64_t a1 = pairs[lo].t1_us;
    const uint64_t a2 = pairs[lo].t2_us;
    double sx = 0, sy = 0;
    for (int64_t j = lo; j <= hi; ++j) {
      sx += static_cast<double>(pairs[j].t1_us - a1);
      sy += static_cast<double>(pairs[j].t2_us - a2);
    }
    const double xbar = sx / static_cast<double>(m);
    const double ybar = sy / static_cast<double>(m);

    double sxx = 0, sxy = 0;
    for (int64_t j = lo; j <= hi; ++j) {
      const double dx = static_cast<double>(pairs[j].t1_us - a1) - xbar;
      const double dy = static_cast<double>(pairs[j].t2_us - a2) - ybar;
      sxx += dx * dx;
      sxy += dx * dy;
    }
    if (sxx == 0)
      fail(Errc::degenerate_window,
           "regression window at reference " + std::to_string(i) + " has no time spread");
    const double slope = sxy / sxx;
    if (!(slope > kMinSlope && slope < kMaxSlope))
      fail(Errc::degenerate_window, "implausible clock rate " + std::to_string(slope) +
                                        " fitted at reference " + std::to_string(i));

    MappingSegment seg;
    seg.t1_start = pairs[i].t1_us;
    seg.t1_end = i + 1 < n ? pairs[i + 1].t1_us : UINT64_MAX;
    seg.slope = slope;
    seg.t1_anchor = a1;
    seg.t2_anchor = a2;
    seg.x_center = xbar;
    seg.y_center = ybar;
    out.segments_.push_back(seg);
  }
  return out;
}

ClockMapping ClockMapping::identity() {
  ClockMapping out;
  MappingSegment seg;
  seg.t1_start = 0;
  seg.t1_end = UINT64_MAX;
  out.segments_.push_back(seg);
  return out;
}

const MappingSegment& ClockMapping::segment_for(uint64_t t1_us) const noexcept {
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t1_us,
      [](uint64_t t, const MappingSegment& s) { return t < s.t1_start; });
  if (it != segments_.begin()) --it;
  return *it;
}

double ClockMapping::apply_exact(uint64_t t1_us) const noexcept {
  const MappingSegment& s = segment_for(t1_us);
  const double rel =
      static_cast<double>(static_cast<int64_t>(t1_us) - static_cast<int64_t>(s.t1_anchor));
  return static_cast<double>(s.t2_anchor) + (s.y_center + s.slope * (rel - s.x_center));
}

int64_t ClockMapping::apply_us(uint64_t t1_us) const noexcept {
  return std::llround(apply_exact(t1_us));
}

double average_sync_error_us(std::span<const std::pair<uint64_t, uint64_t>> shared,
                             const ClockMapping& mapping) {
  if (shared.empty()) fail(Errc::empty_set, "no shared observations to evaluate");
  double sum = 0;
  for (const auto& [t1, t2] : shared) {
    int64_t diff = mapping.apply_us(t1) - static_cast<int64_t>(t2);
    sum += diff < 0 ? static_cast<double>(-diff) : static_cast<double>(diff);
  }
  return sum / static_cast<double>(shared.size());
}

}  // namespace wimerge
