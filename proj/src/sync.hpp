// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "error.hpp"
#include "intersect.hpp"

namespace wimerge {

// One affine piece of a piecewise clock mapping. Stored anchored to the
// window's first reference: evaluation works on small deltas from the
// anchors, so epoch-scale microsecond timestamps keep full precision, which
// a plain a*t1 + b in doubles would not.
struct MappingSegment {
  uint64_t t1_start = 0;  // inclusive; the first segment also covers earlier times
  uint64_t t1_end = 0;    // exclusive; the last segment also covers later times
  double slope = 1.0;
  uint64_t t1_anchor = 0;  // first reference of the fit window
  uint64_t t2_anchor = 0;
  double x_center = 0.0;  // window centroid relative to the anchors
  double y_center = 0.0;

  double intercept_us() const noexcept {
    return (static_cast<double>(t2_anchor) + y_center) -
           slope * (static_cast<double>(t1_anchor) + x_center);
  }
};

// Piecewise affine map from trace-1 capture time to trace-2 capture time,
// fitted by least squares over sliding windows of w+1 reference pairs. Each
// reference anchors one segment; segment i is fitted on references
// i-floor(w/2) .. i+ceil(w/2) (clamped to the first/last w+1 at the edges)
// and applies from reference i to reference i+1.
class ClockMapping {
 public:
  static constexpr int kDefaultWindow = 2;

  // Pairs must be strictly increasing in both t1 and t2 (the pruned
  // reference list satisfies this). Requires at least w+1 pairs.
  static ClockMapping fit(std::span<const ReferencePair> pairs, int window_w = kDefaultWindow);

  static ClockMapping identity();

  // Mapped time in microseconds, rounded to nearest (ties away from zero).
  // May be negative for times far before the first reference.
  int64_t apply_us(uint64_t t1_us) const noexcept;
  double apply_exact(uint64_t t1_us) const noexcept;

  std::span<const MappingSegment> segments() const noexcept { return segments_; }

 private:
  const MappingSegment& segment_for(uint64_t t1_us) const noexcept;

  std::vector<MappingSegment> segments_;
};

// Mean absolute difference between mapped trace-1 times and trace-2 times
// over a shared set of (t1, t2) observations. Throws Errc::empty_set when
// the set is empty.
double average_sync_error_us(std::span<const std::pair<uint64_t, uint64_t>> shared,
                             const ClockMapping& mapping);

}  // namespace wimerge
