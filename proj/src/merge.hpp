// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "frame80211.hpp"
#include "pcap_io.hpp"
#include "sync.hpp"

namespace wimerge {

struct MergeOptions {
  int window_w = ClockMapping::kDefaultWindow;
  int neighbor_window = 5;        // reference pruning: nearest neighbors consulted
  int64_t delta_max_us = 100000;  // reference pruning: allowed offset deviation
  int64_t dup_threshold_us = 106; // |mapped t1 - t2| strictly below this unifies
};

struct MergeStats {
  uint64_t frames_in_1 = 0;
  uint64_t frames_in_2 = 0;
  uint64_t duplicates_unified = 0;
  uint64_t frames_out = 0;
  // Mean |mapped t1 - t2| over the frames that were unified.
  double avg_sync_error_us = 0.0;
  uint64_t references_found = 0;
  uint64_t references_used = 0;
  uint64_t references_rejected = 0;
  uint64_t collisions_filtered = 0;
  uint64_t cross_trace_suspects = 0;
  // Diagnostics: output timestamps that went backwards, mapped timestamps
  // clamped at zero, and frames dropped because they could not be rewritten
  // to the output linktype.
  uint64_t order_violations_out = 0;
  uint64_t clamped_timestamps = 0;
  uint64_t malformed_dropped = 0;
};

// True when both records carry the same MAC frame bytes (PHY headers and
// FCS excluded). Records that fail to parse are never identical.
bool content_identical(const FrameRecord& a, const FrameRecord& b);

// Two-cursor merge of chronologically ordered traces. Trace-1 timestamps are
// mapped through `mapping` into trace-2's clock; the earlier head frame is
// copied to the output. Head frames with identical contents and mapped times
// closer than dup_threshold_us are written once, keeping trace 2's copy.
// Frames whose linktype differs from the writer's are rewritten to bare MAC
// bytes. `out` may be null for a dry run (stats only).
MergeStats merge_traces(TraceReader& t1, TraceReader& t2, const ClockMapping& mapping,
                        TraceWriter* out, int64_t dup_threshold_us = 106);

// Full pipeline on files: digest extraction, hash-join intersection,
// reference pruning, regression, merge. Empty out_path = dry run. The output
// linktype is trace 2's when both agree, otherwise raw 802.11.
MergeStats merge_files(const std::string& path1, const std::string& path2,
                       const std::string& out_path, const MergeOptions& opts = {});

using MergeStepFn = std::function<void(size_t step, const MergeStats&)>;

// Left fold over three or more traces: ((p0+p1)+p2)+... Intermediate results
// go to temporary files next to out_path and are removed afterwards. A
// failing step reports which merge it was.
MergeStats merge_many(const std::vector<std::string>& paths, const std::string& out_path,
                      const MergeOptions& opts = {}, const MergeStepFn& on_step = {});

}  // namespace wimerge
