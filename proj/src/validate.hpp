// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "digest.hpp"
#include "frame80211.hpp"
#include "pcap_io.hpp"
#include "uniques.hpp"

namespace wimerge {

// An identifiable frame whose digest appears more than once in a single
// trace. In a well-formed merge result every such frame appears exactly once.
struct DuplicateUniqueGroup {
  Digest128 hash;
  std::vector<std::pair<uint64_t, uint64_t>> occurrences;  // (ordinal, ts_us)
};

// Two successive non-retransmitted data frames from one sender carrying the
// same sequence number and payload: a frame that should have been unified.
struct DuplicateDataAnomaly {
  MacAddr sender;
  uint16_t seq_num = 0;
  uint64_t ordinal_first = 0;
  uint64_t ordinal_second = 0;
  uint64_t ts_first_us = 0;
  uint64_t ts_second_us = 0;
};

std::vector<DuplicateUniqueGroup> find_duplicate_unique_frames(TraceReader& reader);
std::vector<DuplicateDataAnomaly> find_duplicate_data_frames(TraceReader& reader);

struct ValidationReport {
  std::vector<DuplicateUniqueGroup> duplicate_uniques;
  std::vector<DuplicateDataAnomaly> duplicate_data;
  uint64_t frames_scanned = 0;

  bool clean() const noexcept { return duplicate_uniques.empty() && duplicate_data.empty(); }
};

ValidationReport validate_trace(const std::string& path);

std::string format_report(const ValidationReport& report);

}  // namespace wimerge
