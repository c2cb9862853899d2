// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "digest.hpp"
#include "frame80211.hpp"
#include "pcap_io.hpp"

namespace wimerge {

// One identifiable frame: content digest plus where/when it was captured.
// Kept at 32 bytes so a few million of them stay cheap to hold.
struct UniqueDigest {
  Digest128 hash;
  uint64_t ts_us = 0;
  uint64_t ordinal = 0;

  friend bool operator==(const UniqueDigest&, const UniqueDigest&) = default;
};
static_assert(sizeof(UniqueDigest) == 32);

struct ExtractStats {
  uint64_t frames_scanned = 0;
  uint64_t candidates = 0;
  uint64_t malformed_skipped = 0;
};

// Digest of a unique-candidate record. The digest covers the MAC frame bytes
// only, so raw and radiotap captures of the same transmission agree.
UniqueDigest digest_frame(const FrameRecord& rec, const ParsedFrame& frame);

// Streams the trace once and calls fn(const UniqueDigest&) for every
// identifiable frame in capture order. Records that fail to parse are
// skipped and counted.
template <typename Fn>
void for_each_unique(TraceReader& reader, Fn&& fn, ExtractStats* stats = nullptr) {
  FrameRecord rec;
  ExtractStats local;
  while (reader.next(rec)) {
    ++local.frames_scanned;
    try {
      ParsedFrame f = parse_frame(rec);
      if (!is_unique_candidate(f)) continue;
      ++local.candidates;
      fn(digest_frame(rec, f));
    } catch (const Error& e) {
      if (e.code() != Errc::parse) throw;
      ++local.malformed_skipped;
    }
  }
  if (stats) *stats = local;
}

std::vector<UniqueDigest> extract_uniques(TraceReader& reader, ExtractStats* stats = nullptr);
std::vector<UniqueDigest> extract_uniques(const std::string& pcap_path,
                                          ExtractStats* stats = nullptr);

// Sidecar file format: flat little-endian records of
//   hash[16] | ts_us u64 | ordinal u64
// with no file header; the record count is the file size / 32.
void save_uniques(const std::vector<UniqueDigest>& uniques, const std::string& path);
std::vector<UniqueDigest> load_uniques(const std::string& path);

// Streaming extraction straight to a sidecar file; returns the record count.
uint64_t extract_uniques_to_file(const std::string& pcap_path, const std::string& sidecar_path,
                                 ExtractStats* stats = nullptr);

// Heap bytes held by a materialized digest vector.
size_t uniques_memory_bytes(const std::vector<UniqueDigest>& uniques) noexcept;

}  // namespace wimerge
