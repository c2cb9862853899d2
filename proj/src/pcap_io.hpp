// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace wimerge {

inline constexpr uint32_t kLinktypeIeee80211 = 105;  // raw 802.11 frames
inline constexpr uint32_t kLinktypeRadiotap = 127;   // radiotap + 802.11

// Classic pcap stores seconds in 32 bits, so the largest representable
// timestamp is (2^32 - 1) s + 999999 us.
inline constexpr uint64_t kMaxPcapTimestampUs = 0xFFFFFFFFull * 1000000ull + 999999ull;

struct TraceHeader {
  uint16_t version_major = 2;
  uint16_t version_minor = 4;
  uint32_t snaplen = 65535;
  uint32_t linktype = kLinktypeIeee80211;
  bool swapped = false;  // file byte order differs from host
};

struct FrameRecord {
  uint64_t ts_us = 0;
  uint32_t captured_len = 0;
  uint32_t original_len = 0;
  uint32_t linktype = kLinktypeIeee80211;  // from the containing trace header
  uint64_t ordinal = 0;                    // 0-based position in the trace
  std::vector<uint8_t> payload;
};

class TraceReader {
 public:
  explicit TraceReader(const std::string& path);

  const TraceHeader& header() const noexcept { return header_; }
  const std::string& path() const noexcept { return path_; }

  // Fills `out` with the next record, reusing its payload buffer. Returns
  // false at end of file. Throws on truncated or implausible records.
  bool next(FrameRecord& out);

  uint64_t records_read() const noexcept { return next_ordinal_; }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };

  std::unique_ptr<std::FILE, FileCloser> file_;
  std::vector<char> iobuf_;
  TraceHeader header_;
  std::string path_;
  uint64_t next_ordinal_ = 0;
};

class TraceWriter {
 public:
  TraceWriter(const std::string& path, const TraceHeader& header);
  ~TraceWriter();

  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  const TraceHeader& header() const noexcept { return header_; }
  uint64_t records_written() const noexcept { return count_; }

  void append(const FrameRecord& rec);
  void append_raw(uint64_t ts_us, uint32_t linktype, std::span<const uint8_t> payload,
                  uint32_t original_len = 0);

  // Flushes and closes, reporting write errors. The destructor closes
  // silently if this was not called.
  void close();

 private:
  std::FILE* file_ = nullptr;
  std::vector<char> iobuf_;
  TraceHeader header_;
  std::string path_;
  uint64_t count_ = 0;
};

// Convenience for tests and small tools; not for multi-GB traces.
std::vector<FrameRecord> read_all_records(const std::string& path);

}  // namespace wimerge
