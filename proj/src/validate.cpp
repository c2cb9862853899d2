// SPDX-License-Identifier: Apache-2.0
#include "validate.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <unordered_map>

namespace wimerge {

namespace {

struct DigestHasher {
  size_t operator()(const Digest128& d) const noexcept { return d.low64(); }
};

struct MacHasher {
  size_t operator()(const MacAddr& a) const noexcept {
    uint64_t v = 0;
    std::memcpy(&v, a.bytes.data(), 6);
    return v * 0x9E3779B97F4A7C15ull >> 16;
  }
};

// Last non-retransmitted data frame seen from one sender.
struct LastData {
  uint16_t seq_num = 0;
  uint64_t ordinal = 0;
  uint64_t ts_us = 0;
  std::vector<uint8_t> mac;
};

}  // namespace

std::vector<DuplicateUniqueGroup> find_duplicate_unique_frames(TraceReader& reader) {
  std::unordered_map<Digest128, std::vector<std::pair<uint64_t, uint64_t>>, DigestHasher> seen;
  for_each_unique(reader, [&](const UniqueDigest& u) {
    seen[u.hash].push_back({u.ordinal, u.ts_us});
  });

  std::vector<DuplicateUniqueGroup> out;
  for (auto& [hash, occ] : seen)
    if (occ.size() > 1) out.push_back({hash, std::move(occ)});
  std::sort(out.begin(), out.end(), [](const DuplicateUniqueGroup& a, const DuplicateUniqueGroup& b) {
    return a.occurrences.front().first < b.occurrences.front().first;
  });
  return out;
}

std::vector<DuplicateDataAnomaly> find_duplicate_data_frames(TraceReader& reader) {
  std::unordered_map<MacAddr, LastData, MacHasher> last_by_sender;
  std::vector<DuplicateDataAnomaly> out;

  FrameRecord rec;
  while (reader.next(rec)) {
    ParsedFrame f;
    try {
      f = parse_frame(rec);
    } catch (const Error& e) {
      if (e.code() != Errc::parse) throw;
      continue;
    }
    if (f.ftype != FrameType::data || f.retry) continue;
    auto id = sender_and_seq(f);
    if (!id) continue;

    auto mac = mac_bytes(rec, f);
    LastData& last = last_by_sender[id->first];
    if (!last.mac.empty() && last.seq_num == id->second && last.mac.size() == mac.size() &&
        std::equal(mac.begin(), mac.end(), last.mac.begin())) {
      out.push_back({id->first, id->second, last.ordinal, rec.ordinal, last.ts_us, rec.ts_us});
    }
    last.seq_num = id->second;
    last.ordinal = rec.ordinal;
    last.ts_us = rec.ts_us;
    last.mac.assign(mac.begin(), mac.end());
  }
  return out;
}

ValidationReport validate_trace(const std::string& path) {
  ValidationReport report;
  {
    TraceReader reader(path);
    report.duplicate_uniques = find_duplicate_unique_frames(reader);
    report.frames_scanned = reader.records_read();
  }
  {
    TraceReader reader(path);
    report.duplicate_data = find_duplicate_data_frames(reader);
  }
  return report;
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  os << "frames scanned: " << report.frames_scanned << "\n";
  os << "repeated identifiable frames: " << report.duplicate_uniques.size() << "\n";
  for (const DuplicateUniqueGroup& g : report.duplicate_uniques) {
    os << "  " << g.hash.hex() << " seen " << g.occurrences.size() << "x at records";
    for (auto& [ord, ts] : g.occurrences) os << " " << ord << " (t=" << ts << "us)";
    os << "\n";
  }
  os << "repeated data frames: " << report.duplicate_data.size() << "\n";
  for (const DuplicateDataAnomaly& a : report.duplicate_data)
    os << "  " << a.sender.str() << " seq " << a.seq_num << " records " << a.ordinal_first
       << " and " << a.ordinal_second << " (t=" << a.ts_first_us << "us, " << a.ts_second_us
       << "us)\n";
  os << (report.clean() ? "no anomalies\n" : "anomalies present\n");
  return os.str();
}

}  // namespace wimerge
