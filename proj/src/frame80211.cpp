// SPDX-License-Identifier: Apache-2.0
#include "frame80211.hpp"

#include <cstdio>
#include <cstring>

namespace wimerge {

namespace {

uint16_t le16(std::span<const uint8_t> p, size_t off) {
  return static_cast<uint16_t>(p[off] | (p[off + 1] << 8));
}

uint32_t le32(std::span<const uint8_t> p, size_t off) {
  return le16(p, off) | (uint32_t{le16(p, off + 2)} << 16);
}

uint64_t le64(std::span<const uint8_t> p, size_t off) {
  return le32(p, off) | (uint64_t{le32(p, off + 4)} << 32);
}

constexpr uint32_t kRadiotapTsft = 1u << 0;
constexpr uint32_t kRadiotapFlags = 1u << 1;
constexpr uint32_t kRadiotapExt = 1u << 31;
constexpr uint8_t kRadiotapFlagFcs = 0x10;

// Returns the radiotap header length and whether the Flags field says the
// frame ends with an FCS.
std::pair<uint16_t, bool> walk_radiotap(std::span<const uint8_t> p) {
  if (p.size() < 8) fail(Errc::parse, "radiotap header truncated");
  if (p[0] != 0)
    fail(Errc::parse, "unsupported radiotap version " + std::to_string(p[0]));
  uint16_t rt_len = le16(p, 2);
  if (rt_len < 8 || rt_len > p.size())
    fail(Errc::parse, "radiotap length " + std::to_string(rt_len) + " exceeds capture");

  uint32_t first_present = le32(p, 4);
  size_t n_words = 1;
  uint32_t word = first_present;
  while (word & kRadiotapExt) {
    if (4 + (n_words + 1) * 4 > rt_len)
      fail(Errc::parse, "radiotap present chain exceeds header");
    word = le32(p, 4 + n_words * 4);
    ++n_words;
  }

  // Fields follow the present words. TSFT (u64, 8-byte aligned) is the only
  // field that can precede Flags; everything after Flags is irrelevant here.
  size_t cursor = 4 + 4 * n_words;
  if (first_present & kRadiotapTsft) {
    cursor = (cursor + 7) & ~size_t{7};
    cursor += 8;
  }
  bool fcs = false;
  if (first_present & kRadiotapFlags) {
    if (cursor >= rt_len) fail(Errc::parse, "radiotap flags field outside header");
    fcs = (p[cursor] & kRadiotapFlagFcs) != 0;
  }
  return {rt_len, fcs};
}

}  // namespace

std::string MacAddr::str() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", bytes[0], bytes[1], bytes[2],
                bytes[3], bytes[4], bytes[5]);
  return buf;
}

ParsedFrame parse_frame(std::span<const uint8_t> payload, uint32_t linktype) {
  ParsedFrame f;
  size_t off = 0;
  if (linktype == kLinktypeRadiotap) {
    auto [rt_len, fcs] = walk_radiotap(payload);
    off = rt_len;
    f.fcs_present = fcs;
  } else if (linktype != kLinktypeIeee80211) {
    fail(Errc::parse, "unsupported linktype " + std::to_string(linktype));
  }
  f.mac_offset = static_cast<uint32_t>(off);

  if (payload.size() < off + 2) fail(Errc::parse, "frame shorter than its Frame Control field");
  auto mac = payload.subspan(off);
  size_t usable = mac.size();
  if (f.fcs_present && usable >= 4) usable -= 4;

  uint8_t fc0 = mac[0];
  uint8_t fc1 = mac[1];
  f.ftype = static_cast<FrameType>((fc0 >> 2) & 0x3);
  f.subtype = (fc0 >> 4) & 0xF;
  f.retry = (fc1 & 0x08) != 0;

  auto read_addr = [&](size_t pos) -> std::optional<MacAddr> {
    if (usable < pos + 6) return std::nullopt;
    MacAddr a;
    std::memcpy(a.bytes.data(), mac.data() + pos, 6);
    return a;
  };

  switch (f.ftype) {
    case FrameType::management:
    case FrameType::data:
      f.addr1 = read_addr(4);
      f.addr2 = read_addr(10);
      f.addr3 = read_addr(16);
      if (usable >= 24) f.seq_num = static_cast<uint16_t>(le16(mac, 22) >> 4);
      break;
    case FrameType::control:
      f.addr1 = read_addr(4);
      break;
    case FrameType::extension:
      break;
  }

  if (f.ftype == FrameType::management &&
      (f.subtype == kSubtypeBeacon || f.subtype == kSubtypeProbeResponse) && usable >= 32)
    f.mgmt_timestamp = le64(mac, 24);

  return f;
}

bool is_unique_candidate(const ParsedFrame& frame) noexcept {
  if (frame.ftype != FrameType::management || !frame.mgmt_timestamp) return false;
  if (frame.subtype == kSubtypeBeacon) return true;
  return frame.subtype == kSubtypeProbeResponse && !frame.retry;
}

std::optional<std::pair<MacAddr, uint16_t>> sender_and_seq(const ParsedFrame& frame) noexcept {
  if (frame.ftype != FrameType::management && frame.ftype != FrameType::data) return std::nullopt;
  if (!frame.addr2 || !frame.seq_num) return std::nullopt;
  return std::pair{*frame.addr2, *frame.seq_num};
}

std::span<const uint8_t> mac_bytes(std::span<const uint8_t> payload,
                                   const ParsedFrame& frame) noexcept {
  auto mac = payload.subspan(frame.mac_offset);
  if (frame.fcs_present && mac.size() >= 4) mac = mac.first(mac.size() - 4);
  return mac;
}

}  // namespace wimerge
