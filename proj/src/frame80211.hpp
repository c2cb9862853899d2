// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "error.hpp"
#include "pcap_io.hpp"

namespace wimerge {

struct MacAddr {
  std::array<uint8_t, 6> bytes{};

  friend bool operator==(const MacAddr&, const MacAddr&) = default;
  friend auto operator<=>(const MacAddr&, const MacAddr&) = default;

  std::string str() const;  // "aa:bb:cc:dd:ee:ff"
};

enum class FrameType : uint8_t { management = 0, control = 1, data = 2, extension = 3 };

// Management subtypes we care about.
inline constexpr uint8_t kSubtypeProbeResponse = 5;
inline constexpr uint8_t kSubtypeBeacon = 8;

struct ParsedFrame {
  FrameType ftype = FrameType::management;
  uint8_t subtype = 0;
  bool retry = false;
  std::optional<uint16_t> seq_num;  // 12-bit sequence number
  std::optional<MacAddr> addr1;
  std::optional<MacAddr> addr2;
  std::optional<MacAddr> addr3;
  // Sender-clock timestamp embedded in beacon / probe response bodies.
  std::optional<uint64_t> mgmt_timestamp;
  uint32_t mac_offset = 0;  // where the MAC frame starts inside the payload
  bool fcs_present = false;
};

// Decodes the MAC header; for radiotap captures walks the radiotap header
// first (only the Flags field is interpreted, for FCS presence). Throws
// Error(Errc::parse) when the payload cannot carry a Frame Control field or
// the radiotap header is malformed.
ParsedFrame parse_frame(std::span<const uint8_t> payload, uint32_t linktype);

inline ParsedFrame parse_frame(const FrameRecord& rec) {
  return parse_frame(std::span<const uint8_t>(rec.payload), rec.linktype);
}

// Frames whose single transmission is identifiable across captures: beacons,
// plus probe responses that are not retransmissions.
bool is_unique_candidate(const ParsedFrame& frame) noexcept;

// Transmitter address and sequence number, when the frame carries both.
std::optional<std::pair<MacAddr, uint16_t>> sender_and_seq(const ParsedFrame& frame) noexcept;

// The MAC frame bytes of a capture record: PHY header stripped, FCS trimmed
// when the capture flags one.
std::span<const uint8_t> mac_bytes(std::span<const uint8_t> payload,
                                   const ParsedFrame& frame) noexcept;

inline std::span<const uint8_t> mac_bytes(const FrameRecord& rec, const ParsedFrame& frame) noexcept {
  return mac_bytes(std::span<const uint8_t>(rec.payload), frame);
}

}  // namespace wimerge
