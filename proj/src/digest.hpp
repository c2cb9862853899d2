// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace wimerge {

// 16-byte content digest of a frame's MAC bytes. Collisions are possible and
// are filtered out downstream, so any well-mixed 128-bit hash works; we use
// MD5 from libcrypto.
struct Digest128 {
  std::array<uint8_t, 16> bytes{};

  friend bool operator==(const Digest128&, const Digest128&) = default;
  friend auto operator<=>(const Digest128&, const Digest128&) = default;

  // First 8 bytes as an integer. MD5 output is uniform, so this is directly
  // usable as a hash table index.
  uint64_t low64() const noexcept {
    uint64_t v;
    std::memcpy(&v, bytes.data(), sizeof v);
    return v;
  }

  std::string hex() const;
};

Digest128 md5_digest(std::span<const uint8_t> data);

}  // namespace wimerge
