// SPDX-License-Identifier: Apache-2.0
#include "uniques.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <memory>

namespace wimerge {

namespace {

constexpr size_t kSidecarRecordLen = 32;

void store_u64le(uint8_t* p, uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint64_t load_u64le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t{p[i]} << (8 * i);
  return v;
}

void encode_record(const UniqueDigest& u, uint8_t* out) {
  std::memcpy(out, u.hash.bytes.data(), 16);
  store_u64le(out + 16, u.ts_us);
  store_u64le(out + 24, u.ordinal);
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_fail(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(Errc::io, path + ": open failed: " + std::strerror(errno));
  return f;
}

}  // namespace

UniqueDigest digest_frame(const FrameRecord& rec, const ParsedFrame& frame) {
  UniqueDigest u;
  u.hash = md5_digest(mac_bytes(rec, frame));
  u.ts_us = rec.ts_us;
  u.ordinal = rec.ordinal;
  return u;
}

std::vector<UniqueDigest> extract_uniques(TraceReader& reader, ExtractStats* stats) {
  std::vector<UniqueDigest> out;
  for_each_unique(reader, [&](const UniqueDigest& u) { out.push_back(u); }, stats);
  return out;
}

std::vector<UniqueDigest> extract_uniques(const std::string& pcap_path, ExtractStats* stats) {
  TraceReader reader(pcap_path);
  return extract_uniques(reader, stats);
}

void save_uniques(const std::vector<UniqueDigest>& uniques, const std::string& path) {
  FilePtr f = open_or_fail(path, "wb");
  uint8_t buf[kSidecarRecordLen];
  for (const UniqueDigest& u : uniques) {
    encode_record(u, buf);
    if (std::fwrite(buf, 1, sizeof buf, f.get()) != sizeof buf)
      fail(Errc::io, path + ": write failed: " + std::strerror(errno));
  }
  if (std::fflush(f.get()) != 0) fail(Errc::io, path + ": write failed: " + std::strerror(errno));
}

std::vector<UniqueDigest> load_uniques(const std::string& path) {
  FilePtr f = open_or_fail(path, "rb");
  std::vector<UniqueDigest> out;
  uint8_t buf[kSidecarRecordLen];
  for (;;) {
    size_t got = std::fread(buf, 1, sizeof buf, f.get());
    if (got == 0 && std::feof(f.get())) break;
    if (got != sizeof buf) fail(Errc::truncated, path + ": truncated digest record");
    UniqueDigest u;
    std::memcpy(u.hash.bytes.data(), buf, 16);
    u.ts_us = load_u64le(buf + 16);
    u.ordinal = load_u64le(buf + 24);
    out.push_back(u);
  }
  return out;
}

uint64_t extract_uniques_to_file(const std::string& pcap_path, const std::string& sidecar_path,
                                 ExtractStats* stats) {
  TraceReader reader(pcap_path);
  FilePtr f = open_or_fail(sidecar_path, "wb");
  uint64_t count = 0;
  uint8_t buf[kSidecarRecordLen];
  for_each_unique(
      reader,
      [&](const UniqueDigest& u) {
        encode_record(u, buf);
        if (std::fwrite(buf, 1, sizeof buf, f.get()) != sizeof buf)
          fail(Errc::io, sidecar_path + ": write failed: " + std::strerror(errno));
        ++count;
      },
      stats);
  if (std::fflush(f.get()) != 0)
    fail(Errc::io, sidecar_path + ": write failed: " + std::strerror(errno));
  return count;
}

size_t uniques_memory_bytes(const std::vector<UniqueDigest>& uniques) noexcept {
  return uniques.capacity() * sizeof(UniqueDigest);
}

}  // namespace wimerge
