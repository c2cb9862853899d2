// SPDX-License-Identifier: Apache-2.0
#include "pcap_io.hpp"

#include <cerrno>
#include <cstring>

namespace wimerge {

namespace {

constexpr uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr uint32_t kMagicUsecSwapped = 0xd4c3b2a1;
constexpr uint32_t kMagicNsec = 0xa1b23c4d;
constexpr uint32_t kMagicNsecSwapped = 0x4d3cb2a1;

constexpr size_t kGlobalHeaderLen = 24;
constexpr size_t kRecordHeaderLen = 16;
constexpr size_t kIoBufLen = 1 << 20;

// Anything above this is treated as a corrupt length field rather than an
// attempt to allocate gigabytes.
constexpr uint32_t kMaxRecordLen = 1u << 26;

uint32_t load_u32(const uint8_t* p, bool swapped) {
  uint32_t v;
  std::memcpy(&v, p, sizeof v);
  return swapped ? __builtin_bswap32(v) : v;
}

uint16_t load_u16(const uint8_t* p, bool swapped) {
  uint16_t v;
  std::memcpy(&v, p, sizeof v);
  return swapped ? __builtin_bswap16(v) : v;
}

void store_u32(uint8_t* p, uint32_t v) { std::memcpy(p, &v, sizeof v); }
void store_u16(uint8_t* p, uint16_t v) { std::memcpy(p, &v, sizeof v); }

std::string io_msg(const std::string& path, const char* what) {
  return path + ": " + what + ": " + std::strerror(errno);
}

}  // namespace

TraceReader::TraceReader(const std::string& path) : path_(path) {
  file_.reset(std::fopen(path.c_str(), "rb"));
  if (!file_) fail(Errc::io, io_msg(path, "open failed"));
  iobuf_.resize(kIoBufLen);
  std::setvbuf(file_.get(), iobuf_.data(), _IOFBF, iobuf_.size());

  uint8_t hdr[kGlobalHeaderLen];
  size_t got = std::fread(hdr, 1, sizeof hdr, file_.get());
  if (got != sizeof hdr) fail(Errc::truncated, path + ": file shorter than a capture header");

  uint32_t magic = load_u32(hdr, false);
  switch (magic) {
    case kMagicUsec:
      header_.swapped = false;
      break;
    case kMagicUsecSwapped:
      header_.swapped = true;
      break;
    case kMagicNsec:
    case kMagicNsecSwapped:
      fail(Errc::bad_magic, path + ": nanosecond-resolution capture not supported");
    default:
      fail(Errc::bad_magic, path + ": not a pcap capture (bad magic)");
  }

  header_.version_major = load_u16(hdr + 4, header_.swapped);
  header_.version_minor = load_u16(hdr + 6, header_.swapped);
  header_.snaplen = load_u32(hdr + 16, header_.swapped);
  header_.linktype = load_u32(hdr + 20, header_.swapped);

  if (header_.linktype != kLinktypeIeee80211 && header_.linktype != kLinktypeRadiotap)
    fail(Errc::bad_linktype,
         path + ": linktype " + std::to_string(header_.linktype) +
             " is not an 802.11 capture (expected 105 or 127)");
}

bool TraceReader::next(FrameRecord& out) {
  uint8_t hdr[kRecordHeaderLen];
  size_t got = std::fread(hdr, 1, sizeof hdr, file_.get());
  if (got == 0 && std::feof(file_.get())) return false;
  if (got != sizeof hdr)
    fail(Errc::truncated,
         path_ + ": record " + std::to_string(next_ordinal_) + ": truncated record header");

  uint32_t ts_sec = load_u32(hdr, header_.swapped);
  uint32_t ts_usec = load_u32(hdr + 4, header_.swapped);
  uint32_t incl_len = load_u32(hdr + 8, header_.swapped);
  uint32_t orig_len = load_u32(hdr + 12, header_.swapped);

  if (ts_usec > 999999)
    fail(Errc::truncated, path_ + ": record " + std::to_string(next_ordinal_) +
                              ": microsecond field out of range");
  if (incl_len > kMaxRecordLen)
    fail(Errc::truncated, path_ + ": record " + std::to_string(next_ordinal_) +
                              ": implausible record length " + std::to_string(incl_len));

  out.payload.resize(incl_len);
  if (incl_len > 0) {
    got = std::fread(out.payload.data(), 1, incl_len, file_.get());
    if (got != incl_len)
      fail(Errc::truncated,
           path_ + ": record " + std::to_string(next_ordinal_) + ": truncated record body");
  }

  out.ts_us = uint64_t{ts_sec} * 1000000ull + ts_usec;
  out.captured_len = incl_len;
  out.original_len = orig_len;
  out.linktype = header_.linktype;
  out.ordinal = next_ordinal_++;
  return true;
}

TraceWriter::TraceWriter(const std::string& path, const TraceHeader& header)
    : header_(header), path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) fail(Errc::io, io_msg(path, "open failed"));
  iobuf_.resize(kIoBufLen);
  std::setvbuf(file_, iobuf_.data(), _IOFBF, iobuf_.size());

  uint8_t hdr[kGlobalHeaderLen] = {};
  store_u32(hdr, kMagicUsec);
  store_u16(hdr + 4, header_.version_major);
  store_u16(hdr + 6, header_.version_minor);
  // thiszone and sigfigs stay zero
  store_u32(hdr + 16, header_.snaplen);
  store_u32(hdr + 20, header_.linktype);
  if (std::fwrite(hdr, 1, sizeof hdr, file_) != sizeof hdr) {
    std::fclose(file_);
    file_ = nullptr;
    fail(Errc::io, io_msg(path, "write failed"));
  }
}

TraceWriter::~TraceWriter() {
  if (file_) std::fclose(file_);
}

void TraceWriter::append(const FrameRecord& rec) {
  append_raw(rec.ts_us, rec.linktype, rec.payload, rec.original_len);
}

void TraceWriter::append_raw(uint64_t ts_us, uint32_t linktype, std::span<const uint8_t> payload,
                             uint32_t original_len) {
  if (!file_) fail(Errc::io, path_ + ": writer already closed");
  if (linktype != header_.linktype)
    fail(Errc::mixed_linktype, path_ + ": record linktype " + std::to_string(linktype) +
                                   " does not match trace linktype " +
                                   std::to_string(header_.linktype));
  if (ts_us > kMaxPcapTimestampUs)
    fail(Errc::timestamp_range,
         path_ + ": timestamp " + std::to_string(ts_us) + "us does not fit a 32-bit pcap header");
  if (payload.size() > kMaxRecordLen)
    fail(Errc::usage, path_ + ": record larger than the supported maximum");

  uint32_t incl = static_cast<uint32_t>(payload.size());
  uint32_t orig = original_len > incl ? original_len : incl;

  uint8_t hdr[kRecordHeaderLen];
  store_u32(hdr, static_cast<uint32_t>(ts_us / 1000000ull));
  store_u32(hdr + 4, static_cast<uint32_t>(ts_us % 1000000ull));
  store_u32(hdr + 8, incl);
  store_u32(hdr + 12, orig);

  if (std::fwrite(hdr, 1, sizeof hdr, file_) != sizeof hdr)
    fail(Errc::io, io_msg(path_, "write failed"));
  if (!payload.empty() && std::fwrite(payload.data(), 1, payload.size(), file_) != payload.size())
    fail(Errc::io, io_msg(path_, "write failed"));
  ++count_;
}

void TraceWriter::close() {
  if (!file_) return;
  int flush_rc = std::fflush(file_);
  int close_rc = std::fclose(file_);
  file_ = nullptr;
  if (flush_rc != 0 || close_rc != 0) fail(Errc::io, io_msg(path_, "close failed"));
}

std::vector<FrameRecord> read_all_records(const std::string& path) {
  TraceReader reader(path);
  std::vector<FrameRecord> out;
  FrameRecord rec;
  while (reader.next(rec)) out.push_back(rec);
  return out;
}

}  // namespace wimerge
