// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "frame80211.hpp"
#include "testutil.hpp"

using namespace wimerge;
namespace tu = testutil;

namespace {
ParsedFrame parse_raw(const std::vector<uint8_t>& bytes) {
  return parse_frame(std::span<const uint8_t>(bytes), kLinktypeIeee80211);
}
ParsedFrame parse_rt(const std::vector<uint8_t>& bytes) {
  return parse_frame(std::span<const uint8_t>(bytes), kLinktypeRadiotap);
}
}  // namespace

TEST_CASE("beacon fields decode from raw 802.11 bytes") {
  auto bytes = tu::beacon_frame(3, 1234, 0x0102030405060708ull);
  ParsedFrame f = parse_raw(bytes);
  CHECK(f.ftype == FrameType::management);
  CHECK(f.subtype == kSubtypeBeacon);
  CHECK_FALSE(f.retry);
  CHECK(f.mac_offset == 0);
  CHECK_FALSE(f.fcs_present);
  REQUIRE(f.seq_num.has_value());
  CHECK(*f.seq_num == 1234);
  REQUIRE(f.addr1.has_value());
  CHECK(f.addr1->bytes == tu::kBcast);
  REQUIRE(f.addr2.has_value());
  CHECK(f.addr2->bytes == tu::mac(3));
  REQUIRE(f.addr3.has_value());
  CHECK(f.addr3->bytes == tu::mac(3));
  REQUIRE(f.mgmt_timestamp.has_value());
  CHECK(*f.mgmt_timestamp == 0x0102030405060708ull);
  CHECK(f.addr2->str() == "02:00:00:00:00:03");
}

TEST_CASE("probe response and retry flag decode") {
  auto fresh = tu::probe_resp_frame(1, 9, 77, 42, false);
  auto again = tu::probe_resp_frame(1, 9, 77, 42, true);
  ParsedFrame a = parse_raw(fresh);
  ParsedFrame b = parse_raw(again);
  CHECK(a.subtype == kSubtypeProbeResponse);
  CHECK_FALSE(a.retry);
  CHECK(b.retry);
  CHECK(*b.seq_num == 77);
}

TEST_CASE("data frame carries sender and sequence") {
  auto bytes = tu::data_frame(5, 6, 400, {1, 2, 3}, false);
  ParsedFrame f = parse_raw(bytes);
  CHECK(f.ftype == FrameType::data);
  auto ss = sender_and_seq(f);
  REQUIRE(ss.has_value());
  CHECK(ss->first.bytes == tu::mac(5));
  CHECK(ss->second == 400);
  CHECK_FALSE(f.mgmt_timestamp.has_value());
}

TEST_CASE("control frames expose only the receiver address") {
  auto bytes = tu::ack_frame(7);
  ParsedFrame f = parse_raw(bytes);
  CHECK(f.ftype == FrameType::control);
  REQUIRE(f.addr1.has_value());
  CHECK(f.addr1->bytes == tu::mac(7));
  CHECK_FALSE(f.addr2.has_value());
  CHECK_FALSE(f.seq_num.has_value());
  CHECK_FALSE(sender_and_seq(f).has_value());
}

TEST_CASE("short management captures degrade gracefully") {
  auto whole = tu::beacon_frame(1, 10, 999);

  SUBCASE("header only, no body timestamp") {
    std::vector<uint8_t> cut(whole.begin(), whole.begin() + 24);
    ParsedFrame f = parse_raw(cut);
    CHECK(f.subtype == kSubtypeBeacon);
    CHECK(f.seq_num.has_value());
    CHECK_FALSE(f.mgmt_timestamp.has_value());
  }
  SUBCASE("addresses cut off") {
    std::vector<uint8_t> cut(whole.begin(), whole.begin() + 12);
    ParsedFrame f = parse_raw(cut);
    REQUIRE(f.addr1.has_value());
    CHECK_FALSE(f.addr2.has_value());
    CHECK_FALSE(f.seq_num.has_value());
  }
  SUBCASE("one byte is not a frame") {
    std::vector<uint8_t> cut = {0x80};
    CHECK_THROWS_AS(parse_raw(cut), Error);
  }
}

TEST_CASE("radiotap header walks to the MAC frame") {
  auto mac = tu::beacon_frame(2, 500, 123456);

  SUBCASE("flags only, no FCS") {
    auto bytes = tu::radiotap_wrap(mac, false);
    ParsedFrame f = parse_rt(bytes);
    CHECK(f.mac_offset == 10);
    CHECK_FALSE(f.fcs_present);
    CHECK(f.subtype == kSubtypeBeacon);
    CHECK(*f.mgmt_timestamp == 123456);
    auto mb = mac_bytes(std::span<const uint8_t>(bytes), f);
    CHECK(std::vector<uint8_t>(mb.begin(), mb.end()) == mac);
  }
  SUBCASE("FCS flagged and trimmed") {
    auto bytes = tu::radiotap_wrap(mac, true);
    ParsedFrame f = parse_rt(bytes);
    CHECK(f.fcs_present);
    auto mb = mac_bytes(std::span<const uint8_t>(bytes), f);
    CHECK(std::vector<uint8_t>(mb.begin(), mb.end()) == mac);
  }
  SUBCASE("TSFT forces 8-byte alignment before flags") {
    auto bytes = tu::radiotap_wrap(mac, true, /*tsft=*/true, 0xabcdef);
    ParsedFrame f = parse_rt(bytes);
    CHECK(f.mac_offset == 18);
    CHECK(f.fcs_present);
    auto mb = mac_bytes(std::span<const uint8_t>(bytes), f);
    CHECK(std::vector<uint8_t>(mb.begin(), mb.end()) == mac);
  }
}

TEST_CASE("radiotap extended present words are skipped") {
  auto mac = tu::data_frame(1, 2, 3, {0xaa});
  std::vector<uint8_t> bytes;
  bytes.push_back(0);
  bytes.push_back(0);
  tu::put16(bytes, 17);                              // header length
  tu::put32(bytes, (1u << 1) | (1u << 31));          // flags + ext
  tu::put32(bytes, 1u << 31);                        // second word, ext again
  tu::put32(bytes, 0);                               // final word
  bytes.push_back(0x10);                             // flags: FCS present
  bytes.insert(bytes.end(), mac.begin(), mac.end());
  bytes.insert(bytes.end(), {0, 0, 0, 0});           // FCS

  ParsedFrame f = parse_rt(bytes);
  CHECK(f.mac_offset == 17);
  CHECK(f.fcs_present);
  auto mb = mac_bytes(std::span<const uint8_t>(bytes), f);
  CHECK(std::vector<uint8_t>(mb.begin(), mb.end()) == mac);
}

TEST_CASE("malformed radiotap headers raise parse errors") {
  auto mac = tu::beacon_frame(1, 1, 1);

  SUBCASE("version byte not zero") {
    auto bytes = tu::radiotap_wrap(mac, false);
    bytes[0] = 3;
    CHECK_THROWS_WITH_AS(parse_rt(bytes), doctest::Contains("version"), Error);
  }
  SUBCASE("declared length beyond the capture") {
    auto bytes = tu::radiotap_wrap(mac, false);
    bytes[2] = 0xff;
    bytes[3] = 0x7f;
    CHECK_THROWS_WITH_AS(parse_rt(bytes), doctest::Contains("exceeds"), Error);
  }
  SUBCASE("present chain never terminates inside the header") {
    std::vector<uint8_t> bytes;
    bytes.push_back(0);
    bytes.push_back(0);
    tu::put16(bytes, 12);
    tu::put32(bytes, 1u << 31);
    tu::put32(bytes, 1u << 31);  // claims another word that is outside rt_len
    bytes.insert(bytes.end(), mac.begin(), mac.end());
    CHECK_THROWS_AS(parse_rt(bytes), Error);
  }
  SUBCASE("too short for the fixed part") {
    std::vector<uint8_t> bytes = {0, 0, 8, 0};
    CHECK_THROWS_AS(parse_rt(bytes), Error);
  }
  SUBCASE("header swallows the whole capture") {
    std::vector<uint8_t> bytes;
    bytes.push_back(0);
    bytes.push_back(0);
    tu::put16(bytes, 8);
    tu::put32(bytes, 0);
    // radiotap is intact but no MAC bytes follow
    CHECK_THROWS_WITH_AS(parse_rt(bytes), doctest::Contains("Frame Control"), Error);
  }
}

TEST_CASE("unsupported linktype raises a parse error") {
  auto bytes = tu::beacon_frame(1, 1, 1);
  CHECK_THROWS_AS(parse_frame(std::span<const uint8_t>(bytes), 1), Error);
}

TEST_CASE("identifiable frame selection") {
  auto parse_ok = [](const std::vector<uint8_t>& b) { return parse_raw(b); };

  CHECK(is_unique_candidate(parse_ok(tu::beacon_frame(1, 1, 77))));
  CHECK(is_unique_candidate(parse_ok(tu::probe_resp_frame(1, 2, 3, 77, false))));
  CHECK_FALSE(is_unique_candidate(parse_ok(tu::probe_resp_frame(1, 2, 3, 77, true))));
  CHECK_FALSE(is_unique_candidate(parse_ok(tu::data_frame(1, 2, 3, {1}))));
  CHECK_FALSE(is_unique_candidate(parse_ok(tu::ack_frame(1))));

  // A beacon cut before its body timestamp has no stable identity.
  auto whole = tu::beacon_frame(1, 1, 77);
  std::vector<uint8_t> cut(whole.begin(), whole.begin() + 26);
  CHECK_FALSE(is_unique_candidate(parse_raw(cut)));

  // A retried beacon is still identifiable: the same transmission content.
  auto retry = tu::mgmt_frame(8, true, tu::kBcast, tu::mac(1), tu::mac(1), 1, 77);
  CHECK(is_unique_candidate(parse_raw(retry)));
}

TEST_CASE("mac_bytes is the identity for raw captures") {
  auto bytes = tu::data_frame(1, 2, 3, {9, 9, 9});
  ParsedFrame f = parse_raw(bytes);
  auto mb = mac_bytes(std::span<const uint8_t>(bytes), f);
  CHECK(mb.data() == bytes.data());
  CHECK(mb.size() == bytes.size());
}
