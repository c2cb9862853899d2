// SPDX-License-Identifier: Apache-2.0
#include "tracegen.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace wimerge {

namespace {

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t x = base + (stream + 1) * 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void put16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(static_cast<uint8_t>(x));
  v.push_back(static_cast<uint8_t>(x >> 8));
}

void put64(std::vector<uint8_t>& v, uint64_t x) {
  for (int i = 0; i < 8; ++i) v.push_back(static_cast<uint8_t>(x >> (8 * i)));
}

void put_bytes(std::vector<uint8_t>& v, const uint8_t* p, size_t n) { v.insert(v.end(), p, p + n); }

std::array<uint8_t, 6> sender_mac(uint32_t idx) {
  return {0x02, 0x57, 0x49, 0x00, 0x00, static_cast<uint8_t>(idx)};
}
const uint8_t kBroadcast[6] = {0xff, 0xff, 0xff, 0xff, 0xff, 0xff};

void put_mac_header(std::vector<uint8_t>& v, uint8_t fc0, uint8_t fc1, const uint8_t* a1,
                    const uint8_t* a2, const uint8_t* a3, uint16_t seq) {
  v.push_back(fc0);
  v.push_back(fc1);
  put16(v, 0);  // duration
  put_bytes(v, a1, 6);
  put_bytes(v, a2, 6);
  put_bytes(v, a3, 6);
  put16(v, static_cast<uint16_t>(seq << 4));
}

void put_mgmt_body(std::vector<uint8_t>& v, uint64_t timestamp_us, uint64_t interval_us,
                   uint32_t ap_idx) {
  put64(v, timestamp_us);
  uint16_t tu = static_cast<uint16_t>(std::max<uint64_t>(interval_us / 1024, 1));
  put16(v, tu);
  put16(v, 0x0401);  // capabilities: ESS, short preamble
  std::string ssid = "cell-" + std::to_string(ap_idx);
  v.push_back(0x00);  // SSID element
  v.push_back(static_cast<uint8_t>(ssid.size()));
  put_bytes(v, reinterpret_cast<const uint8_t*>(ssid.data()), ssid.size());
  v.push_back(0x03);  // DS parameter set
  v.push_back(0x01);
  v.push_back(static_cast<uint8_t>(ap_idx % 11 + 1));
}

uint32_t fnv1a32(std::span<const uint8_t> data) {
  uint32_t h = 2166136261u;
  for (uint8_t b : data) h = (h ^ b) * 16777619u;
  return h;
}

void validate_config(const GenConfig& cfg) {
  auto bad = [](const std::string& msg) { fail(Errc::bad_config, msg); };
  auto check_prob = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) bad(std::string(name) + " must be within [0, 1]");
  };

  if (cfg.duration_us < 1000 || cfg.duration_us > 7'200'000'000ull)
    bad("duration_us must be within [1ms, 2h]");
  if (cfg.beacon_interval_us < 10'000 || cfg.beacon_interval_us > 10'000'000)
    bad("beacon_interval_us must be within [10ms, 10s]");
  if (cfg.ap_count < 1 || cfg.ap_count > 50) bad("ap_count must be within [1, 50]");
  if (cfg.client_count < 1 || cfg.client_count > 150) bad("client_count must be within [1, 150]");
  if (cfg.ap_count + cfg.client_count > 200) bad("at most 200 stations");
  if (cfg.data_rate_fps < 0 || cfg.data_rate_fps > 4000)
    bad("data_rate_fps must be within [0, 4000]");
  if (cfg.probe_rate_fps < 0 || cfg.probe_rate_fps > 100)
    bad("probe_rate_fps must be within [0, 100]");
  if (cfg.data_payload_bytes > 60000) bad("data_payload_bytes must be at most 60000");
  check_prob(cfg.data_retry_prob, "data_retry_prob");
  check_prob(cfg.data_dup_anomaly_prob, "data_dup_anomaly_prob");
  check_prob(cfg.probe_retry_prob, "probe_retry_prob");
  check_prob(cfg.ack_prob, "ack_prob");
  if (cfg.base_time_us < 120'000'000ull)
    bad("base_time_us must leave at least 120s of headroom before zero");
  if (cfg.base_time_us + cfg.duration_us + 120'000'000ull > kMaxPcapTimestampUs)
    bad("base_time_us + duration_us too close to the pcap timestamp limit");

  for (size_t k = 0; k < cfg.monitors.size(); ++k) {
    const MonitorModel& m = cfg.monitors[k];
    std::string who = "monitor." + std::to_string(k) + ": ";
    if (!(m.loss_prob >= 0.0 && m.loss_prob <= 0.95)) bad(who + "loss must be within [0, 0.95]");
    if (!(m.clock_slope > 0.9 && m.clock_slope < 1.1))
      bad(who + "clock_slope must be within (0.9, 1.1)");
    if (std::llabs(m.clock_offset_us) > 60'000'000) bad(who + "clock_offset_us beyond +/-60s");
    if (!(m.jitter_sigma_us >= 0.0 && m.jitter_sigma_us <= 10000))
      bad(who + "jitter_us must be within [0, 10000]");
    if (m.linktype != kLinktypeIeee80211 && m.linktype != kLinktypeRadiotap)
      bad(who + "linktype must be 105 or 127");
    if ((m.radiotap_tsft || m.append_fcs) && m.linktype != kLinktypeRadiotap)
      bad(who + "radiotap_tsft/fcs require linktype 127");
    uint64_t prev = 0;
    bool first = true;
    for (const DriftChange& dc : m.drift_changes) {
      if (!(dc.slope > 0.9 && dc.slope < 1.1)) bad(who + "drift slope must be within (0.9, 1.1)");
      if (!first && dc.at_rel_us <= prev) bad(who + "drift change points must increase");
      prev = dc.at_rel_us;
      first = false;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Air schedule

struct AirGenerator::Pending {
  double due_rel_us = 0;
  AirKind kind = AirKind::data;
  bool retry = false;
  std::vector<uint8_t> mac;
};

struct AirGenerator::State {
  GenConfig cfg;
  std::mt19937_64 rng;
  std::vector<double> next_beacon_rel;
  std::vector<uint16_t> seq;  // per station: APs first, then clients
  double next_data_rel = 0;
  double next_probe_rel = 0;
  std::vector<Pending> pending;
  uint64_t last_emit_rel = 0;
  bool emitted_any = false;
};

AirGenerator::AirGenerator(const GenConfig& cfg) : st_(std::make_unique<State>()) {
  validate_config(cfg);
  State& s = *st_;
  s.cfg = cfg;
  s.rng.seed(derive_seed(cfg.seed, 0));
  s.seq.assign(cfg.ap_count + cfg.client_count, 0);

  // Stagger the per-cell beacon cadences so they do not pile up.
  s.next_beacon_rel.resize(cfg.ap_count);
  for (uint32_t k = 0; k < cfg.ap_count; ++k)
    s.next_beacon_rel[k] =
        1000.0 + static_cast<double>(k) * static_cast<double>(cfg.beacon_interval_us) /
                     static_cast<double>(cfg.ap_count);

  const double never = std::numeric_limits<double>::infinity();
  if (cfg.data_rate_fps > 0) {
    std::exponential_distribution<double> gap(cfg.data_rate_fps / 1e6);
    s.next_data_rel = 500.0 + gap(s.rng);
  } else {
    s.next_data_rel = never;
  }
  if (cfg.probe_rate_fps > 0) {
    std::exponential_distribution<double> gap(cfg.probe_rate_fps / 1e6);
    s.next_probe_rel = 700.0 + gap(s.rng);
  } else {
    s.next_probe_rel = never;
  }
}

AirGenerator::~AirGenerator() = default;

bool AirGenerator::next(AirFrame& out) {
  State& s = *st_;
  const GenConfig& cfg = s.cfg;
  const double duration = static_cast<double>(cfg.duration_us);

  // Earliest nominal event wins; pending copies beat fresh traffic on ties.
  double best = std::numeric_limits<double>::infinity();
  int what = -1;  // 0 pending, 1 beacon, 2 data, 3 probe response
  uint32_t which_ap = 0;
  if (!s.pending.empty()) {
    best = s.pending.front().due_rel_us;
    what = 0;
  }
  for (uint32_t k = 0; k < cfg.ap_count; ++k)
    if (s.next_beacon_rel[k] < best) {
      best = s.next_beacon_rel[k];
      what = 1;
      which_ap = k;
    }
  if (s.next_data_rel < best) {
    best = s.next_data_rel;
    what = 2;
  }
  if (s.next_probe_rel < best) {
    best = s.next_probe_rel;
    what = 3;
  }
  if (what < 0 || best >= duration) return false;

  uint64_t emit_rel = static_cast<uint64_t>(std::llround(best));
  if (s.emitted_any && emit_rel < s.last_emit_rel + kMinAirGapUs)
    emit_rel = s.last_emit_rel + kMinAirGapUs;

  out.air_id = next_air_id_++;
  out.emit_us = cfg.base_time_us + emit_rel;
  out.retry = false;
  out.mac.clear();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto schedule_copy = [&](double due, bool mark_retry, AirKind kind) {
    if (due >= duration) return;
    Pending p;
    p.due_rel_us = due;
    p.kind = kind;
    p.retry = mark_retry;
    p.mac = out.mac;
    if (mark_retry) p.mac[1] |= 0x08;
    auto pos = std::upper_bound(
        s.pending.begin(), s.pending.end(), p.due_rel_us,
        [](double d, const Pending& q) { return d < q.due_rel_us; });
    s.pending.insert(pos, std::move(p));
  };

  switch (what) {
    case 0: {
      Pending p = std::move(s.pending.front());
      s.pending.erase(s.pending.begin());
      out.kind = p.kind;
      out.retry = p.retry;
      out.mac = std::move(p.mac);
      break;
    }
    case 1: {
      out.kind = AirKind::beacon;
      auto ap = sender_mac(which_ap);
      uint16_t seq = s.seq[which_ap]++ & 0xFFF;
      put_mac_header(out.mac, 0x80, 0x00, kBroadcast, ap.data(), ap.data(), seq);
      put_mgmt_body(out.mac, emit_rel, cfg.beacon_interval_us, which_ap);
      s.next_beacon_rel[which_ap] += static_cast<double>(cfg.beacon_interval_us);
      break;
    }
    case 2: {
      out.kind = AirKind::data;
      std::uniform_int_distribution<uint32_t> pick_ap(0, cfg.ap_count - 1);
      std::uniform_int_distribution<uint32_t> pick_client(cfg.ap_count,
                                                          cfg.ap_count + cfg.client_count - 1);
      uint32_t ap_idx = pick_ap(s.rng);
      uint32_t client_idx = pick_client(s.rng);
      bool downlink = unit(s.rng) < 0.5;
      uint32_t src = downlink ? ap_idx : client_idx;
      uint32_t dst = downlink ? client_idx : ap_idx;
      auto src_mac = sender_mac(src), dst_mac = sender_mac(dst), bssid = sender_mac(ap_idx);
      uint16_t seq = s.seq[src]++ & 0xFFF;
      put_mac_header(out.mac, 0x08, 0x00, dst_mac.data(), src_mac.data(), bssid.data(), seq);
      for (uint32_t i = 0; i < cfg.data_payload_bytes; i += 8) {
        uint64_t r = s.rng();
        for (uint32_t b = 0; b < 8 && i + b < cfg.data_payload_bytes; ++b)
          out.mac.push_back(static_cast<uint8_t>(r >> (8 * b)));
      }
      std::exponential_distribution<double> gap(cfg.data_rate_fps / 1e6);
      s.next_data_rel += gap(s.rng);

      if (cfg.data_retry_prob > 0 && unit(s.rng) < cfg.data_retry_prob)
        schedule_copy(best + 250.0 + unit(s.rng) * 400.0, true, AirKind::data);
      if (cfg.data_dup_anomaly_prob > 0 && unit(s.rng) < cfg.data_dup_anomaly_prob)
        schedule_copy(best + 400.0 + unit(s.rng) * 400.0, false, AirKind::data);
      if (cfg.ack_prob > 0 && unit(s.rng) < cfg.ack_prob) {
        Pending p;
        p.due_rel_us = best + static_cast<double>(kMinAirGapUs);
        p.kind = AirKind::ack;
        p.mac.push_back(0xD4);
        p.mac.push_back(0x00);
        put16(p.mac, 0);
        put_bytes(p.mac, src_mac.data(), 6);
        if (p.due_rel_us < duration) {
          auto pos = std::upper_bound(
              s.pending.begin(), s.pending.end(), p.due_rel_us,
              [](double d, const Pending& q) { return d < q.due_rel_us; });
          s.pending.insert(pos, std::move(p));
        }
      }
      break;
    }
    case 3: {
      out.kind = AirKind::probe_response;
      std::uniform_int_distribution<uint32_t> pick_ap(0, cfg.ap_count - 1);
      std::uniform_int_distribution<uint32_t> pick_client(cfg.ap_count,
                                                          cfg.ap_count + cfg.client_count - 1);
      uint32_t ap_idx = pick_ap(s.rng);
      uint32_t client_idx = pick_client(s.rng);
      auto ap = sender_mac(ap_idx), client = sender_mac(client_idx);
      uint16_t seq = s.seq[ap_idx]++ & 0xFFF;
      put_mac_header(out.mac, 0x50, 0x00, client.data(), ap.data(), ap.data(), seq);
      put_mgmt_body(out.mac, emit_rel, cfg.beacon_interval_us, ap_idx);
      std::exponential_distribution<double> gap(cfg.probe_rate_fps / 1e6);
      s.next_probe_rel += gap(s.rng);

      if (cfg.probe_retry_prob > 0 && unit(s.rng) < cfg.probe_retry_prob)
        schedule_copy(best + 250.0 + unit(s.rng) * 400.0, true, AirKind::probe_response);
      break;
    }
  }

  s.last_emit_rel = emit_rel;
  s.emitted_any = true;
  return true;
}

std::vector<AirFrame> generate_air(const GenConfig& cfg) {
  AirGenerator gen(cfg);
  std::vector<AirFrame> out;
  AirFrame f;
  while (gen.next(f)) out.push_back(f);
  return out;
}

// ---------------------------------------------------------------------------
// Monitor capture

// Piecewise-linear, continuous map from true relative time to capture-clock
// relative time.
struct MonitorCapture::Clock {
  struct Knot {
    uint64_t at_rel = 0;
    double value = 0;
    double slope = 1.0;
  };
  std::vector<Knot> knots;

  explicit Clock(const MonitorModel& m) {
    knots.push_back({0, 0.0, m.clock_slope});
    for (const DriftChange& dc : m.drift_changes) {
      const Knot& k = knots.back();
      double v = k.value + k.slope * (static_cast<double>(dc.at_rel_us) -
                                      static_cast<double>(k.at_rel));
      knots.push_back({dc.at_rel_us, v, dc.slope});
    }
  }

  double rel_capture(double rel) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), rel,
                               [](double r, const Knot& k) { return r < static_cast<double>(k.at_rel); });
    --it;
    return it->value + it->slope * (rel - static_cast<double>(it->at_rel));
  }
};

MonitorCapture::MonitorCapture(const MonitorModel& model, uint64_t base_time_us,
                               const std::string& pcap_path)
    : model_(model),
      base_time_us_(base_time_us),
      clock_(std::make_unique<Clock>(model)),
      rng_(model.seed) {
  TraceHeader h;
  h.linktype = model.linktype;
  writer_ = std::make_unique<TraceWriter>(pcap_path, h);
}

MonitorCapture::~MonitorCapture() = default;

void MonitorCapture::offer(const AirFrame& air) {
  if (model_.loss_prob > 0) {
    std::bernoulli_distribution lost(model_.loss_prob);
    if (lost(rng_)) return;
  }

  double rel = static_cast<double>(air.emit_us - base_time_us_);
  double cap = clock_->rel_capture(rel);
  if (model_.jitter_sigma_us > 0) {
    std::normal_distribution<double> jitter(0.0, model_.jitter_sigma_us);
    cap += jitter(rng_);
  }
  int64_t ts = static_cast<int64_t>(base_time_us_) + model_.clock_offset_us + std::llround(cap);
  if (ts < 0) ts = 0;
  // Jitter can reorder two captures; a capture stack would still write them
  // in arrival order, so clamp instead of sorting.
  if (have_last_ && static_cast<uint64_t>(ts) < last_ts_us_)
    ts = static_cast<int64_t>(last_ts_us_);
  last_ts_us_ = static_cast<uint64_t>(ts);
  have_last_ = true;

  scratch_.clear();
  if (model_.linktype == kLinktypeRadiotap) {
    const bool tsft = model_.radiotap_tsft;
    const uint8_t len = tsft ? 18 : 10;
    uint32_t present = (1u << 1) | (1u << 5);  // Flags, dBm antenna signal
    if (tsft) present |= 1u << 0;
    scratch_.push_back(0);  // version
    scratch_.push_back(0);  // pad
    put16(scratch_, len);
    put16(scratch_, static_cast<uint16_t>(present));
    put16(scratch_, static_cast<uint16_t>(present >> 16));
    if (tsft) put64(scratch_, static_cast<uint64_t>(std::llround(cap)));
    scratch_.push_back(model_.append_fcs ? 0x10 : 0x00);
    scratch_.push_back(static_cast<uint8_t>(model_.rssi_dbm));
    put_bytes(scratch_, air.mac.data(), air.mac.size());
    if (model_.append_fcs) {
      uint32_t fcs = fnv1a32(air.mac);
      put16(scratch_, static_cast<uint16_t>(fcs));
      put16(scratch_, static_cast<uint16_t>(fcs >> 16));
    }
  } else {
    put_bytes(scratch_, air.mac.data(), air.mac.size());
  }

  writer_->append_raw(static_cast<uint64_t>(ts), model_.linktype, scratch_);
  manifest_.push_back(
      {writer_->records_written() - 1, air.air_id, air.emit_us, static_cast<uint64_t>(ts)});
}

void MonitorCapture::finish() {
  if (writer_) writer_->close();
}

std::vector<CaptureEntry> capture_trace(std::span<const AirFrame> air, const MonitorModel& model,
                                        uint64_t base_time_us, const std::string& pcap_path) {
  MonitorCapture mc(model, base_time_us, pcap_path);
  for (const AirFrame& f : air) mc.offer(f);
  mc.finish();
  return mc.manifest();
}

// ---------------------------------------------------------------------------
// Manifests

void save_manifest_csv(std::span<const CaptureEntry> entries, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, path + ": open failed");
  out << "ordinal,air_id,emit_time_us,captured_ts_us\n";
  for (const CaptureEntry& e : entries)
    out << e.ordinal << ',' << e.air_id << ',' << e.emit_us << ',' << e.captured_ts_us << '\n';
  out.flush();
  if (!out) fail(Errc::io, path + ": write failed");
}

std::vector<CaptureEntry> load_manifest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, path + ": open failed");
  std::string line;
  if (!std::getline(in, line) || line.rfind("ordinal,", 0) != 0)
    fail(Errc::parse, path + ": missing manifest header line");
  std::vector<CaptureEntry> out;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CaptureEntry e;
    if (std::sscanf(line.c_str(), "%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64, &e.ordinal,
                    &e.air_id, &e.emit_us, &e.captured_ts_us) != 4)
      fail(Errc::parse, path + ":" + std::to_string(lineno) + ": bad manifest row");
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

GenConfig parse_gen_config(std::istream& in, const std::string& origin) {
  GenConfig cfg;
  std::string line;
  int lineno = 0;

  auto bad = [&](const std::string& msg) -> void {
    fail(Errc::bad_config, origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto to_u64 = [&](const std::string& v) -> uint64_t {
    try {
      size_t pos = 0;
      uint64_t x = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      bad("expected an unsigned integer, got '" + v + "'");
    }
    return 0;
  };
  auto to_i64 = [&](const std::string& v) -> int64_t {
    try {
      size_t pos = 0;
      int64_t x = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      bad("expected an integer, got '" + v + "'");
    }
    return 0;
  };
  auto to_f64 = [&](const std::string& v) -> double {
    try {
      size_t pos = 0;
      double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      bad("expected a number, got '" + v + "'");
    }
    return 0;
  };
  auto to_bool = [&](const std::string& v) -> bool {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    bad("expected a boolean (0/1/true/false), got '" + v + "'");
    return false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) bad("expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) bad("expected key=value");

    if (key == "seed") cfg.seed = to_u64(val);
    else if (key == "duration_us") cfg.duration_us = to_u64(val);
    else if (key == "base_time_us") cfg.base_time_us = to_u64(val);
    else if (key == "beacon_interval_us") cfg.beacon_interval_us = to_u64(val);
    else if (key == "ap_count") cfg.ap_count = static_cast<uint32_t>(to_u64(val));
    else if (key == "client_count") cfg.client_count = static_cast<uint32_t>(to_u64(val));
    else if (key == "data_rate_fps") cfg.data_rate_fps = to_f64(val);
    else if (key == "data_payload_bytes") cfg.data_payload_bytes = static_cast<uint32_t>(to_u64(val));
    else if (key == "data_retry_prob") cfg.data_retry_prob = to_f64(val);
    else if (key == "data_dup_anomaly_prob") cfg.data_dup_anomaly_prob = to_f64(val);
    else if (key == "probe_rate_fps") cfg.probe_rate_fps = to_f64(val);
    else if (key == "probe_retry_prob") cfg.probe_retry_prob = to_f64(val);
    else if (key == "ack_prob") cfg.ack_prob = to_f64(val);
    else if (key == "write_air") cfg.write_air = to_bool(val);
    else if (key == "monitor_count") {
      uint64_t n = to_u64(val);
      if (n > 64) bad("monitor_count must be at most 64");
      cfg.monitors.resize(n);
    } else if (key.rfind("monitor.", 0) == 0) {
      size_t dot = key.find('.', 8);
      if (dot == std::string::npos) bad("expected monitor.<index>.<field>");
      uint64_t idx = to_u64(key.substr(8, dot - 8));
      if (idx >= 64) bad("monitor index must be below 64");
      if (cfg.monitors.size() <= idx) cfg.monitors.resize(idx + 1);
      MonitorModel& m = cfg.monitors[idx];
      std::string field = key.substr(dot + 1);
      if (field == "loss") m.loss_prob = to_f64(val);
      else if (field == "clock_slope") m.clock_slope = to_f64(val);
      else if (field == "clock_offset_us") m.clock_offset_us = to_i64(val);
      else if (field == "jitter_us") m.jitter_sigma_us = to_f64(val);
      else if (field == "seed") m.seed = to_u64(val);
      else if (field == "linktype") m.linktype = static_cast<uint32_t>(to_u64(val));
      else if (field == "radiotap_tsft") m.radiotap_tsft = to_bool(val);
      else if (field == "fcs") m.append_fcs = to_bool(val);
      else if (field == "rssi_dbm") {
        int64_t r = to_i64(val);
        if (r < -120 || r > 0) bad("rssi_dbm must be within [-120, 0]");
        m.rssi_dbm = static_cast<int8_t>(r);
      } else if (field == "drift") {
        m.drift_changes.clear();
        std::stringstream ss(val);
        std::string part;
        while (std::getline(ss, part, ',')) {
          size_t colon = part.find(':');
          if (colon == std::string::npos) bad("drift entries are <at_us>:<slope>");
          DriftChange dc;
          dc.at_rel_us = to_u64(trim(part.substr(0, colon)));
          dc.slope = to_f64(trim(part.substr(colon + 1)));
          m.drift_changes.push_back(dc);
        }
      } else {
        bad("unknown monitor field '" + field + "'");
      }
    } else {
      bad("unknown key '" + key + "'");
    }
  }

  for (size_t k = 0; k < cfg.monitors.size(); ++k)
    if (cfg.monitors[k].seed == 0) cfg.monitors[k].seed = derive_seed(cfg.seed, k + 1);

  try {
    validate_config(cfg);
  } catch (const Error& e) {
    fail(Errc::bad_config, origin + ": " + e.what());
  }
  return cfg;
}

GenConfig load_gen_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, path + ": open failed");
  return parse_gen_config(in, path);
}

// ---------------------------------------------------------------------------
// Whole scenarios

ScenarioOutput run_scenario(const GenConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, out_dir + ": cannot create directory: " + ec.message());

  ScenarioOutput out;
  AirGenerator gen(cfg);

  std::unique_ptr<TraceWriter> air_writer;
  if (cfg.write_air) {
    out.air_pcap = (fs::path(out_dir) / "air.pcap").string();
    TraceHeader h;
    h.linktype = kLinktypeIeee80211;
    air_writer = std::make_unique<TraceWriter>(out.air_pcap, h);
  }

  std::vector<std::unique_ptr<MonitorCapture>> monitors;
  for (size_t k = 0; k < cfg.monitors.size(); ++k) {
    std::string p = (fs::path(out_dir) / ("monitor" + std::to_string(k) + ".pcap")).string();
    out.monitor_pcaps.push_back(p);
    monitors.push_back(std::make_unique<MonitorCapture>(cfg.monitors[k], cfg.base_time_us, p));
  }

  AirFrame frame;
  while (gen.next(frame)) {
    if (air_writer) air_writer->append_raw(frame.emit_us, kLinktypeIeee80211, frame.mac);
    for (auto& m : monitors) m->offer(frame);
  }
  out.air_frames = gen.emitted();

  if (air_writer) air_writer->close();
  for (size_t k = 0; k < monitors.size(); ++k) {
    monitors[k]->finish();
    std::string mp = (fs::path(out_dir) / ("monitor" + std::to_string(k) + ".csv")).string();
    save_manifest_csv(monitors[k]->manifest(), mp);
    out.manifest_csvs.push_back(mp);
    out.captured_counts.push_back(monitors[k]->manifest().size());
  }
  return out;
}

}  // namespace wimerge
