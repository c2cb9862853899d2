// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pcap_io.hpp"

namespace wimerge {

enum class AirKind : uint8_t { beacon, probe_response, data, ack };

// One over-the-air transmission, the shared ground truth every monitor sees.
struct AirFrame {
  uint64_t air_id = 0;   // emission-order index
  uint64_t emit_us = 0;  // absolute true-clock time
  AirKind kind = AirKind::data;
  bool retry = false;
  std::vector<uint8_t> mac;  // MAC frame bytes, no PHY header, no FCS
};

struct DriftChange {
  uint64_t at_rel_us = 0;  // relative to trace start
  double slope = 1.0;      // clock rate from this point on
};

struct MonitorModel {
  double loss_prob = 0.0;
  double clock_slope = 1.0;     // initial rate of the capture clock vs true time
  int64_t clock_offset_us = 0;  // capture clock minus true clock at trace start
  std::vector<DriftChange> drift_changes;  // sorted by at_rel_us
  double jitter_sigma_us = 0.0;
  uint64_t seed = 0;  // 0 = derive from the scenario seed
  uint32_t linktype = kLinktypeRadiotap;
  bool radiotap_tsft = false;
  bool append_fcs = false;  // radiotap captures only
  int8_t rssi_dbm = -40;
};

struct GenConfig {
  uint64_t seed = 1;
  uint64_t duration_us = 10'000'000;
  uint64_t base_time_us = 1'700'000'000'000'000;  // true-clock trace start
  uint64_t beacon_interval_us = 100'000;
  uint32_t ap_count = 1;
  uint32_t client_count = 4;
  double data_rate_fps = 200.0;
  uint32_t data_payload_bytes = 400;
  double data_retry_prob = 0.0;
  // Probability that a data frame is followed by an exact duplicate that is
  // not marked as a retry; injects the anomaly the validation scan hunts.
  double data_dup_anomaly_prob = 0.0;
  double probe_rate_fps = 2.0;
  double probe_retry_prob = 0.25;
  double ack_prob = 0.0;
  bool write_air = true;
  std::vector<MonitorModel> monitors;
};

// Flat key=value configuration ('#' comments). Unknown keys and out-of-range
// values raise Errc::bad_config.
GenConfig parse_gen_config(std::istream& in, const std::string& origin);
GenConfig load_gen_config(const std::string& path);

// Deterministic air-schedule source. Frames come out in emission order with
// at least kMinAirGapUs between consecutive transmissions, so two distinct
// frames are never close enough to be mistaken for one.
class AirGenerator {
 public:
  static constexpr uint64_t kMinAirGapUs = 212;

  explicit AirGenerator(const GenConfig& cfg);
  ~AirGenerator();

  bool next(AirFrame& out);
  uint64_t emitted() const noexcept { return next_air_id_; }

 private:
  struct Pending;  // delayed copies: retries, injected duplicates, acks
  struct State;

  std::unique_ptr<State> st_;
  uint64_t next_air_id_ = 0;
};

std::vector<AirFrame> generate_air(const GenConfig& cfg);

// Ground truth row: which transmission became capture record `ordinal`.
struct CaptureEntry {
  uint64_t ordinal = 0;
  uint64_t air_id = 0;
  uint64_t emit_us = 0;
  uint64_t captured_ts_us = 0;
};

// CSV with an "ordinal,air_id,emit_time_us,captured_ts_us" header line.
void save_manifest_csv(std::span<const CaptureEntry> entries, const std::string& path);
std::vector<CaptureEntry> load_manifest_csv(const std::string& path);

// One monitor observing the air sequence: Bernoulli loss, affine clock with
// piecewise rate changes, Gaussian jitter, and a monotonicity clamp so the
// written trace is chronologically ordered.
class MonitorCapture {
 public:
  MonitorCapture(const MonitorModel& model, uint64_t base_time_us, const std::string& pcap_path);
  ~MonitorCapture();

  void offer(const AirFrame& air);
  const std::vector<CaptureEntry>& manifest() const noexcept { return manifest_; }
  void finish();

 private:
  struct Clock;

  MonitorModel model_;
  uint64_t base_time_us_;
  std::unique_ptr<Clock> clock_;
  std::mt19937_64 rng_;
  std::unique_ptr<TraceWriter> writer_;
  std::vector<CaptureEntry> manifest_;
  std::vector<uint8_t> scratch_;
  uint64_t last_ts_us_ = 0;
  bool have_last_ = false;
};

std::vector<CaptureEntry> capture_trace(std::span<const AirFrame> air, const MonitorModel& model,
                                        uint64_t base_time_us, const std::string& pcap_path);

struct ScenarioOutput {
  std::string air_pcap;  // empty when write_air is off
  std::vector<std::string> monitor_pcaps;
  std::vector<std::string> manifest_csvs;
  uint64_t air_frames = 0;
  std::vector<uint64_t> captured_counts;
};

// Generates a whole scenario under out_dir in one streaming pass:
// air.pcap (optional) plus monitor<k>.pcap and monitor<k>.csv per monitor.
ScenarioOutput run_scenario(const GenConfig& cfg, const std::string& out_dir);

}  // namespace wimerge
