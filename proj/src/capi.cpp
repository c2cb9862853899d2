// SPDX-License-Identifier: Apache-2.0
#include "wimerge.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "intersect.hpp"
#include "merge.hpp"
#include "pcap_io.hpp"
#include "sync.hpp"
#include "tracegen.hpp"
#include "uniques.hpp"
#include "validate.hpp"

namespace wi = wimerge;

namespace {

thread_local std::string g_last_error;

wm_status map_errc(wi::Errc c) {
  switch (c) {
    case wi::Errc::ok: return WM_OK;
    case wi::Errc::usage: return WM_ERR_USAGE;
    case wi::Errc::io: return WM_ERR_IO;
    case wi::Errc::bad_magic: return WM_ERR_BAD_MAGIC;
    case wi::Errc::bad_linktype: return WM_ERR_BAD_LINKTYPE;
    case wi::Errc::truncated: return WM_ERR_TRUNCATED;
    case wi::Errc::mixed_linktype: return WM_ERR_MIXED_LINKTYPE;
    case wi::Errc::parse: return WM_ERR_PARSE;
    case wi::Errc::too_few_refs: return WM_ERR_TOO_FEW_REFS;
    case wi::Errc::degenerate_window: return WM_ERR_DEGENERATE_WINDOW;
    case wi::Errc::unordered_input: return WM_ERR_UNORDERED_INPUT;
    case wi::Errc::bad_config: return WM_ERR_BAD_CONFIG;
    case wi::Errc::empty_set: return WM_ERR_EMPTY_SET;
    case wi::Errc::timestamp_range: return WM_ERR_TIMESTAMP_RANGE;
  }
  return WM_ERR_INTERNAL;
}

template <typename Fn>
wm_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const wi::Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WM_ERR_INTERNAL;
  }
}

wm_status invalid_arg(const char* msg) {
  g_last_error = msg;
  return WM_ERR_USAGE;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

wi::MergeOptions to_core(const wm_merge_options* o) {
  wi::MergeOptions m;
  if (o) {
    m.window_w = o->window_w;
    m.neighbor_window = o->neighbor_window;
    m.delta_max_us = o->delta_max_us;
    m.dup_threshold_us = o->dup_threshold_us;
  }
  return m;
}

void fill_stats(const wi::MergeStats& st, wm_merge_stats* out) {
  if (!out) return;
  out->frames_in_1 = st.frames_in_1;
  out->frames_in_2 = st.frames_in_2;
  out->duplicates_unified = st.duplicates_unified;
  out->frames_out = st.frames_out;
  out->avg_sync_error_us = st.avg_sync_error_us;
  out->references_found = st.references_found;
  out->references_used = st.references_used;
  out->references_rejected = st.references_rejected;
  out->collisions_filtered = st.collisions_filtered;
  out->cross_trace_suspects = st.cross_trace_suspects;
  out->order_violations_out = st.order_violations_out;
  out->clamped_timestamps = st.clamped_timestamps;
  out->malformed_dropped = st.malformed_dropped;
}

}  // namespace

struct wm_reader {
  wi::TraceReader impl;
  wi::FrameRecord rec;
  explicit wm_reader(const char* path) : impl(path) {}
};

struct wm_writer {
  wi::TraceWriter impl;
  wm_writer(const char* path, const wi::TraceHeader& h) : impl(path, h) {}
};

struct wm_uniques {
  std::vector<wi::UniqueDigest> items;
};

struct wm_refs {
  std::vector<wi::ReferencePair> pairs;
  uint64_t collisions = 0;
  uint64_t suspects = 0;
};

struct wm_mapping {
  wi::ClockMapping impl;
};

struct wm_validation {
  wi::ValidationReport report;
};

extern "C" {

const char* wm_version(void) { return "0.1.0"; }

const char* wm_status_name(wm_status s) {
  switch (s) {
    case WM_OK: return "ok";
    case WM_ERR_USAGE: return "usage";
    case WM_ERR_IO: return "io";
    case WM_ERR_BAD_MAGIC: return "bad_magic";
    case WM_ERR_BAD_LINKTYPE: return "bad_linktype";
    case WM_ERR_TRUNCATED: return "truncated";
    case WM_ERR_MIXED_LINKTYPE: return "mixed_linktype";
    case WM_ERR_PARSE: return "parse";
    case WM_ERR_TOO_FEW_REFS: return "too_few_refs";
    case WM_ERR_DEGENERATE_WINDOW: return "degenerate_window";
    case WM_ERR_UNORDERED_INPUT: return "unordered_input";
    case WM_ERR_BAD_CONFIG: return "bad_config";
    case WM_ERR_EMPTY_SET: return "empty_set";
    case WM_ERR_TIMESTAMP_RANGE: return "timestamp_range";
    case WM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* wm_last_error(void) { return g_last_error.c_str(); }

void wm_string_free(char* s) { delete[] s; }

/* ------------------------------------------------------------------ */

wm_status wm_reader_open(const char* path, wm_reader** out) {
  if (!path || !out) return invalid_arg("wm_reader_open: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new wm_reader(path);
    return WM_OK;
  });
}

wm_status wm_reader_next(wm_reader* r, wm_frame* frame, int* has_frame) {
  if (!r || !frame || !has_frame) return invalid_arg("wm_reader_next: null argument");
  return guarded([&] {
    bool has = r->impl.next(r->rec);
    *has_frame = has ? 1 : 0;
    if (has) {
      frame->ts_us = r->rec.ts_us;
      frame->captured_len = r->rec.captured_len;
      frame->original_len = r->rec.original_len;
      frame->linktype = r->rec.linktype;
      frame->ordinal = r->rec.ordinal;
      frame->payload = r->rec.payload.data();
    } else {
      *frame = wm_frame{};
    }
    return WM_OK;
  });
}

uint32_t wm_reader_linktype(const wm_reader* r) { return r ? r->impl.header().linktype : 0; }

uint32_t wm_reader_snaplen(const wm_reader* r) { return r ? r->impl.header().snaplen : 0; }

void wm_reader_close(wm_reader* r) { delete r; }

wm_status wm_writer_create(const char* path, uint32_t linktype, uint32_t snaplen,
                           wm_writer** out) {
  if (!path || !out) return invalid_arg("wm_writer_create: null argument");
  *out = nullptr;
  if (linktype != wi::kLinktypeIeee80211 && linktype != wi::kLinktypeRadiotap)
    return invalid_arg("wm_writer_create: linktype must be 105 or 127");
  return guarded([&] {
    wi::TraceHeader h;
    h.linktype = linktype;
    h.snaplen = snaplen ? snaplen : 65535;
    *out = new wm_writer(path, h);
    return WM_OK;
  });
}

wm_status wm_writer_append(wm_writer* w, const wm_frame* frame) {
  if (!w || !frame || (!frame->payload && frame->captured_len))
    return invalid_arg("wm_writer_append: null argument");
  return guarded([&] {
    w->impl.append_raw(frame->ts_us, frame->linktype,
                       {frame->payload, frame->captured_len}, frame->original_len);
    return WM_OK;
  });
}

wm_status wm_writer_close(wm_writer* w) {
  if (!w) return invalid_arg("wm_writer_close: null writer");
  wm_status rc = guarded([&] {
    w->impl.close();
    return WM_OK;
  });
  delete w;
  return rc;
}

/* ------------------------------------------------------------------ */

wm_status wm_uniques_extract(const char* pcap_path, wm_uniques** out) {
  if (!pcap_path || !out) return invalid_arg("wm_uniques_extract: null argument");
  *out = nullptr;
  return guarded([&] {
    auto u = std::make_unique<wm_uniques>();
    u->items = wi::extract_uniques(pcap_path);
    *out = u.release();
    return WM_OK;
  });
}

wm_status wm_uniques_extract_to_file(const char* pcap_path, const char* sidecar_path,
                                     uint64_t* count) {
  if (!pcap_path || !sidecar_path)
    return invalid_arg("wm_uniques_extract_to_file: null argument");
  return guarded([&] {
    uint64_t n = wi::extract_uniques_to_file(pcap_path, sidecar_path);
    if (count) *count = n;
    return WM_OK;
  });
}

wm_status wm_uniques_load(const char* sidecar_path, wm_uniques** out) {
  if (!sidecar_path || !out) return invalid_arg("wm_uniques_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto u = std::make_unique<wm_uniques>();
    u->items = wi::load_uniques(sidecar_path);
    *out = u.release();
    return WM_OK;
  });
}

wm_status wm_uniques_save(const wm_uniques* u, const char* sidecar_path) {
  if (!u || !sidecar_path) return invalid_arg("wm_uniques_save: null argument");
  return guarded([&] {
    wi::save_uniques(u->items, sidecar_path);
    return WM_OK;
  });
}

uint64_t wm_uniques_count(const wm_uniques* u) { return u ? u->items.size() : 0; }

wm_status wm_uniques_at(const wm_uniques* u, uint64_t index, uint8_t hash[16], uint64_t* ts_us,
                        uint64_t* ordinal) {
  if (!u) return invalid_arg("wm_uniques_at: null handle");
  if (index >= u->items.size()) return invalid_arg("wm_uniques_at: index out of range");
  const wi::UniqueDigest& d = u->items[index];
  if (hash) std::memcpy(hash, d.hash.bytes.data(), 16);
  if (ts_us) *ts_us = d.ts_us;
  if (ordinal) *ordinal = d.ordinal;
  return WM_OK;
}

uint64_t wm_uniques_memory_bytes(const wm_uniques* u) {
  return u ? wi::uniques_memory_bytes(u->items) : 0;
}

void wm_uniques_free(wm_uniques* u) { delete u; }

/* ------------------------------------------------------------------ */

wm_status wm_intersect(const wm_uniques* u1, const wm_uniques* u2, wm_refs** out) {
  if (!u1 || !u2 || !out) return invalid_arg("wm_intersect: null argument");
  *out = nullptr;
  return guarded([&] {
    wi::IntersectResult r = wi::intersect(u1->items, u2->items);
    auto refs = std::make_unique<wm_refs>();
    refs->pairs = std::move(r.pairs);
    refs->collisions = r.collisions.size();
    refs->suspects = r.cross_trace_suspects;
    *out = refs.release();
    return WM_OK;
  });
}

wm_status wm_refs_prune(wm_refs* refs, int neighbor_window, int64_t delta_max_us,
                        uint64_t* rejected) {
  if (!refs) return invalid_arg("wm_refs_prune: null handle");
  return guarded([&] {
    wi::PruneResult pr =
        wi::prune_invalid_references(std::move(refs->pairs), neighbor_window, delta_max_us);
    refs->pairs = std::move(pr.kept);
    if (rejected) *rejected = pr.rejected.size();
    return WM_OK;
  });
}

uint64_t wm_refs_count(const wm_refs* refs) { return refs ? refs->pairs.size() : 0; }

uint64_t wm_refs_collisions(const wm_refs* refs) { return refs ? refs->collisions : 0; }

uint64_t wm_refs_cross_trace_suspects(const wm_refs* refs) {
  return refs ? refs->suspects : 0;
}

wm_status wm_refs_at(const wm_refs* refs, uint64_t index, wm_ref_pair* out) {
  if (!refs || !out) return invalid_arg("wm_refs_at: null argument");
  if (index >= refs->pairs.size()) return invalid_arg("wm_refs_at: index out of range");
  const wi::ReferencePair& p = refs->pairs[index];
  std::memcpy(out->hash, p.hash.bytes.data(), 16);
  out->t1_us = p.t1_us;
  out->t2_us = p.t2_us;
  out->ord1 = p.ord1;
  out->ord2 = p.ord2;
  return WM_OK;
}

wm_status wm_refs_save_csv(const wm_refs* refs, const char* path) {
  if (!refs || !path) return invalid_arg("wm_refs_save_csv: null argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) wi::fail(wi::Errc::io, std::string(path) + ": open failed");
    out << "hash,t1_us,t2_us,ord1,ord2\n";
    for (const wi::ReferencePair& p : refs->pairs)
      out << p.hash.hex() << ',' << p.t1_us << ',' << p.t2_us << ',' << p.ord1 << ',' << p.ord2
          << '\n';
    out.flush();
    if (!out) wi::fail(wi::Errc::io, std::string(path) + ": write failed");
    return WM_OK;
  });
}

void wm_refs_free(wm_refs* refs) { delete refs; }

/* ------------------------------------------------------------------ */

wm_status wm_mapping_fit(const wm_refs* refs, int window_w, wm_mapping** out) {
  if (!refs || !out) return invalid_arg("wm_mapping_fit: null argument");
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<wm_mapping>();
    m->impl = wi::ClockMapping::fit(refs->pairs, window_w);
    *out = m.release();
    return WM_OK;
  });
}

int64_t wm_mapping_apply(const wm_mapping* m, uint64_t t1_us) {
  return m ? m->impl.apply_us(t1_us) : 0;
}

uint64_t wm_mapping_segment_count(const wm_mapping* m) {
  return m ? m->impl.segments().size() : 0;
}

wm_status wm_mapping_segment(const wm_mapping* m, uint64_t index, uint64_t* t1_start_us,
                             uint64_t* t1_end_us, double* slope, double* intercept_us) {
  if (!m) return invalid_arg("wm_mapping_segment: null handle");
  auto segs = m->impl.segments();
  if (index >= segs.size()) return invalid_arg("wm_mapping_segment: index out of range");
  const wi::MappingSegment& s = segs[index];
  if (t1_start_us) *t1_start_us = s.t1_start;
  if (t1_end_us) *t1_end_us = s.t1_end;
  if (slope) *slope = s.slope;
  if (intercept_us) *intercept_us = s.intercept_us();
  return WM_OK;
}

wm_status wm_sync_error(const wm_mapping* m, const uint64_t* t1_us, const uint64_t* t2_us,
                        size_t n, double* avg_abs_error_us) {
  if (!m || !avg_abs_error_us || (n && (!t1_us || !t2_us)))
    return invalid_arg("wm_sync_error: null argument");
  return guarded([&] {
    std::vector<std::pair<uint64_t, uint64_t>> shared(n);
    for (size_t i = 0; i < n; ++i) shared[i] = {t1_us[i], t2_us[i]};
    *avg_abs_error_us = wi::average_sync_error_us(shared, m->impl);
    return WM_OK;
  });
}

void wm_mapping_free(wm_mapping* m) { delete m; }

/* ------------------------------------------------------------------ */

void wm_merge_options_init(wm_merge_options* opts) {
  if (!opts) return;
  wi::MergeOptions d;
  opts->window_w = d.window_w;
  opts->neighbor_window = d.neighbor_window;
  opts->delta_max_us = d.delta_max_us;
  opts->dup_threshold_us = d.dup_threshold_us;
}

wm_status wm_merge_files(const char* trace1, const char* trace2, const char* out_path,
                         const wm_merge_options* opts, wm_merge_stats* stats) {
  if (!trace1 || !trace2) return invalid_arg("wm_merge_files: null trace path");
  return guarded([&] {
    wi::MergeStats st =
        wi::merge_files(trace1, trace2, out_path ? out_path : "", to_core(opts));
    fill_stats(st, stats);
    return WM_OK;
  });
}

wm_status wm_merge_many(const char* const* paths, size_t count, const char* out_path,
                        const wm_merge_options* opts, wm_merge_step_fn on_step, void* user,
                        wm_merge_stats* final_stats) {
  if (!paths || !out_path) return invalid_arg("wm_merge_many: null argument");
  for (size_t i = 0; i < count; ++i)
    if (!paths[i]) return invalid_arg("wm_merge_many: null trace path");
  return guarded([&] {
    std::vector<std::string> in(paths, paths + count);
    wi::MergeStepFn cb;
    if (on_step)
      cb = [on_step, user](size_t step, const wi::MergeStats& st) {
        wm_merge_stats out;
        fill_stats(st, &out);
        on_step(step, &out, user);
      };
    wi::MergeStats st = wi::merge_many(in, out_path, to_core(opts), cb);
    fill_stats(st, final_stats);
    return WM_OK;
  });
}

/* ------------------------------------------------------------------ */

wm_status wm_validate(const char* pcap_path, wm_validation** out) {
  if (!pcap_path || !out) return invalid_arg("wm_validate: null argument");
  *out = nullptr;
  return guarded([&] {
    auto v = std::make_unique<wm_validation>();
    v->report = wi::validate_trace(pcap_path);
    *out = v.release();
    return WM_OK;
  });
}

uint64_t wm_validation_duplicate_unique_groups(const wm_validation* v) {
  return v ? v->report.duplicate_uniques.size() : 0;
}

uint64_t wm_validation_duplicate_data_anomalies(const wm_validation* v) {
  return v ? v->report.duplicate_data.size() : 0;
}

char* wm_validation_format(const wm_validation* v) {
  if (!v) return nullptr;
  return dup_string(wi::format_report(v->report));
}

void wm_validation_free(wm_validation* v) { delete v; }

/* ------------------------------------------------------------------ */

wm_status wm_gen_run(const char* config_path, const char* out_dir, char** summary) {
  if (!config_path || !out_dir) return invalid_arg("wm_gen_run: null argument");
  if (summary) *summary = nullptr;
  return guarded([&] {
    wi::GenConfig cfg = wi::load_gen_config(config_path);
    wi::ScenarioOutput so = wi::run_scenario(cfg, out_dir);
    if (summary) {
      std::ostringstream os;
      os << "air frames: " << so.air_frames << "\n";
      if (!so.air_pcap.empty()) os << "air pcap: " << so.air_pcap << "\n";
      for (size_t k = 0; k < so.monitor_pcaps.size(); ++k)
        os << "monitor " << k << ": " << so.captured_counts[k] << " frames -> "
           << so.monitor_pcaps[k] << " (" << so.manifest_csvs[k] << ")\n";
      *summary = dup_string(os.str());
    }
    return WM_OK;
  });
}

}  // extern "C"
