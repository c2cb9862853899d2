// SPDX-License-Identifier: Apache-2.0
#include "merge.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <optional>

#include "digest.hpp"
#include "intersect.hpp"
#include "uniques.hpp"

namespace wimerge {

namespace {

// One input trace during a merge: the head record plus lazily computed parse
// and digest state for duplicate detection.
struct Cursor {
  TraceReader& reader;
  const ClockMapping* mapping;  // null for the trace already in target time
  FrameRecord rec;
  bool has = false;
  int64_t mapped_us = 0;
  uint64_t prev_raw_us = 0;
  uint64_t in_count = 0;
  bool parse_tried = false;
  bool parsed_ok = false;
  ParsedFrame parsed;
  bool have_digest = false;
  Digest128 digest;

  Cursor(TraceReader& r, const ClockMapping* m) : reader(r), mapping(m) {}

  void advance() {
    has = reader.next(rec);
    if (!has) return;
    if (in_count > 0 && rec.ts_us < prev_raw_us)
      fail(Errc::unordered_input, reader.path() + ": record " + std::to_string(rec.ordinal) +
                                      " goes backwards in time");
    ++in_count;
    prev_raw_us = rec.ts_us;
    mapped_us = mapping ? mapping->apply_us(rec.ts_us) : static_cast<int64_t>(rec.ts_us);
    parse_tried = false;
    parsed_ok = false;
    have_digest = false;
  }

  const ParsedFrame* frame() {
    if (!parse_tried) {
      parse_tried = true;
      try {
        parsed = parse_frame(rec);
        parsed_ok = true;
      } catch (const Error& e) {
        if (e.code() != Errc::parse) throw;
      }
    }
    return parsed_ok ? &parsed : nullptr;
  }

  const Digest128* content_digest() {
    const ParsedFrame* f = frame();
    if (!f) return nullptr;
    if (!have_digest) {
      digest = md5_digest(mac_bytes(rec, *f));
      have_digest = true;
    }
    return &digest;
  }
};

bool heads_identical(Cursor& a, Cursor& b) {
  const Digest128* da = a.content_digest();
  const Digest128* db = b.content_digest();
  if (!da || !db || !(*da == *db)) return false;
  auto ma = mac_bytes(a.rec, *a.frame());
  auto mb = mac_bytes(b.rec, *b.frame());
  return ma.size() == mb.size() && std::equal(ma.begin(), ma.end(), mb.begin());
}

struct Emitter {
  TraceWriter* out;
  uint32_t out_linktype;
  MergeStats& st;
  int64_t last_out_us = std::numeric_limits<int64_t>::min();

  // Writes the cursor's head record (rewritten to the output linktype when
  // needed) and advances past it.
  void emit(Cursor& c) {
    int64_t ts = c.mapped_us;
    if (ts < 0) {
      ts = 0;
      ++st.clamped_timestamps;
    }
    std::span<const uint8_t> bytes(c.rec.payload);
    uint32_t orig = c.rec.original_len;
    if (c.rec.linktype != out_linktype) {
      const ParsedFrame* f = c.frame();
      if (!f) {  // cannot strip a frame we cannot parse
        ++st.malformed_dropped;
        c.advance();
        return;
      }
      auto mac = mac_bytes(c.rec, *f);
      uint32_t trimmed = c.rec.captured_len - static_cast<uint32_t>(mac.size());
      bytes = mac;
      orig = orig >= trimmed ? orig - trimmed : static_cast<uint32_t>(mac.size());
    }
    if (ts < last_out_us)
      ++st.order_violations_out;
    else
      last_out_us = ts;
    if (out) out->append_raw(static_cast<uint64_t>(ts), out_linktype, bytes, orig);
    ++st.frames_out;
    c.advance();
  }
};

}  // namespace

bool content_identical(const FrameRecord& a, const FrameRecord& b) {
  try {
    ParsedFrame fa = parse_frame(a);
    ParsedFrame fb = parse_frame(b);
    auto ma = mac_bytes(a, fa);
    auto mb = mac_bytes(b, fb);
    if (!(md5_digest(ma) == md5_digest(mb))) return false;
    return ma.size() == mb.size() && std::equal(ma.begin(), ma.end(), mb.begin());
  } catch (const Error& e) {
    if (e.code() == Errc::parse) return false;
    throw;
  }
}

MergeStats merge_traces(TraceReader& t1, TraceReader& t2, const ClockMapping& mapping,
                        TraceWriter* out, int64_t dup_threshold_us) {
  if (dup_threshold_us < 0) fail(Errc::usage, "duplicate threshold must be non-negative");

  MergeStats st;
  uint32_t out_lt;
  if (out)
    out_lt = out->header().linktype;
  else
    out_lt = t1.header().linktype == t2.header().linktype ? t2.header().linktype
                                                          : kLinktypeIeee80211;

  Cursor c1(t1, &mapping);
  Cursor c2(t2, nullptr);
  Emitter em{out, out_lt, st};
  c1.advance();
  c2.advance();

  double err_sum = 0;
  while (c1.has && c2.has) {
    int64_t d = c1.mapped_us - c2.mapped_us;
    int64_t ad = d < 0 ? -d : d;
    if (ad < dup_threshold_us && heads_identical(c1, c2)) {
      // Same transmission seen by both monitors: keep trace 2's copy.
      err_sum += static_cast<double>(ad);
      ++st.duplicates_unified;
      em.emit(c2);
      c1.advance();
    } else if (d <= 0) {
      em.emit(c1);
    } else {
      em.emit(c2);
    }
  }
  while (c1.has) em.emit(c1);
  while (c2.has) em.emit(c2);

  st.frames_in_1 = c1.in_count;
  st.frames_in_2 = c2.in_count;
  st.avg_sync_error_us =
      st.duplicates_unified ? err_sum / static_cast<double>(st.duplicates_unified) : 0.0;
  return st;
}

MergeStats merge_files(const std::string& path1, const std::string& path2,
                       const std::string& out_path, const MergeOptions& opts) {
  if (opts.window_w < 1) fail(Errc::usage, "regression window must be at least 1");

  // Pass 1: identifiable frames, intersection, pruning, regression.
  IntersectTable table(extract_uniques(path1));
  {
    TraceReader r2(path2);
    for_each_unique(r2, [&](const UniqueDigest& u) { table.scan(u); });
  }
  IntersectResult ir = table.take_result();
  const uint64_t found = ir.pairs.size();
  const uint64_t collisions = ir.collisions.size();
  const uint64_t suspects = ir.cross_trace_suspects;

  PruneResult pruned =
      prune_invalid_references(std::move(ir.pairs), opts.neighbor_window, opts.delta_max_us);
  ClockMapping mapping = ClockMapping::fit(pruned.kept, opts.window_w);

  // Pass 2: the walk itself.
  TraceReader t1(path1);
  TraceReader t2(path2);
  uint32_t out_lt = t2.header().linktype;
  if (t1.header().linktype != out_lt) out_lt = kLinktypeIeee80211;

  std::optional<TraceWriter> writer;
  if (!out_path.empty()) {
    TraceHeader h;
    h.linktype = out_lt;
    h.snaplen = std::max(t1.header().snaplen, t2.header().snaplen);
    writer.emplace(out_path, h);
  }

  MergeStats st =
      merge_traces(t1, t2, mapping, writer ? &*writer : nullptr, opts.dup_threshold_us);
  if (writer) writer->close();

  st.references_found = found;
  st.references_used = pruned.kept.size();
  st.references_rejected = pruned.rejected.size();
  st.collisions_filtered = collisions;
  st.cross_trace_suspects = suspects;
  return st;
}

MergeStats merge_many(const std::vector<std::string>& paths, const std::string& out_path,
                      const MergeOptions& opts, const MergeStepFn& on_step) {
  if (paths.size() < 2) fail(Errc::usage, "need at least two traces to merge");
  if (out_path.empty()) fail(Errc::usage, "merging requires an output path");

  std::vector<std::string> temps;
  auto cleanup = [&] {
    for (const std::string& t : temps) {
      std::error_code ec;
      std::filesystem::remove(t, ec);
    }
  };

  MergeStats st;
  std::string cur = paths[0];
  try {
    for (size_t k = 1; k < paths.size(); ++k) {
      const bool last = k + 1 == paths.size();
      std::string dst = last ? out_path : out_path + ".step" + std::to_string(k) + ".tmp";
      try {
        st = merge_files(cur, paths[k], dst, opts);
      } catch (const Error& e) {
        fail(e.code(), "merge step " + std::to_string(k) + " (" + cur + " + " + paths[k] +
                           "): " + e.what());
      }
      if (!last) temps.push_back(dst);
      if (on_step) on_step(k - 1, st);
      cur = dst;
    }
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  return st;
}

}  // namespace wimerge
