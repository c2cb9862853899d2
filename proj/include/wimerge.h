/* SPDX-License-Identifier: Apache-2.0
 *
 * wimerge: merging of 802.11 monitor captures with unsynchronized clocks.
 *
 * The library identifies frames that both captures saw (beacons and
 * non-retransmitted probe responses, matched by a 16-byte content digest),
 * fits a piecewise affine clock mapping between the two capture clocks by
 * sliding-window least squares, and merges the traces chronologically,
 * writing frames captured by both monitors only once.
 *
 * All functions returning wm_status leave a human-readable message for the
 * calling thread in wm_last_error() on failure. Handles are opaque and must
 * be released with their matching *_free/_close function.
 */
#ifndef WIMERGE_H
#define WIMERGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WM_API __declspec(dllexport)
#else
#define WM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wm_status {
  WM_OK = 0,
  WM_ERR_USAGE = 1,            /* invalid arguments or parameters */
  WM_ERR_IO = 2,               /* file system failure */
  WM_ERR_BAD_MAGIC = 3,        /* not a microsecond pcap capture */
  WM_ERR_BAD_LINKTYPE = 4,     /* pcap linktype is not 105 or 127 */
  WM_ERR_TRUNCATED = 5,        /* capture or sidecar file cut short */
  WM_ERR_MIXED_LINKTYPE = 6,   /* record linktype does not match the trace */
  WM_ERR_PARSE = 7,            /* malformed frame or text input */
  WM_ERR_TOO_FEW_REFS = 8,     /* not enough shared frames to map clocks */
  WM_ERR_DEGENERATE_WINDOW = 9,/* regression window unusable */
  WM_ERR_UNORDERED_INPUT = 10, /* trace not chronologically ordered */
  WM_ERR_BAD_CONFIG = 11,      /* scenario configuration rejected */
  WM_ERR_EMPTY_SET = 12,       /* operation over an empty collection */
  WM_ERR_TIMESTAMP_RANGE = 13, /* timestamp not representable in pcap */
  WM_ERR_INTERNAL = 14
} wm_status;

WM_API const char *wm_version(void);
WM_API const char *wm_status_name(wm_status s);

/* Message for the last failing call on this thread; empty string if none. */
WM_API const char *wm_last_error(void);

/* Releases strings returned through char** out-parameters. */
WM_API void wm_string_free(char *s);

/* ------------------------------------------------------------------ */
/* Trace i/o (classic pcap, microsecond resolution, linktype 105/127) */

typedef struct wm_reader wm_reader;
typedef struct wm_writer wm_writer;

typedef struct wm_frame {
  uint64_t ts_us;
  uint32_t captured_len;
  uint32_t original_len;
  uint32_t linktype;
  uint64_t ordinal;
  /* Valid until the next wm_reader_next() call on the same reader. */
  const uint8_t *payload;
} wm_frame;

WM_API wm_status wm_reader_open(const char *path, wm_reader **out);
/* *has_frame = 0 at end of trace. */
WM_API wm_status wm_reader_next(wm_reader *r, wm_frame *frame, int *has_frame);
WM_API uint32_t wm_reader_linktype(const wm_reader *r);
WM_API uint32_t wm_reader_snaplen(const wm_reader *r);
WM_API void wm_reader_close(wm_reader *r);

WM_API wm_status wm_writer_create(const char *path, uint32_t linktype, uint32_t snaplen,
                                  wm_writer **out);
WM_API wm_status wm_writer_append(wm_writer *w, const wm_frame *frame);
/* Flushes, closes and releases the writer (also on failure). */
WM_API wm_status wm_writer_close(wm_writer *w);

/* ------------------------------------------------------------------ */
/* Identifiable-frame digests                                          */

typedef struct wm_uniques wm_uniques;

WM_API wm_status wm_uniques_extract(const char *pcap_path, wm_uniques **out);
/* Streaming variant: writes the sidecar without materializing the list. */
WM_API wm_status wm_uniques_extract_to_file(const char *pcap_path, const char *sidecar_path,
                                            uint64_t *count);
WM_API wm_status wm_uniques_load(const char *sidecar_path, wm_uniques **out);
WM_API wm_status wm_uniques_save(const wm_uniques *u, const char *sidecar_path);
WM_API uint64_t wm_uniques_count(const wm_uniques *u);
WM_API wm_status wm_uniques_at(const wm_uniques *u, uint64_t index, uint8_t hash[16],
                               uint64_t *ts_us, uint64_t *ordinal);
WM_API uint64_t wm_uniques_memory_bytes(const wm_uniques *u);
WM_API void wm_uniques_free(wm_uniques *u);

/* ------------------------------------------------------------------ */
/* Reference pairs                                                     */

typedef struct wm_refs wm_refs;

typedef struct wm_ref_pair {
  uint8_t hash[16];
  uint64_t t1_us;
  uint64_t t2_us;
  uint64_t ord1;
  uint64_t ord2;
} wm_ref_pair;

/* Hash-join of two digest lists; digests repeating within u1 are filtered. */
WM_API wm_status wm_intersect(const wm_uniques *u1, const wm_uniques *u2, wm_refs **out);
/* Median-offset and monotonicity pruning, in place. */
WM_API wm_status wm_refs_prune(wm_refs *refs, int neighbor_window, int64_t delta_max_us,
                               uint64_t *rejected);
WM_API uint64_t wm_refs_count(const wm_refs *refs);
WM_API uint64_t wm_refs_collisions(const wm_refs *refs);
WM_API uint64_t wm_refs_cross_trace_suspects(const wm_refs *refs);
WM_API wm_status wm_refs_at(const wm_refs *refs, uint64_t index, wm_ref_pair *out);
/* CSV: hash_hex,t1_us,t2_us,ord1,ord2 with a header line. */
WM_API wm_status wm_refs_save_csv(const wm_refs *refs, const char *path);
WM_API void wm_refs_free(wm_refs *refs);

/* ------------------------------------------------------------------ */
/* Clock mapping                                                       */

typedef struct wm_mapping wm_mapping;

/* Piecewise affine fit over sliding windows of window_w + 1 references.
 * Requires pruned references (strictly increasing in both clocks). */
WM_API wm_status wm_mapping_fit(const wm_refs *refs, int window_w, wm_mapping **out);
WM_API int64_t wm_mapping_apply(const wm_mapping *m, uint64_t t1_us);
WM_API uint64_t wm_mapping_segment_count(const wm_mapping *m);
WM_API wm_status wm_mapping_segment(const wm_mapping *m, uint64_t index, uint64_t *t1_start_us,
                                    uint64_t *t1_end_us, double *slope, double *intercept_us);
/* Mean |apply(t1) - t2| over n observation pairs. */
WM_API wm_status wm_sync_error(const wm_mapping *m, const uint64_t *t1_us, const uint64_t *t2_us,
                               size_t n, double *avg_abs_error_us);
WM_API void wm_mapping_free(wm_mapping *m);

/* ------------------------------------------------------------------ */
/* Merging                                                             */

typedef struct wm_merge_options {
  int window_w;             /* regression window parameter, default 2 */
  int neighbor_window;      /* pruning: neighbors consulted, default 5 */
  int64_t delta_max_us;     /* pruning: offset deviation bound, default 100000 */
  int64_t dup_threshold_us; /* |mapped t1 - t2| strictly below unifies, default 106 */
} wm_merge_options;

WM_API void wm_merge_options_init(wm_merge_options *opts);

typedef struct wm_merge_stats {
  uint64_t frames_in_1;
  uint64_t frames_in_2;
  uint64_t duplicates_unified;
  uint64_t frames_out;
  double avg_sync_error_us; /* mean |mapped t1 - t2| over unified frames */
  uint64_t references_found;
  uint64_t references_used;
  uint64_t references_rejected;
  uint64_t collisions_filtered;
  uint64_t cross_trace_suspects;
  uint64_t order_violations_out;
  uint64_t clamped_timestamps;
  uint64_t malformed_dropped;
} wm_merge_stats;

/* Full two-trace pipeline. out_path NULL or empty = dry run (stats only).
 * The output linktype is trace 2's when both inputs agree; otherwise frames
 * are rewritten to bare MAC bytes (linktype 105). */
WM_API wm_status wm_merge_files(const char *trace1, const char *trace2, const char *out_path,
                                const wm_merge_options *opts, wm_merge_stats *stats);

typedef void (*wm_merge_step_fn)(size_t step, const wm_merge_stats *stats, void *user);

/* Left fold over count >= 2 traces; intermediates are temporary files next
 * to out_path. on_step may be NULL. */
WM_API wm_status wm_merge_many(const char *const *paths, size_t count, const char *out_path,
                               const wm_merge_options *opts, wm_merge_step_fn on_step, void *user,
                               wm_merge_stats *final_stats);

/* ------------------------------------------------------------------ */
/* Merge-result validation                                             */

typedef struct wm_validation wm_validation;

WM_API wm_status wm_validate(const char *pcap_path, wm_validation **out);
WM_API uint64_t wm_validation_duplicate_unique_groups(const wm_validation *v);
WM_API uint64_t wm_validation_duplicate_data_anomalies(const wm_validation *v);
/* Human-readable report; release with wm_string_free(). */
WM_API char *wm_validation_format(const wm_validation *v);
WM_API void wm_validation_free(wm_validation *v);

/* ------------------------------------------------------------------ */
/* Synthetic ground-truth scenarios                                    */

/* Runs the scenario described by a key=value config file, writing air.pcap
 * (optional), monitor<k>.pcap and monitor<k>.csv under out_dir. When summary
 * is non-NULL it receives a text summary (release with wm_string_free). */
WM_API wm_status wm_gen_run(const char *config_path, const char *out_dir, char **summary);

#ifdef __cplusplus
}
#endif

#endif /* WIMERGE_H */
