// SPDX-License-Identifier: Apache-2.0
//
// Command line front end for the wimerge library. Talks to the shared
// library through its C interface only.

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wimerge.h"

namespace {

namespace fs = std::filesystem;

int exit_code_for(wm_status s) {
  switch (s) {
    case WM_OK:
      return 0;
    case WM_ERR_USAGE:
      return 1;
    case WM_ERR_TOO_FEW_REFS:
    case WM_ERR_DEGENERATE_WINDOW:
      return 4;
    default:
      return 2;
  }
}

int report_failure(wm_status s, const char* what) {
  std::fprintf(stderr, "wimerge: %s: %s (%s)\n", what, wm_last_error(), wm_status_name(s));
  return exit_code_for(s);
}

void print_stats(const wm_merge_stats& st, const std::string& label, bool kv) {
  if (kv) {
    std::printf("%s.frames_in_1=%" PRIu64 "\n", label.c_str(), st.frames_in_1);
    std::printf("%s.frames_in_2=%" PRIu64 "\n", label.c_str(), st.frames_in_2);
    std::printf("%s.duplicates_unified=%" PRIu64 "\n", label.c_str(), st.duplicates_unified);
    std::printf("%s.frames_out=%" PRIu64 "\n", label.c_str(), st.frames_out);
    std::printf("%s.avg_sync_error_us=%.3f\n", label.c_str(), st.avg_sync_error_us);
    std::printf("%s.references_found=%" PRIu64 "\n", label.c_str(), st.references_found);
    std::printf("%s.references_used=%" PRIu64 "\n", label.c_str(), st.references_used);
    std::printf("%s.references_rejected=%" PRIu64 "\n", label.c_str(), st.references_rejected);
    std::printf("%s.collisions_filtered=%" PRIu64 "\n", label.c_str(), st.collisions_filtered);
    std::printf("%s.cross_trace_suspects=%" PRIu64 "\n", label.c_str(), st.cross_trace_suspects);
    std::printf("%s.order_violations_out=%" PRIu64 "\n", label.c_str(), st.order_violations_out);
    std::printf("%s.clamped_timestamps=%" PRIu64 "\n", label.c_str(), st.clamped_timestamps);
    std::printf("%s.malformed_dropped=%" PRIu64 "\n", label.c_str(), st.malformed_dropped);
  } else {
    std::printf("%s: %" PRIu64 " + %" PRIu64 " frames -> %" PRIu64 " (%" PRIu64
                " duplicates unified, avg sync error %.2f us)\n",
                label.c_str(), st.frames_in_1, st.frames_in_2, st.frames_out,
                st.duplicates_unified, st.avg_sync_error_us);
    std::printf("%s: references %" PRIu64 " found / %" PRIu64 " used / %" PRIu64
                " rejected, %" PRIu64 " collisions filtered, %" PRIu64 " cross-trace suspects\n",
                label.c_str(), st.references_found, st.references_used, st.references_rejected,
                st.collisions_filtered, st.cross_trace_suspects);
    if (st.order_violations_out || st.clamped_timestamps || st.malformed_dropped)
      std::printf("%s: diagnostics: %" PRIu64 " order violations, %" PRIu64
                  " clamped timestamps, %" PRIu64 " dropped malformed frames\n",
                  label.c_str(), st.order_violations_out, st.clamped_timestamps,
                  st.malformed_dropped);
  }
}

struct StepPrinter {
  bool kv = false;
  size_t total_steps = 0;
};

void on_merge_step(size_t step, const wm_merge_stats* st, void* user) {
  auto* p = static_cast<StepPrinter*>(user);
  if (p->total_steps > 1) print_stats(*st, "step" + std::to_string(step), p->kv);
}

// ---------------------------------------------------------------------
// merge

int cmd_merge(const std::vector<std::string>& inputs, const std::string& output, int window,
              int neighbor_window, int64_t delta_max, int64_t dup_threshold, bool kv) {
  wm_merge_options opts;
  wm_merge_options_init(&opts);
  opts.window_w = window;
  opts.neighbor_window = neighbor_window;
  opts.delta_max_us = delta_max;
  opts.dup_threshold_us = dup_threshold;

  std::vector<const char*> paths;
  for (const std::string& p : inputs) paths.push_back(p.c_str());

  wm_merge_stats st;
  StepPrinter printer{kv, inputs.size() - 1};
  wm_status rc = wm_merge_many(paths.data(), paths.size(), output.c_str(), &opts, on_merge_step,
                               &printer, &st);
  if (rc != WM_OK) return report_failure(rc, "merge");
  print_stats(st, "final", kv);
  if (!kv) std::printf("wrote %s\n", output.c_str());
  return 0;
}

// ---------------------------------------------------------------------
// uniques

int cmd_uniques(const std::string& input, std::string output, bool kv) {
  if (output.empty()) output = input + ".uniq";
  uint64_t count = 0;
  wm_status rc = wm_uniques_extract_to_file(input.c_str(), output.c_str(), &count);
  if (rc != WM_OK) return report_failure(rc, "uniques");
  if (kv) {
    std::printf("count=%" PRIu64 "\n", count);
    std::printf("sidecar=%s\n", output.c_str());
  } else {
    std::printf("%" PRIu64 " identifiable frames -> %s\n", count, output.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------
// intersect

int cmd_intersect(const std::string& side1, const std::string& side2, const std::string& csv,
                  bool prune, int neighbor_window, int64_t delta_max, bool kv) {
  wm_uniques* u1 = nullptr;
  wm_uniques* u2 = nullptr;
  wm_refs* refs = nullptr;
  auto cleanup = [&] {
    wm_refs_free(refs);
    wm_uniques_free(u2);
    wm_uniques_free(u1);
  };

  wm_status rc = wm_uniques_load(side1.c_str(), &u1);
  if (rc == WM_OK) rc = wm_uniques_load(side2.c_str(), &u2);
  if (rc == WM_OK) rc = wm_intersect(u1, u2, &refs);
  if (rc != WM_OK) {
    cleanup();
    return report_failure(rc, "intersect");
  }

  uint64_t found = wm_refs_count(refs);
  uint64_t rejected = 0;
  if (prune) {
    rc = wm_refs_prune(refs, neighbor_window, delta_max, &rejected);
    if (rc != WM_OK) {
      cleanup();
      return report_failure(rc, "intersect");
    }
  }
  if (!csv.empty()) {
    rc = wm_refs_save_csv(refs, csv.c_str());
    if (rc != WM_OK) {
      cleanup();
      return report_failure(rc, "intersect");
    }
  }

  if (kv) {
    std::printf("digests_1=%" PRIu64 "\n", wm_uniques_count(u1));
    std::printf("digests_2=%" PRIu64 "\n", wm_uniques_count(u2));
    std::printf("pairs_found=%" PRIu64 "\n", found);
    std::printf("pairs_kept=%" PRIu64 "\n", wm_refs_count(refs));
    std::printf("pairs_rejected=%" PRIu64 "\n", rejected);
    std::printf("collisions=%" PRIu64 "\n", wm_refs_collisions(refs));
    std::printf("cross_trace_suspects=%" PRIu64 "\n", wm_refs_cross_trace_suspects(refs));
  } else {
    std::printf("%" PRIu64 " x %" PRIu64 " digests: %" PRIu64 " pairs", wm_uniques_count(u1),
                wm_uniques_count(u2), found);
    if (prune)
      std::printf(", %" PRIu64 " kept / %" PRIu64 " rejected", wm_refs_count(refs), rejected);
    std::printf(", %" PRIu64 " collisions filtered, %" PRIu64 " cross-trace suspects\n",
                wm_refs_collisions(refs), wm_refs_cross_trace_suspects(refs));
    if (!csv.empty()) std::printf("wrote %s\n", csv.c_str());
  }
  cleanup();
  return 0;
}

// ---------------------------------------------------------------------
// sync-error

int cmd_sync_error(const std::string& trace1, const std::string& trace2, int window, bool sweep,
                   int neighbor_window, int64_t delta_max, int64_t dup_threshold, bool kv) {
  wm_merge_options opts;
  wm_merge_options_init(&opts);
  opts.neighbor_window = neighbor_window;
  opts.delta_max_us = delta_max;
  opts.dup_threshold_us = dup_threshold;

  int w_lo = sweep ? 1 : window;
  int w_hi = sweep ? 10 : window;
  if (sweep && !kv) std::printf("w,references_used,duplicates,avg_sync_error_us\n");
  for (int w = w_lo; w <= w_hi; ++w) {
    opts.window_w = w;
    wm_merge_stats st;
    // Dry run: the shared set is the duplicates the merge itself identifies.
    wm_status rc = wm_merge_files(trace1.c_str(), trace2.c_str(), nullptr, &opts, &st);
    if (rc != WM_OK) return report_failure(rc, "sync-error");
    if (sweep) {
      if (kv) {
        std::printf("w%d.avg_sync_error_us=%.3f\n", w, st.avg_sync_error_us);
        std::printf("w%d.duplicates=%" PRIu64 "\n", w, st.duplicates_unified);
      } else {
        std::printf("%d,%" PRIu64 ",%" PRIu64 ",%.3f\n", w, st.references_used,
                    st.duplicates_unified, st.avg_sync_error_us);
      }
    } else if (kv) {
      std::printf("references_found=%" PRIu64 "\n", st.references_found);
      std::printf("references_used=%" PRIu64 "\n", st.references_used);
      std::printf("duplicates=%" PRIu64 "\n", st.duplicates_unified);
      std::printf("avg_sync_error_us=%.3f\n", st.avg_sync_error_us);
    } else {
      std::printf("references: %" PRIu64 " found, %" PRIu64 " used\n", st.references_found,
                  st.references_used);
      std::printf("shared frames (duplicates): %" PRIu64 "\n", st.duplicates_unified);
      std::printf("average sync error: %.3f us (w=%d)\n", st.avg_sync_error_us, w);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------
// validate

int cmd_validate(const std::string& input, bool kv) {
  wm_validation* v = nullptr;
  wm_status rc = wm_validate(input.c_str(), &v);
  if (rc != WM_OK) return report_failure(rc, "validate");
  uint64_t groups = wm_validation_duplicate_unique_groups(v);
  uint64_t anomalies = wm_validation_duplicate_data_anomalies(v);
  if (kv) {
    std::printf("duplicate_unique_groups=%" PRIu64 "\n", groups);
    std::printf("duplicate_data_anomalies=%" PRIu64 "\n", anomalies);
  } else {
    char* text = wm_validation_format(v);
    if (text) std::fputs(text, stdout);
    wm_string_free(text);
  }
  wm_validation_free(v);
  return (groups || anomalies) ? 3 : 0;
}

// ---------------------------------------------------------------------
// gen

int cmd_gen(const std::string& config, const std::string& outdir, bool quiet) {
  char* summary = nullptr;
  wm_status rc = wm_gen_run(config.c_str(), outdir.c_str(), quiet ? nullptr : &summary);
  if (rc != WM_OK) return report_failure(rc, "gen");
  if (summary) std::fputs(summary, stdout);
  wm_string_free(summary);
  return 0;
}

// ---------------------------------------------------------------------
// bench

std::string self_exe_path(const char* argv0) {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n > 0) {
    buf[n] = '\0';
    return buf;
  }
  return argv0;
}

struct ChildResult {
  int exit_code = -1;
  double wall_s = 0;
  long max_rss_kb = 0;
};

// Runs the command with stdout silenced, measuring wall time and the child's
// peak resident set.
int run_child(const std::vector<std::string>& args, ChildResult* out) {
  std::vector<char*> argv;
  for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  auto t0 = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    std::perror("fork");
    return -1;
  }
  if (pid == 0) {
    if (!::freopen("/dev/null", "w", stdout)) ::_exit(127);
    ::execv(argv[0], argv.data());
    std::perror("execv");
    ::_exit(127);
  }
  int status = 0;
  struct rusage ru {};
  if (::wait4(pid, &status, 0, &ru) < 0) {
    std::perror("wait4");
    return -1;
  }
  auto t1 = std::chrono::steady_clock::now();
  out->wall_s = std::chrono::duration<double>(t1 - t0).count();
  out->max_rss_kb = ru.ru_maxrss;
  out->exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return 0;
}

uint64_t file_size(const std::string& path) {
  std::error_code ec;
  auto n = fs::file_size(path, ec);
  return ec ? 0 : static_cast<uint64_t>(n);
}

int bench_scale(const std::string& self, const std::vector<int>& sizes_mb, int repeat,
                const std::string& workdir, std::FILE* csv, bool keep) {
  std::fprintf(csv, "size_mb,input_bytes,wall_s,throughput_mb_s,peak_rss_kb\n");
  struct Row {
    uint64_t bytes;
    double wall;
    long rss;
  };
  std::vector<Row> rows;

  for (int size_mb : sizes_mb) {
    fs::path dir = fs::path(workdir) / ("scale_" + std::to_string(size_mb));
    fs::create_directories(dir);

    // Fixed frame count: the payload grows with the target size, so the
    // digest table stays the same and memory differences reflect streaming
    // behaviour, not table growth.
    const double duration_s = 30.0;
    const double data_fps = 2000.0;
    uint64_t per_monitor = uint64_t{static_cast<uint64_t>(size_mb)} * 1000000ull;
    int64_t payload = static_cast<int64_t>(per_monitor / (duration_s * data_fps)) - 60;
    payload = std::clamp<int64_t>(payload, 64, 60000);

    fs::path cfg_path = dir / "scenario.conf";
    {
      std::ofstream cfg(cfg_path);
      cfg << "seed=" << 7100 + size_mb << "\n";
      cfg << "duration_us=" << static_cast<uint64_t>(duration_s * 1e6) << "\n";
      cfg << "beacon_interval_us=100000\n";
      cfg << "ap_count=1\n";
      cfg << "client_count=4\n";
      cfg << "data_rate_fps=" << data_fps << "\n";
      cfg << "data_payload_bytes=" << payload << "\n";
      cfg << "probe_rate_fps=2\n";
      cfg << "probe_retry_prob=0.2\n";
      cfg << "write_air=0\n";
      cfg << "monitor_count=2\n";
      cfg << "monitor.0.loss=0.05\n";
      cfg << "monitor.0.clock_slope=1.00002\n";
      cfg << "monitor.0.clock_offset_us=1500000\n";
      cfg << "monitor.0.jitter_us=5\n";
      cfg << "monitor.1.loss=0.05\n";
      cfg << "monitor.1.clock_slope=0.999985\n";
      cfg << "monitor.1.clock_offset_us=-2300000\n";
      cfg << "monitor.1.jitter_us=5\n";
    }
    wm_status rc = wm_gen_run(cfg_path.c_str(), dir.c_str(), nullptr);
    if (rc != WM_OK) return report_failure(rc, "bench gen");

    std::string m0 = (dir / "monitor0.pcap").string();
    std::string m1 = (dir / "monitor1.pcap").string();
    std::string out = (dir / "merged.pcap").string();
    uint64_t input_bytes = file_size(m0) + file_size(m1);

    // Best of `repeat` runs: wall time on a busy machine is noisy and the
    // minimum is the stable estimate of the true cost.
    ChildResult child;
    for (int r = 0; r < repeat; ++r) {
      ChildResult attempt;
      if (run_child({self, "merge", m0, m1, "-o", out}, &attempt) != 0 ||
          attempt.exit_code != 0) {
        std::fprintf(stderr, "wimerge: bench: merge child failed (exit %d)\n",
                     attempt.exit_code);
        return 2;
      }
      if (r == 0 || attempt.wall_s < child.wall_s) child = attempt;
    }

    std::fprintf(csv, "%d,%" PRIu64 ",%.3f,%.2f,%ld\n", size_mb, input_bytes, child.wall_s,
                 static_cast<double>(input_bytes) / 1e6 / child.wall_s, child.max_rss_kb);
    std::fflush(csv);
    rows.push_back({input_bytes, child.wall_s, child.max_rss_kb});

    if (!keep) {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  }

  if (rows.size() >= 3) {
    // Least squares wall = a * bytes + b, then the largest relative residual.
    double n = static_cast<double>(rows.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const Row& r : rows) {
      double x = static_cast<double>(r.bytes);
      sx += x;
      sy += r.wall;
      sxx += x * x;
      sxy += x * r.wall;
    }
    double denom = n * sxx - sx * sx;
    if (denom > 0) {
      double a = (n * sxy - sx * sy) / denom;
      double b = (sy - a * sx) / n;
      double worst = 0;
      for (const Row& r : rows) {
        double fit = a * static_cast<double>(r.bytes) + b;
        if (fit > 0) worst = std::max(worst, std::abs(r.wall - fit) / fit);
      }
      std::fprintf(csv, "# linear fit: wall_s = %.3e * bytes + %.3f, max deviation %.1f%%\n", a,
                   b, worst * 100.0);
    }
    long rss_min = rows[0].rss, rss_max = rows[0].rss;
    for (const Row& r : rows) {
      rss_min = std::min(rss_min, r.rss);
      rss_max = std::max(rss_max, r.rss);
    }
    std::fprintf(csv, "# peak rss spread: %ld..%ld kb (%.1f%%)\n", rss_min, rss_max,
                 rss_min > 0 ? 100.0 * (rss_max - rss_min) / rss_min : 0.0);
  }
  return 0;
}

int bench_digest_mem(uint64_t digests, const std::string& workdir, std::FILE* csv, bool keep) {
  fs::path dir = fs::path(workdir) / "digest_mem";
  fs::create_directories(dir);

  // Ten cells at 10ms intervals: 1000 identifiable frames per second.
  uint64_t duration_us = digests * 1000 + 200000;
  fs::path cfg_path = dir / "scenario.conf";
  {
    std::ofstream cfg(cfg_path);
    cfg << "seed=4242\n";
    cfg << "duration_us=" << duration_us << "\n";
    cfg << "beacon_interval_us=10000\n";
    cfg << "ap_count=10\n";
    cfg << "client_count=1\n";
    cfg << "data_rate_fps=0\n";
    cfg << "probe_rate_fps=0\n";
    cfg << "write_air=0\n";
    cfg << "monitor_count=1\n";
    cfg << "monitor.0.linktype=105\n";
  }
  wm_status rc = wm_gen_run(cfg_path.c_str(), dir.c_str(), nullptr);
  if (rc != WM_OK) return report_failure(rc, "bench gen");

  std::string pcap = (dir / "monitor0.pcap").string();
  wm_uniques* u = nullptr;
  rc = wm_uniques_extract(pcap.c_str(), &u);
  if (rc != WM_OK) return report_failure(rc, "bench extract");
  uint64_t count = wm_uniques_count(u);
  uint64_t bytes = wm_uniques_memory_bytes(u);
  wm_uniques_free(u);

  std::fprintf(csv, "digests,heap_bytes,bytes_per_digest\n");
  std::fprintf(csv, "%" PRIu64 ",%" PRIu64 ",%.2f\n", count, bytes,
               count ? static_cast<double>(bytes) / static_cast<double>(count) : 0.0);
  if (!keep) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wimerge: merge 802.11 monitor captures with unsynchronized clocks"};
  app.set_version_flag("--version", std::string("wimerge ") + wm_version());
  app.require_subcommand(1);

  // merge
  auto* merge = app.add_subcommand("merge", "merge two or more captures into one");
  std::vector<std::string> merge_inputs;
  std::string merge_output;
  int opt_window = 2;
  int opt_neighbors = 5;
  int64_t opt_delta_max = 100000;
  int64_t opt_dup_threshold = 106;
  bool opt_kv = false;
  merge->add_option("inputs", merge_inputs, "input pcap files (chronological)")
      ->required()
      ->expected(2, -1);
  merge->add_option("-o,--output", merge_output, "merged pcap path")->required();
  merge->add_option("-w,--window", opt_window, "regression window parameter");
  merge->add_option("--neighbor-window", opt_neighbors, "reference pruning: neighbors consulted");
  merge->add_option("--delta-max", opt_delta_max, "reference pruning: offset deviation bound, us");
  merge->add_option("--dup-threshold", opt_dup_threshold, "duplicate unification threshold, us");
  merge->add_flag("--kv", opt_kv, "machine readable key=value output");

  // uniques
  auto* uniques = app.add_subcommand("uniques", "extract identifiable-frame digests");
  std::string uniq_input, uniq_output;
  uniques->add_option("input", uniq_input, "input pcap")->required();
  uniques->add_option("-o,--output", uniq_output, "sidecar path (default: <input>.uniq)");
  uniques->add_flag("--kv", opt_kv, "machine readable key=value output");

  // intersect
  auto* intersect = app.add_subcommand("intersect", "match digest sidecars into reference pairs");
  std::string ix_side1, ix_side2, ix_csv;
  bool ix_prune = false;
  intersect->add_option("sidecar1", ix_side1, "first digest sidecar")->required();
  intersect->add_option("sidecar2", ix_side2, "second digest sidecar")->required();
  intersect->add_option("-o,--csv", ix_csv, "write reference pairs as CSV");
  intersect->add_flag("--prune", ix_prune, "drop implausible pairs");
  intersect->add_option("--neighbor-window", opt_neighbors, "pruning: neighbors consulted");
  intersect->add_option("--delta-max", opt_delta_max, "pruning: offset deviation bound, us");
  intersect->add_flag("--kv", opt_kv, "machine readable key=value output");

  // sync-error
  auto* syncerr = app.add_subcommand("sync-error", "report clock mapping quality for a pair");
  std::string se_trace1, se_trace2;
  bool se_sweep = false;
  syncerr->add_option("trace1", se_trace1, "first pcap")->required();
  syncerr->add_option("trace2", se_trace2, "second pcap")->required();
  syncerr->add_option("-w,--window", opt_window, "regression window parameter");
  syncerr->add_flag("--sweep", se_sweep, "evaluate w = 1..10");
  syncerr->add_option("--neighbor-window", opt_neighbors, "pruning: neighbors consulted");
  syncerr->add_option("--delta-max", opt_delta_max, "pruning: offset deviation bound, us");
  syncerr->add_option("--dup-threshold", opt_dup_threshold, "duplicate unification threshold, us");
  syncerr->add_flag("--kv", opt_kv, "machine readable key=value output");

  // validate
  auto* validate = app.add_subcommand("validate", "scan a merge result for leftover duplicates");
  std::string val_input;
  validate->add_option("input", val_input, "pcap to scan")->required();
  validate->add_flag("--kv", opt_kv, "machine readable key=value output");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic scenario with ground truth");
  std::string gen_config, gen_outdir;
  bool gen_quiet = false;
  gen->add_option("config", gen_config, "key=value scenario description")->required();
  gen->add_option("-o,--outdir", gen_outdir, "output directory")->required();
  gen->add_flag("-q,--quiet", gen_quiet, "suppress the summary");

  // bench
  auto* bench = app.add_subcommand("bench", "measure merge throughput and memory");
  std::string bench_mode = "scale";
  std::vector<int> bench_sizes = {100, 500, 1000};
  std::string bench_workdir;
  std::string bench_csv;
  uint64_t bench_digests = 1000000;
  int bench_repeat = 1;
  bool bench_keep = false;
  bench->add_option("--mode", bench_mode, "scale or digest-mem")
      ->check(CLI::IsMember({"scale", "digest-mem"}));
  bench->add_option("--sizes-mb", bench_sizes, "per-monitor trace sizes for scale mode");
  bench->add_option("--workdir", bench_workdir, "scratch directory (default: TMPDIR)");
  bench->add_option("--csv", bench_csv, "write results here instead of stdout");
  bench->add_option("--digests", bench_digests, "digest count for digest-mem mode");
  bench->add_option("--repeat", bench_repeat, "scale mode: best of N merge runs per size")
      ->check(CLI::Range(1, 20));
  bench->add_flag("--keep", bench_keep, "keep generated scenario files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (merge->parsed())
    return cmd_merge(merge_inputs, merge_output, opt_window, opt_neighbors, opt_delta_max,
                     opt_dup_threshold, opt_kv);
  if (uniques->parsed()) return cmd_uniques(uniq_input, uniq_output, opt_kv);
  if (intersect->parsed())
    return cmd_intersect(ix_side1, ix_side2, ix_csv, ix_prune, opt_neighbors, opt_delta_max,
                         opt_kv);
  if (syncerr->parsed())
    return cmd_sync_error(se_trace1, se_trace2, opt_window, se_sweep, opt_neighbors,
                          opt_delta_max, opt_dup_threshold, opt_kv);
  if (validate->parsed()) return cmd_validate(val_input, opt_kv);
  if (gen->parsed()) return cmd_gen(gen_config, gen_outdir, gen_quiet);
  if (bench->parsed()) {
    if (bench_workdir.empty()) {
      const char* tmp = std::getenv("TMPDIR");
      bench_workdir = (fs::path(tmp ? tmp : "/tmp") / "wimerge_bench").string();
    }
    std::FILE* csv = stdout;
    if (!bench_csv.empty()) {
      csv = std::fopen(bench_csv.c_str(), "w");
      if (!csv) {
        std::perror(bench_csv.c_str());
        return 2;
      }
    }
    int rc;
    if (bench_mode == "digest-mem")
      rc = bench_digest_mem(bench_digests, bench_workdir, csv, bench_keep);
    else
      rc = bench_scale(self_exe_path(argv[0]), bench_sizes, bench_repeat, bench_workdir, csv,
                       bench_keep);
    if (csv != stdout) std::fclose(csv);
    return rc;
  }
  return 1;
}
