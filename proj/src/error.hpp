// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wimerge {

enum class Errc {
  ok = 0,
  usage,
  io,
  bad_magic,
  bad_linktype,
  truncated,
  mixed_linktype,
  parse,
  too_few_refs,
  degenerate_window,
  unordered_input,
  bad_config,
  empty_set,
  timestamp_range,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::usage: return "usage";
    case Errc::io: return "io";
    case Errc::bad_magic: return "bad_magic";
    case Errc::bad_linktype: return "bad_linktype";
    case Errc::truncated: return "truncated";
    case Errc::mixed_linktype: return "mixed_linktype";
    case Errc::parse: return "parse";
    case Errc::too_few_refs: return "too_few_refs";
    case Errc::degenerate_window: return "degenerate_window";
    case Errc::unordered_input: return "unordered_input";
    case Errc::bad_config: return "bad_config";
    case Errc::empty_set: return "empty_set";
    case Errc::timestamp_range: return "timestamp_range";
  }
  return "unknown";
}

}  // namespace wimerge
