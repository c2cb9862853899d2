// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "sync.hpp"

using namespace wimerge;

namespace {

Digest128 tag(uint64_t i) {
  Digest128 d;
  d.bytes[0] = static_cast<uint8_t>(i);
  d.bytes[1] = static_cast<uint8_t>(i >> 8);
  return d;
}

// t2 = t1 + (t1 - t1_first) * ppm/1e6 + offset, exact in integers when the
// spacing is a multiple of 1e6/ppm.
std::vector<ReferencePair> drifted_refs(size_t n, uint64_t t1_first, uint64_t step_us,
                                        int64_t ppm, int64_t offset_us) {
  std::vector<ReferencePair> v;
  for (size_t i = 0; i < n; ++i) {
    uint64_t t1 = t1_first + i * step_us;
    int64_t drift = static_cast<int64_t>(i) * static_cast<int64_t>(step_us) * ppm / 1'000'000;
    v.push_back({tag(i), t1, static_cast<uint64_t>(static_cast<int64_t>(t1) + drift + offset_us),
                 i, i});
  }
  return v;
}

}  // namespace

TEST_CASE("an exact affine clock is recovered at epoch-scale timestamps") {
  // 50 ppm fast, 8 seconds behind, reference times around 1.6e15 us. Collinear
  // integer points, so the fitted line must pass through every reference; a
  // naive slope*t1+b evaluation in doubles would already be off at this scale.
  auto refs = drifted_refs(10, 1'600'000'000'000'000ull, 100'000, 50, -8'000'000'000);

  for (int w : {1, 2, 3, 5, 9}) {
    ClockMapping m = ClockMapping::fit(refs, w);
    REQUIRE(m.segments().size() == refs.size());
    for (const auto& r : refs) {
      CHECK(m.apply_us(r.t1_us) == static_cast<int64_t>(r.t2_us));
    }
    // Between references the mapping must stay on the line.
    for (size_t i = 0; i + 1 < refs.size(); ++i) {
      uint64_t mid = refs[i].t1_us + 40'000;
      double expect = static_cast<double>(refs[i].t2_us) + 40'000 * (1.0 + 50e-6);
      CHECK(std::abs(m.apply_exact(mid) - expect) < 0.01);
    }
  }
}

TEST_CASE("window size one interpolates between adjacent references") {
  std::vector<ReferencePair> refs = {
      {tag(0), 1'000'000, 2'000'000, 0, 0},
      {tag(1), 2'000'000, 3'000'200, 1, 1},
      {tag(2), 3'000'000, 4'000'200, 2, 2},
  };
  ClockMapping m = ClockMapping::fit(refs, 1);
  CHECK(m.apply_us(1'000'000) == 2'000'000);
  CHECK(m.apply_us(2'000'000) == 3'000'200);
  CHECK(m.apply_us(1'500'000) == 2'500'100);  // halfway up the first piece
  CHECK(m.apply_us(3'000'000) == 4'000'200);
  // Beyond the ends the edge pieces extrapolate.
  CHECK(m.apply_us(500'000) == 1'499'900);
  CHECK(m.apply_us(3'500'000) == 4'500'200);
}

TEST_CASE("segments tile the reference axis") {
  auto refs = drifted_refs(6, 1'000'000, 500'000, 0, 777);
  ClockMapping m = ClockMapping::fit(refs, 2);
  auto segs = m.segments();
  REQUIRE(segs.size() == 6);
  for (size_t i = 0; i < segs.size(); ++i) {
    CHECK(segs[i].t1_start == refs[i].t1_us);
    if (i + 1 < segs.size())
      CHECK(segs[i].t1_end == refs[i + 1].t1_us);
    else
      CHECK(segs[i].t1_end == UINT64_MAX);
  }
  // Far outside the reference span the edge segments still answer.
  CHECK(m.apply_us(0) == 777);
  CHECK(m.apply_us(100'000'000) == 100'000'777);
}

TEST_CASE("edge windows reuse the first and last full window") {
  auto refs = drifted_refs(4, 1'000'000, 250'000, 40, 0);
  ClockMapping m = ClockMapping::fit(refs, 2);
  auto segs = m.segments();
  REQUIRE(segs.size() == 4);
  // Segments 0 and 1 are fitted on references 0..2, segments 2 and 3 on 1..3.
  CHECK(segs[0].slope == segs[1].slope);
  CHECK(segs[0].t1_anchor == segs[1].t1_anchor);
  CHECK(segs[0].x_center == segs[1].x_center);
  CHECK(segs[0].y_center == segs[1].y_center);
  CHECK(segs[2].slope == segs[3].slope);
  CHECK(segs[2].t1_anchor == segs[3].t1_anchor);
  CHECK(segs[1].t1_anchor != segs[2].t1_anchor);
}

TEST_CASE("a piecewise drift change is tracked by interior windows") {
  // Clock runs true for 6 references, then 100 ppm fast. With w=1 every
  // segment away from the knot is fitted inside a single regime and must be
  // exact there.
  std::vector<ReferencePair> refs;
  uint64_t t1_first = 1'000'000'000;
  for (size_t i = 0; i < 12; ++i) {
    uint64_t t1 = t1_first + i * 1'000'000;
    int64_t extra = i > 6 ? static_cast<int64_t>(i - 6) * 100 : 0;  // +100 us per s past knot
    refs.push_back({tag(i), t1, t1 + 5000 + static_cast<uint64_t>(extra), i, i});
  }
  ClockMapping m = ClockMapping::fit(refs, 1);
  for (size_t i = 0; i < refs.size(); ++i) CHECK(m.apply_us(refs[i].t1_us) == static_cast<int64_t>(refs[i].t2_us));
  // Interior of the first regime: slope exactly 1.
  CHECK(m.apply_us(refs[2].t1_us + 300'000) == static_cast<int64_t>(refs[2].t2_us) + 300'000);
  // Interior of the second regime: slope exactly 1.0001.
  int64_t expect = static_cast<int64_t>(refs[8].t2_us) + 300'030;
  CHECK(m.apply_us(refs[8].t1_us + 300'000) == expect);
}

TEST_CASE("identity mapping returns its input") {
  ClockMapping id = ClockMapping::identity();
  CHECK(id.apply_us(0) == 0);
  CHECK(id.apply_us(123) == 123);
  CHECK(id.apply_us(1'600'000'000'000'000ull) == 1'600'000'000'000'000ll);
  CHECK(id.segments().size() == 1);
}

TEST_CASE("fit validates its inputs") {
  auto refs = drifted_refs(5, 1'000'000, 100'000, 0, 0);

  SUBCASE("window below one") {
    try {
      ClockMapping::fit(refs, 0);
      FAIL("expected a usage error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::usage);
    }
  }
  SUBCASE("not enough references for the window") {
    try {
      ClockMapping::fit(refs, 5);
      FAIL("expected a too-few-references error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::too_few_refs);
    }
  }
  SUBCASE("references must increase in t1") {
    auto bad = refs;
    bad[2].t1_us = bad[1].t1_us;
    try {
      ClockMapping::fit(bad, 1);
      FAIL("expected a usage error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::usage);
    }
  }
  SUBCASE("references must increase in t2") {
    auto bad = refs;
    bad[3].t2_us = bad[2].t2_us - 1;
    try {
      ClockMapping::fit(bad, 1);
      FAIL("expected a usage error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::usage);
    }
  }
}

TEST_CASE("implausible fitted rates are refused") {
  // t2 advancing twice as fast as t1 is not a real oscillator.
  std::vector<ReferencePair> refs;
  for (size_t i = 0; i < 4; ++i)
    refs.push_back({tag(i), 1'000'000 + i * 1'000'000, 1'000'000 + i * 2'000'000, i, i});
  try {
    ClockMapping::fit(refs, 1);
    FAIL("expected a degenerate-window error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_window);
    CHECK(std::string(e.what()).find("clock rate") != std::string::npos);
  }
}

TEST_CASE("average error over a shared set") {
  ClockMapping id = ClockMapping::identity();
  std::vector<std::pair<uint64_t, uint64_t>> shared = {
      {1000, 1003}, {2000, 1998}, {3000, 3000}};
  CHECK(average_sync_error_us(shared, id) == doctest::Approx((3 + 2 + 0) / 3.0));

  try {
    average_sync_error_us({}, id);
    FAIL("expected an empty-set error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_set);
  }
}
