#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "nscache/llcsim.hpp"
#include "oracles.hpp"

using namespace nscache;
using oracle::mixed_trace;
using oracle::oracle_run;

namespace {

TimingParams small_timing() {
  TimingParams t;
  t.cycles = {3, 3, 4, 2, 1, 2};
  t.subarrays = 4;
  t.mats_per_subarray = 2;
  t.offchip_fill_cycles = 20;
  return t;
}

CacheConfig small_cache() {
  CacheConfig c;
  c.capacity_bytes = 256 * 1024;
  c.ways = 16;
  return c;
}

}  // namespace

TEST_CASE("cycle quantization") {
  CHECK(quantize_cycles(9.794e-9, 3e9) == 30);
  CHECK(quantize_cycles(0, 3e9) == 0);
  CHECK(quantize_cycles(1.0 / 3e9, 3e9) == 1);
  CHECK(quantize_cycles(2.0 / 3e9, 3e9) == 2);
  CHECK(quantize_cycles(1.01 / 3e9, 3e9) == 2);
  CHECK_THROWS_AS(quantize_cycles(-1e-9, 3e9), Error);
  CHECK_THROWS_AS(quantize_cycles(1e-9, 0), Error);
}

TEST_CASE("empty trace and a compulsory miss") {
  const SimStats empty = simulate({}, small_cache(), small_timing());
  CHECK(empty == SimStats{});
  const SimStats s = simulate({{0, Op::Read, 0x1000}, {100, Op::Read, 0x1000}}, small_cache(), small_timing(),
                              {true, false});
  CHECK(s.n_misses == 1);
  CHECK(s.n_hits == 1);
  REQUIRE(s.events.size() == 2);
  CHECK_FALSE(s.events[0].hit);
  CHECK(s.events[1].hit);
}

TEST_CASE("read latency per access mode") {
  CacheConfig c = small_cache();
  TimingParams t = small_timing();
  t.cycles = {5, 4, 6, 3, 2, 0};
  t.offchip_fill_cycles = 0;
  const std::vector<TraceEvent> tr = {{0, Op::Read, 0x40}, {1000, Op::Read, 0x40}};
  auto lat = [&](AccessMode m) {
    t.mode = m;
    const SimStats s = simulate(tr, c, t, {true, false});
    return std::pair{s.events[0].done - s.events[0].tick, s.events[1].done - s.events[1].tick};
  };
  CHECK(lat(AccessMode::Sequential) == std::pair<std::int64_t, std::int64_t>{3 + 4, 3 + 5});
  CHECK(lat(AccessMode::Normal) == std::pair<std::int64_t, std::int64_t>{4, 5 + 2});
  CHECK(lat(AccessMode::Fast) == std::pair<std::int64_t, std::int64_t>{4, 5});
}

TEST_CASE("simulator labels match a functional LRU cache") {
  const CacheConfig c = small_cache();
  TimingParams t = small_timing();
  t.refresh = {true, 2000.0 / 3e9, 16};
  std::vector<std::vector<TraceEvent>> traces;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) traces.push_back(mixed_trace(seed, 100000));
  const auto stats = simulate_many(traces, c, t, {true, false});
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto oracle = oracle_run(traces[k], c);
    const SimStats& s = stats[k];
    REQUIRE(s.events.size() == oracle.size());
    std::size_t label_mismatch = 0, wb_mismatch = 0;
    std::int64_t reads = 0, hits = 0, writes = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      label_mismatch += s.events[i].hit != oracle[i].hit;
      wb_mismatch += s.events[i].writeback != oracle[i].writeback;
      if (traces[k][i].op == Op::Read) {
        ++reads;
        hits += oracle[i].hit;
      } else {
        ++writes;
      }
    }
    CHECK(label_mismatch == 0);
    CHECK(wb_mismatch == 0);
    CHECK(s.n_hits == hits);
    CHECK(s.n_hits + s.n_misses == reads);
    CHECK(s.n_reads == reads);
    CHECK(s.n_writes == writes);
    std::int64_t mass = 0;
    for (const auto& [cyc, n] : s.load_to_use) mass += n;
    CHECK(mass == reads);
  }
}

TEST_CASE("refresh schedule") {
  TimingParams t = small_timing();
  CHECK_THROWS_AS(refresh_schedule(t, 1000), Error);
  t.refresh = {true, 1000.0 / 3e9, 1};
  const auto train = refresh_schedule(t, 10000);
  REQUIRE(train.size() == 10);
  for (std::size_t i = 1; i < train.size(); ++i) CHECK(train[i].tick - train[i - 1].tick == 1000);

  t.refresh = {true, 0.315, 128};
  const std::int64_t p = t.row_period_cycles();
  const std::int64_t horizon = 3 * p + p / 3;
  const auto ev = refresh_schedule(t, horizon, 1);
  const double expect = 128.0 * std::floor(static_cast<double>(horizon) / p);
  CHECK(std::abs(static_cast<double>(ev.size()) - expect) <= 128);
  std::map<int, std::int64_t> last;
  for (const auto& e : ev) {
    if (last.count(e.row)) CHECK(e.tick - last[e.row] <= p);
    last[e.row] = e.tick;
  }
}

TEST_CASE("refresh deadline holds in simulated logs") {
  const CacheConfig c = small_cache();
  for (BlockingScope scope : {BlockingScope::Mat, BlockingScope::Subarray}) {
    TimingParams t = small_timing();
    t.blocking_scope = scope;
    t.refresh = {true, 640.0 / 3e9, 16};
    const std::int64_t p = t.row_period_cycles();
    TraceGenParams g;
    g.kind = TraceKind::ReadWriteMix;
    g.n_events = 20000;
    g.tick_gap = 2;
    const auto trace = generate_trace(g);
    const SimStats s = simulate(trace, c, t, {false, true});
    REQUIRE(s.runtime_cycles >= 10 * p);
    std::map<std::pair<int, int>, std::int64_t> last;
    std::int64_t worst = 0;
    for (const auto& e : s.refreshes) {
      const auto key = std::pair{e.unit, e.row};
      const std::int64_t prev = last.count(key) ? last[key] : 0;
      worst = std::max(worst, e.tick - prev);
      last[key] = e.tick;
    }
    CHECK(worst <= p);
    CHECK(static_cast<int>(last.size()) == t.refresh_units() * t.refresh.n_rows);
    CHECK(s.n_refresh_windows == static_cast<std::int64_t>(s.refreshes.size()));
  }
}

TEST_CASE("refresh conflicts cost time") {
  const CacheConfig c = small_cache();
  TimingParams t = small_timing();
  t.subarrays = 1;
  t.mats_per_subarray = 1;
  t.refresh = {true, 800.0 / 3e9, 8};
  t.cycles.refresh_row = 20;
  const auto windows = refresh_schedule(t, 1000);
  REQUIRE(!windows.empty());
  const std::vector<TraceEvent> tr = {{windows[1].tick, Op::Read, 0x80}};
  const SimStats on = simulate(tr, c, t);
  TimingParams off = t;
  off.refresh.enabled = false;
  const SimStats no = simulate(tr, c, off);
  CHECK(no.runtime_cycles < on.runtime_cycles);
  CHECK(on.refresh_stall_cycles > 0);

  TraceGenParams g;
  g.kind = TraceKind::Zipf;
  g.n_events = 5000;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    g.seed = seed;
    const auto trace = generate_trace(g);
    CHECK(simulate(trace, c, off).runtime_cycles <= simulate(trace, c, t).runtime_cycles);
  }
}

TEST_CASE("runtime is monotone in every cycle parameter") {
  const CacheConfig c = small_cache();
  TraceGenParams g;
  g.kind = TraceKind::ReadWriteMix;
  g.n_events = 5000;
  g.tick_gap = 1;
  const auto trace = generate_trace(g);
  for (AccessMode mode : {AccessMode::Sequential, AccessMode::Normal, AccessMode::Fast}) {
    TimingParams base = small_timing();
    base.mode = mode;
    base.refresh = {true, 4000.0 / 3e9, 16};
    const std::int64_t r0 = simulate(trace, c, base).runtime_cycles;
    for (int field = 0; field < 8; ++field) {
      TimingParams t = base;
      switch (field) {
        case 0: t.cycles.hit += 3; break;
        case 1: t.cycles.miss_detect += 3; break;
        case 2: t.cycles.write += 3; break;
        case 3: t.cycles.tag_access += 3; break;
        case 4: t.cycles.tag_broadcast += 3; break;
        case 5: t.cycles.refresh_row += 3; break;
        case 6: t.offchip_fill_cycles += 30; break;
        case 7: t.slice_hop_cycles += 2; break;
      }
      CAPTURE(field);
      CHECK(simulate(trace, c, t).runtime_cycles >= r0);
    }
  }
}

TEST_CASE("trace parsing") {
  const auto t = parse_trace("# header\n0 R 0x40\n\n5 w 80\n5 W 0XC0  # same tick\n");
  REQUIRE(t.size() == 3);
  CHECK(t[1] == TraceEvent{5, Op::Write, 0x80});
  CHECK(t[2].address == 0xC0);
  try {
    parse_trace("0 R 0x40\n10 R 0x80\n9 R 0xC0\n", "bad.trace");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.trace:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_trace("0 X 0x40\n"), Error);
  CHECK_THROWS_AS(parse_trace("0 R zz\n"), Error);
  CHECK_THROWS_AS(parse_trace("-1 R 0x40\n"), Error);
  const auto round = parse_trace(format_trace(t));
  CHECK(round == t);
}

TEST_CASE("trace generation") {
  TraceGenParams p;
  p.kind = TraceKind::Zipf;
  p.n_events = 2000;
  p.seed = 42;
  CHECK(generate_trace(p) == generate_trace(p));
  p.seed = 43;
  const auto other = generate_trace(p);
  p.seed = 42;
  CHECK(generate_trace(p) != other);
  for (const auto& e : generate_trace(p)) CHECK(e.op == Op::Read);
  p.kind = TraceKind::ReadWriteMix;
  std::int64_t w = 0;
  for (const auto& e : generate_trace(p)) w += e.op == Op::Write;
  CHECK(w > 0);
  validate_trace(generate_trace(p));

  // A stride sweep over twice the capacity misses every time.
  const CacheConfig c = small_cache();
  TraceGenParams s;
  s.kind = TraceKind::Strided;
  s.footprint_bytes = 2 * c.capacity_bytes;
  s.stride_bytes = c.line_bytes;
  s.n_events = 4 * s.footprint_bytes / s.stride_bytes;
  const SimStats st = simulate(generate_trace(s), c, small_timing());
  CHECK(st.n_hits == 0);
  CHECK(st.n_misses == s.n_events);
}

TEST_CASE("parallel runs equal serial runs") {
  std::vector<std::vector<TraceEvent>> traces;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) traces.push_back(mixed_trace(seed, 20000));
  TimingParams t = small_timing();
  t.refresh = {true, 3000.0 / 3e9, 16};
  const auto a = simulate_many(traces, small_cache(), t, {true, true});
  const auto b = simulate_many_serial(traces, small_cache(), t, {true, true});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("load-to-use CDF") {
  TraceGenParams g;
  g.kind = TraceKind::ReadWriteMix;
  g.n_events = 3000;
  const SimStats s = simulate(generate_trace(g), small_cache(), small_timing());
  const auto cdf = load_to_use_cdf(s);
  REQUIRE(!cdf.empty());
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].first > cdf[i - 1].first);
    CHECK(cdf[i].second >= cdf[i - 1].second);
  }
  CHECK(cdf.back().second == doctest::Approx(1.0));
}

TEST_CASE("program energy arithmetic") {
  SimStats s;
  s.n_hits = 100;
  s.n_misses = 10;
  s.n_reads = 110;
  s.n_writes = 50;
  EnergyParams ep;
  ep.e_hit = 1e-9;
  ep.e_miss = 92e-9;
  ep.e_write = 2e-9;
  ep.e_refresh_row = 0.1e-9;
  ep.t_retention = 0.315;
  ep.n_row = 128;
  ep.p_static = 10e-3;
  const EnergyReport r = energy_program(s, ep, 1e-3);
  CHECK(r.total_j == doctest::Approx(1.112e-5).epsilon(5e-5));
  CHECK(r.offchip_miss_j == doctest::Approx(10 * 1e-9 * 92));
  double sum = 0;
  for (const EnergyTerm& term : r.breakdown()) sum += term.joules;
  CHECK(sum == doctest::Approx(r.total_j).epsilon(1e-12));

  EnergyParams ed = ep;
  ed.t_retention = 170e-6;
  const double ratio = energy_program(s, ed, 1e-3).refresh_j / r.refresh_j;
  CHECK(ratio == doctest::Approx(0.315 / 170e-6).epsilon(1e-12));
  CHECK(std::round(ratio) == 1853);

  CHECK(energy_program(SimStats{}, EnergyParams{}, 0).total_j == 0);
  EnergyParams bad = ep;
  bad.e_hit = -1;
  CHECK_THROWS_AS(energy_program(s, bad, 1e-3), Error);
  CHECK_THROWS_AS(energy_program(s, ep, -1), Error);
}

TEST_CASE("program energy equals the per-event log") {
  EnergyParams ep;
  ep.e_hit = 0.2e-9;
  ep.e_miss = 0.25e-9;
  ep.e_write = 0.36e-9;
  ep.e_refresh_row = 4e-8;
  ep.t_retention = 170e-6;
  ep.n_row = 128;
  ep.p_static = 0.05;
  int runs = 0;
  for (AccessMode mode : {AccessMode::Sequential, AccessMode::Normal, AccessMode::Fast}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      TimingParams t = small_timing();
      t.mode = mode;
      t.refresh = {true, 3000.0 / 3e9, 16};
      const SimStats s = simulate(mixed_trace(seed, 20000), small_cache(), t, {true, false});
      const double t_run = static_cast<double>(s.runtime_cycles) / t.f_clk_hz;
      const EnergyReport r = energy_program(s, ep, t_run);
      double sum = 0;
      for (const EnergyLogEntry& e : energy_log(s, ep, t_run)) sum += e.joules;
      CHECK(std::abs(sum - r.total_j) <= 1e-9 * r.total_j);
      ++runs;
    }
  }
  CHECK(runs == 12);
  SimStats bare;
  bare.n_reads = 1;
  bare.n_hits = 1;
  CHECK_THROWS_AS(energy_log(bare, ep, 1e-6), Error);
}
