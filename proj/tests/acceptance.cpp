// Acceptance run: one PASS/FAIL line per criterion, then a summary.
// Exit status is 0 unless --strict is given and a criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "nscache/m3d.hpp"
#include "nscache/report.hpp"
#include "nscache/run.hpp"
#include "oracles.hpp"

using namespace nscache;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string pct(double v) { return num(v * 100) + "%"; }

RunConfig cfg(const std::string& name) { return load_run_config(data_dir() / "configs" / (name + ".cfg")); }

BankPPA optimized(const std::string& name) {
  const RunConfig rc = cfg(name);
  const SearchResult r = search(search_spec(rc));
  if (r.ranked.empty()) throw Error(name + ": no feasible organization");
  return r.ranked.front().ppa;
}

double bits_per_mm2(const BankPPA& b) { return static_cast<double>(b.org.capacity_bytes) * 8 / b.area_mm2; }

Outcome c1_stage_count() {
  std::string got;
  bool ok = true;
  for (int k = 1; k <= 4; ++k) {
    const double f = std::exp(static_cast<double>(k));
    const int n = optimal_stage_count(f, 0);
    got += (k > 1 ? "," : "") + std::to_string(n);
    ok = ok && n == k && chain_delay_model(f, 0, n) <= chain_delay_model(f, 0, n + 1) &&
         (n == 1 || chain_delay_model(f, 0, n) <= chain_delay_model(f, 0, n - 1));
  }
  return {ok, "N = {" + got + "}"};
}

Outcome c2_chain_product() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lc(std::log(0.1e-15), std::log(10e-15)), lf(0.0, std::log(1e5));
  std::uniform_int_distribution<int> nd(1, 12);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double c_in = std::exp(lc(rng)), c_load = c_in * std::exp(lf(rng));
    const BufferChain ch = size_chain(c_in, c_load, nd(rng));
    double prod = 1;
    for (std::size_t k = 1; k < ch.sizes.size(); ++k) prod *= ch.sizes[k] / ch.sizes[k - 1];
    const double f = c_load / c_in;
    if (ch.sizes.size() > 1) worst = std::max(worst, std::abs(prod - f) / f);
  }
  return {worst <= 1e-12, "max rel err " + num(worst)};
}

Outcome c3_elmore() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lr(std::log(10.0), std::log(1e4)), lc(std::log(0.1e-15), std::log(100e-15));
  std::uniform_int_distribution<int> nseg(1, 8);
  double lo = 1e9, hi = 0;
  for (int i = 0; i < 500; ++i) {
    RCLadder l;
    l.driver_r = std::exp(lr(rng));
    l.load_c = std::exp(lc(rng));
    for (int k = nseg(rng); k > 0; --k) l.segments.push_back({std::exp(lr(rng)), std::exp(lc(rng))});
    const double ratio = elmore_delay(l) / oracle::step_response_t50(l);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  // The oracle integrates with a finite step; allow its discretization error.
  return {lo >= 1 - 1e-3 && hi <= 3, "Elmore/oracle in [" + num(lo) + ", " + num(hi) + "]"};
}

Outcome c4_cells() {
  const TechNode t7 = load_tech("7nm"), t3 = load_tech("3nm");
  const CellModel gc = load_cell("gc2t_dg_7nm", t7);
  const StoredLevelPair lv = default_levels(gc);
  const double ta = access_time(gc, lv), tr = retention_time(gc, lv);
  bool ok = std::abs(ta / 122e-12 - 1) <= 0.10 && std::abs(tr / 0.315 - 1) <= 0.15;
  ok = ok && gc.v_boost == 1.2 && gc.v_hold == -0.75;
  const std::pair<const char*, double> areas[] = {
      {"sram_7nm", 0.0276}, {"gc2t_dg_7nm", 0.02052}, {"edram_7nm", 0.0116}, {"sttmram_7nm", 0.0138}};
  for (const auto& [name, a] : areas) ok = ok && load_cell(name, t7).area_um2 == a;
  const std::pair<const char*, double> areas3[] = {{"sram_3nm", 0.0199}, {"gc2t_caa_3nm", 0.013}};
  for (const auto& [name, a] : areas3) ok = ok && load_cell(name, t3).area_um2 == a;
  return {ok, "access " + num(ta * 1e12) + " ps, retention " + num(tr * 1e3) + " ms"};
}

Outcome c5_sram_macro() {
  const RunConfig rc = cfg("sram64mb_7nm");
  const BankPPA b = model_design(rc);
  const double cells = static_cast<double>(b.org.capacity_bytes) * 8 * rc.cell->area_um2 * 1e-6;
  const bool ok = std::abs(b.area_mm2 / 19.32 - 1) <= 0.25 && b.area_mm2 >= cells;
  return {ok, "area " + num(b.area_mm2) + " mm2 (cell bound " + num(cells) + ")"};
}

Outcome c6_iso_area() {
  const double gc = optimized("gc2t128mb_7nm_search").area_mm2;
  const double ed = optimized("edram128mb_7nm_search").area_mm2;
  const double stt = optimized("sttmram128mb_7nm_search").area_mm2;
  const double sr = optimized("sram64mb_7nm_search").area_mm2;
  const double ref[] = {11.53, 15.51, 18.78, 19.32}, got[] = {gc, ed, stt, sr};
  bool ok = gc < ed && ed < stt && stt <= sr;
  for (int i = 0; i < 4; ++i) ok = ok && std::abs(got[i] / ref[i] - 1) <= 0.30;
  return {ok, "GC " + num(gc) + ", eDRAM " + num(ed) + ", STT " + num(stt) + ", SRAM " + num(sr) + " mm2"};
}

Outcome c7_density() {
  const BankPPA gc = model_design(cfg("gc2t256mb_7nm_4tier"));
  const BankPPA sr = model_design(cfg("sram64mb_7nm"));
  const double ratio = bits_per_mm2(gc) / bits_per_mm2(sr);
  return {ratio >= 4, num(ratio) + "x"};
}

Outcome c8_3nm() {
  const BankPPA sr = optimized("sram128mb_3nm_search");
  const BankPPA gc = optimized("gc2tcaa128mb_3nm_search");
  const ComparisonReport r = compare_designs(sr, gc);
  const double area = r.at("area").delta_pct / 100, leak = r.at("leakage").delta_pct / 100;
  const double rd = r.at("read_latency").delta_pct, wr = r.at("write_latency").delta_pct;
  const bool ok = area >= -0.65 && area <= -0.40 && leak >= -0.55 && leak <= -0.30 && rd < 0 && wr > 0;
  return {ok, "area " + pct(area) + ", leakage " + pct(leak) + ", read " + num(rd) + "%, write " + num(wr) + "%"};
}

Outcome c9_widths() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> lg_a(0, 5), lg_n(5, 26), wd(6, 10), wt(8, 40);
  int cases = 0, bad = 0;
  for (int i = 0; i < 2000; ++i) {
    const int a = 1 << lg_a(rng), w_data = 1 << wd(rng), w_tag = wt(rng);
    const std::int64_t n = std::int64_t{1} << lg_n(rng);
    const int lg = static_cast<int>(std::llround(std::log2(static_cast<double>(n))));
    const int lg_sets = lg - static_cast<int>(std::llround(std::log2(a)));
    for (AccessMode m : {AccessMode::Normal, AccessMode::Sequential, AccessMode::Fast}) {
      for (BankKind k : {BankKind::Data, BankKind::Tag, BankKind::TAU_HM, BankKind::TAU_HT}) {
        GDLWidths want;
        if (k == BankKind::Tag) want = {lg_sets, w_tag, a};
        else if (k == BankKind::Data) want = m == AccessMode::Normal ? GDLWidths{lg_sets, lg - lg_sets, w_data}
                                                                      : GDLWidths{lg, 0, w_data};
        else if (m == AccessMode::Normal) want = {lg_sets, w_tag + 2, w_data};
        else if (m == AccessMode::Sequential) want = {lg, w_tag + 2, w_data};
        else want = {lg_sets, w_tag + 2, w_data * a + a};
        BankOrg o;
        o.mode = m;
        o.kind = k;
        o.associativity = a;
        o.n_block = n;
        o.w_block_data = w_data;
        o.w_block_tag = w_tag;
        bad += !(gdl_widths(o) == want);
        ++cases;
      }
    }
  }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) + " rows exact"};
}

Outcome c10_tau() {
  const RunConfig base_rc = cfg("gc2t128mb_7nm_cache");
  const BankPPA conv = model_design(base_rc);
  const BankPPA hm = model_design(cfg("gc2t128mb_7nm_tau_hm"));
  const BankPPA ht = model_design(cfg("gc2t128mb_7nm_tau_ht"));
  const double saving = 1 - hm.area_mm2 / conv.area_mm2;
  const std::int64_t w_base = sim_timing(base_rc, &conv).cycles.write;
  const std::int64_t w_ht = sim_timing(cfg("gc2t128mb_7nm_tau_ht"), &ht).cycles.write;
  const bool ok = saving >= 0.10 && w_ht == w_base + 2;
  return {ok, "HM area saving " + pct(saving) + ", HT write " + std::to_string(w_ht) + " vs " +
                  std::to_string(w_base) + " cycles"};
}

CacheConfig small_cache() {
  CacheConfig c;
  c.capacity_bytes = 256 * 1024;
  c.ways = 16;
  return c;
}

TimingParams small_timing() {
  TimingParams t;
  t.cycles = {3, 3, 4, 2, 1, 2};
  t.subarrays = 4;
  t.mats_per_subarray = 2;
  t.offchip_fill_cycles = 20;
  t.refresh = {true, 2000.0 / 3e9, 16};
  return t;
}

Outcome c11_oracle() {
  const CacheConfig c = small_cache();
  std::vector<std::vector<TraceEvent>> traces;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) traces.push_back(oracle::mixed_trace(seed, 100000));
  const auto stats = simulate_many(traces, c, small_timing(), {true, false});
  std::int64_t mismatches = 0, broken = 0;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto want = oracle::oracle_run(traces[k], c);
    for (std::size_t i = 0; i < want.size(); ++i) mismatches += stats[k].events[i].hit != want[i].hit;
    broken += stats[k].n_hits + stats[k].n_misses != stats[k].n_reads;
  }
  return {mismatches == 0 && broken == 0,
          std::to_string(mismatches) + " label mismatches, " + std::to_string(broken) + " conservation failures"};
}

Outcome c12_deadline() {
  bool ok = true;
  std::string detail;
  // Small refresh period so a short trace spans many periods, plus the
  // modeled gain-cell cache at its own period over a sparse trace.
  for (BlockingScope scope : {BlockingScope::Mat, BlockingScope::Subarray}) {
    TimingParams t = small_timing();
    t.blocking_scope = scope;
    t.refresh = {true, 640.0 / 3e9, 16};
    TraceGenParams g;
    g.kind = TraceKind::ReadWriteMix;
    g.n_events = 20000;
    g.tick_gap = 2;
    const SimStats s = simulate(generate_trace(g), small_cache(), t, {false, true});
    const std::int64_t p = t.row_period_cycles(), gap = oracle::max_refresh_gap(s.refreshes);
    ok = ok && s.runtime_cycles >= 10 * p && gap <= p;
    detail += std::string(to_string(scope)) + " gap " + std::to_string(gap) + "/" + std::to_string(p) + "; ";
  }
  const RunConfig rc = cfg("edram128mb_7nm");
  const BankPPA b = model_design(rc);
  TimingParams t = sim_timing(rc, &b);
  const std::int64_t p = t.row_period_cycles();
  TraceGenParams g;
  g.kind = TraceKind::ReadWriteMix;
  g.n_events = 20000;
  g.tick_gap = 12 * p / g.n_events + 1;
  const SimStats s = simulate(generate_trace(g), cache_config(rc), t, {false, true});
  const std::int64_t gap = oracle::max_refresh_gap(s.refreshes);
  ok = ok && s.runtime_cycles >= 10 * p && gap <= p;
  detail += "eDRAM bank gap " + std::to_string(gap) + "/" + std::to_string(p);
  return {ok, detail};
}

double refresh_share(const std::string& name, const std::vector<TraceEvent>& trace) {
  RunConfig rc = cfg(name);
  // Same mat capacity with 128 refreshed rows.
  rc.org.mat_cols = rc.org.mat_cols * rc.org.mat_rows / 128;
  rc.org.mat_rows = 128;
  const BankPPA b = model_design(rc);
  const TimingParams t = sim_timing(rc, &b);
  const EnergyParams ep = sim_energy(rc, &b);
  if (ep.n_row != 128) throw Error(name + ": expected 128 refreshed rows");
  const SimStats s = simulate(trace, cache_config(rc), t);
  const EnergyReport r = energy_program(s, ep, static_cast<double>(s.runtime_cycles) / t.f_clk_hz);
  return r.refresh_j / r.total_j;
}

Outcome c13_refresh_share() {
  TraceGenParams g;
  g.kind = TraceKind::ReadWriteMix;
  g.n_events = 200000;
  g.footprint_bytes = 64ll << 20;
  g.tick_gap = 8;
  const auto trace = generate_trace(g);
  const double ed = refresh_share("edram128mb_7nm", trace), gc = refresh_share("gc2t128mb_7nm", trace);
  return {ed >= 0.05 && ed <= 0.25 && gc < 0.005, "eDRAM " + pct(ed) + ", GC2T " + pct(gc)};
}

Outcome c14_energy() {
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
  const double example = energy_program(s, ep, 1e-3).total_j;
  bool ok = std::abs(example / 1.112e-5 - 1) <= 5e-5;
  double worst = 0;
  TimingParams t = small_timing();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SimStats run = simulate(oracle::mixed_trace(seed, 20000), small_cache(), t, {true, false});
    const double t_run = static_cast<double>(run.runtime_cycles) / t.f_clk_hz;
    const EnergyReport r = energy_program(run, ep, t_run);
    double sum = 0;
    for (const EnergyLogEntry& e : energy_log(run, ep, t_run)) sum += e.joules;
    worst = std::max(worst, std::abs(sum - r.total_j) / r.total_j);
  }
  ok = ok && worst <= 1e-9;
  return {ok, "example " + num(example) + " J, log max rel err " + num(worst)};
}

Outcome c15_m3d() {
  const TechNode t = load_tech("7nm");
  MatDesign d;
  d.cell = load_cell("gc2t_dg_7nm", t);
  d.tech = &t;
  d.n_rows = 128;
  d.n_cols = 512;
  const MatPPA f0 = assemble_m3d_mat(d, 0), f1 = assemble_m3d_mat(d, 1), f2 = assemble_m3d_mat(d, 2);
  const double eps = 1 + 1e-12;
  bool ok = f1.footprint_um2() <= f0.footprint_um2() * eps && f2.footprint_um2() <= f1.footprint_um2() * eps;
  const double a0 = f0.array_width_um * f0.array_height_um;
  const double cw = d.cell.width_um(), ch = d.cell.height_um();
  for (const MatPPA* m : {&f1, &f2}) {
    const double total = m->array_width_um * m->array_height_um * m->tiers;
    ok = ok && total >= a0 * (1 - 1e-9) &&
         total <= a0 + m->tiers * (m->array_width_um * ch + m->array_height_um * cw) + 1e-9;
  }
  return {ok, "footprint " + num(f0.footprint_um2()) + " >= " + num(f1.footprint_um2()) + " >= " +
                  num(f2.footprint_um2()) + " um2"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + NSCACHE_CLI + "\" " + args + " > /dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c16_determinism() {
  const fs::path tmp = fs::temp_directory_path() / ("nscache_accept_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const std::string conf = (data_dir() / "configs").string() + "/";
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  bool ok = run_cli("gen-trace -k read_write_mix -n 50000 -o " + q(tmp / "t.trace")) == 0;
  for (int i : {1, 2}) {
    const std::string n = std::to_string(i);
    ok = ok && run_cli("model -c " + q(conf + "gc2t128mb_7nm.cfg") + " -o " + q(tmp / ("m" + n))) == 0;
    ok = ok && run_cli("optimize -c " + q(conf + "gc2t128mb_7nm_search.cfg") + " -o " + q(tmp / ("o" + n))) == 0;
    ok = ok && run_cli("simulate -c " + q(conf + "gc2t128mb_7nm_cache.cfg") + " -t " + q(tmp / "t.trace") +
                       " -o " + q(tmp / ("s" + n))) == 0;
  }
  int same = 0;
  for (const char* k : {"m", "o", "s"}) {
    const std::string a = slurp(tmp / (std::string(k) + "1"));
    same += !a.empty() && a == slurp(tmp / (std::string(k) + "2"));
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  return {ok && same == 3, std::to_string(same) + "/3 commands byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--strict") strict = true;
    else {
      std::cerr << "usage: " << argv[0] << " [--strict]\n";
      return 2;
    }
  }
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"stage count at zero self-loading", c1_stage_count},
      {"chain ratio product", c2_chain_product},
      {"Elmore bounds the 50% delay", c3_elmore},
      {"gain-cell calibration anchors", c4_cells},
      {"64 MB SRAM macro area", c5_sram_macro},
      {"iso-capacity area ordering", c6_iso_area},
      {"4-tier density over SRAM", c7_density},
      {"3 nm gain cell vs SRAM", c8_3nm},
      {"global bus widths", c9_widths},
      {"tags under data", c10_tau},
      {"simulator vs LRU oracle", c11_oracle},
      {"refresh deadline", c12_deadline},
      {"refresh energy share", c13_refresh_share},
      {"program energy accounting", c14_energy},
      {"stacked footprint monotone", c15_m3d},
      {"byte-identical reruns", c16_determinism},
  };
  int passed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    passed += o.pass;
    std::printf("%s %2d %-34s %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", passed, n);
  return strict && passed != n ? 1 : 0;
}
