#include "nscache/run.hpp"

#include <algorithm>
#include <cmath>

namespace nscache {

bool RunConfig::has(std::string_view key) const {
  return std::find(given.begin(), given.end(), key) != given.end();
}

namespace {

struct IntKey {
  const char* key;
  int BankOrg::*field;
};

constexpr IntKey kOrgInts[] = {
    {"SubarrayRows", &BankOrg::n_sr},
    {"SubarrayCols", &BankOrg::n_sc},
    {"ActiveSubarrayRows", &BankOrg::n_asr},
    {"ActiveSubarrayCols", &BankOrg::n_asc},
    {"MatsPerSubarrayRows", &BankOrg::mats_r},
    {"MatsPerSubarrayCols", &BankOrg::mats_c},
    {"ActiveMatRows", &BankOrg::n_amr},
    {"ActiveMatCols", &BankOrg::n_amc},
    {"Associativity", &BankOrg::associativity},
    {"AddressBits", &BankOrg::address_bits},
    {"MatRows", &BankOrg::mat_rows},
    {"MatCols", &BankOrg::mat_cols},
    {"BitlineMux", &BankOrg::bl_mux},
    {"SenseAmpMux", &BankOrg::sa_mux},
    {"WordlineSegments", &BankOrg::wl_segmentation},
    {"ReferenceRows", &BankOrg::reference_rows},
    {"Folds", &BankOrg::folds},
    {"SliceCount", &BankOrg::slices},
};

int as_int(const ConfigDocument& doc, std::string_view key) {
  const long long v = doc.integer(key);
  if (v < -(1LL << 31) || v > (1LL << 31) - 1) doc.fail(key, "value out of range");
  return static_cast<int>(v);
}

Pow2Range pinned_or(const RunConfig& rc, std::string_view key, int value, Pow2Range range) {
  return rc.has(key) ? Pow2Range::pin(value) : range;
}

void mark_given(RunConfig& rc, const ConfigDocument& doc) {
  for (const auto& e : doc.entries) rc.given.push_back(e.key);
}

}  // namespace

RunConfig run_config_from(const ConfigDocument& doc) {
  RunConfig rc;
  rc.source = doc.source;
  mark_given(rc, doc);

  if (doc.has("TechFile") && doc.has("ProcessNode")) doc.fail("TechFile", "give either -TechFile or -ProcessNode");
  if (doc.has("TechFile")) rc.tech = tech_from_config(doc.include("TechFile"));
  else if (doc.has("ProcessNode")) rc.tech = load_tech(doc.string("ProcessNode"));
  if (rc.tech && doc.has("Temperature")) {
    const double t = doc.number("Temperature");
    if (!(t > 0)) doc.fail("Temperature", "temperature must be positive");
    rc.tech->temperature_k = t;
  }
  auto need_tech = [&](std::string_view key) {
    if (!rc.tech) doc.fail(key, "a cell file needs -ProcessNode or -TechFile");
  };
  if (doc.has("MemoryCellInputFile")) {
    need_tech("MemoryCellInputFile");
    rc.cell = cell_from_config(doc.include("MemoryCellInputFile"), *rc.tech);
  }
  if (doc.has("TagMemoryCellInputFile")) {
    need_tech("TagMemoryCellInputFile");
    rc.tag_cell = cell_from_config(doc.include("TagMemoryCellInputFile"), *rc.tech);
  }
  if (doc.has("DesignTarget")) {
    const std::string t = doc.string("DesignTarget");
    if (t == "cache") {
      // Tags default to the node's SRAM cell.
      if (!rc.tag_cell && rc.tech) rc.tag_cell = load_cell(rc.tech->node_nm <= 3 ? "sram_3nm" : "sram_7nm", *rc.tech);
    } else if (t != "RAM") {
      doc.fail("DesignTarget", "expected cache or RAM");
    }
  }

  BankOrg& o = rc.org;
  try {
    if (doc.has("Capacity")) {
      const double mb = doc.number("Capacity");
      if (!(mb > 0)) doc.fail("Capacity", "capacity must be positive");
      o.capacity_bytes = std::llround(mb * 1024.0 * 1024.0);
    }
    if (doc.has("CacheLineSize")) o.w_block_data = as_int(doc, "CacheLineSize") * 8;
    if (doc.has("CacheAccessMode")) o.mode = access_mode_from(doc.string("CacheAccessMode"));
    if (doc.has("BankKind")) o.kind = bank_kind_from(doc.string("BankKind"));
  } catch (const Error& e) {
    if (!e.file().empty()) throw;
    const ConfigEntry* at = nullptr;
    for (const char* k : {"BankKind", "CacheAccessMode"})
      if (!at) at = doc.find(k);
    throw Error(e.what(), at ? at->file : doc.source, at ? at->line : 0);
  }
  for (const auto& k : kOrgInts)
    if (doc.has(k.key)) o.*k.field = as_int(doc, k.key);
  o.folded_bitline = doc.boolean_or("FoldedBitline", o.folded_bitline);
  if (doc.has("ECCBits") != doc.has("ECCDataBits"))
    doc.fail(doc.has("ECCBits") ? "ECCBits" : "ECCDataBits", "-ECCBits and -ECCDataBits go together");
  if (doc.has("ECCBits")) {
    const long long check = doc.integer("ECCBits"), data = doc.integer("ECCDataBits");
    if (check < 0 || data < 1) doc.fail("ECCBits", "ECC bits must be >= 0 over >= 1 data bits");
    o.ecc_ratio = static_cast<double>(check) / static_cast<double>(data);
  }
  rc.sense_leakage_budget = doc.number_or("SenseLeakageBudget", rc.sense_leakage_budget);
  rc.tau.central_fraction = doc.number_or("TAUCentralFraction", rc.tau.central_fraction);
  rc.tau.ht_write_penalty_cycles =
      static_cast<int>(doc.integer_or("HTTAUWritePenaltyCycles", rc.tau.ht_write_penalty_cycles));
  rc.tau.sense_leakage_budget = rc.sense_leakage_budget;
  if (doc.has("ClockFrequency")) {
    const double ghz = doc.number("ClockFrequency");
    if (!(ghz > 0)) doc.fail("ClockFrequency", "clock frequency must be positive");
    rc.f_clk_hz = ghz * 1e9;
  }

  // Optimizer bounds: a given organization key pins its variable.
  SearchSpec& s = rc.search;
  if (doc.has("OptimizationTarget")) {
    try {
      s.objective = objective_from(doc.string("OptimizationTarget"));
    } catch (const Error& e) {
      doc.fail("OptimizationTarget", e.what());
    }
  }
  if (doc.has("MaxArea")) s.max_area_mm2 = doc.number("MaxArea");
  if (doc.has("MaxLatency")) s.max_latency_s = doc.number("MaxLatency") * 1e-9;
  s.max_tiers = static_cast<int>(doc.integer_or("MaxTiers", s.max_tiers));
  s.top_k = static_cast<int>(doc.integer_or("TopK", s.top_k));
  s.sense_leakage_budget = rc.sense_leakage_budget;
  s.tau = rc.tau;
  const int grid = static_cast<int>(doc.integer_or("GridMax", 32));
  const int mgrid = static_cast<int>(doc.integer_or("MatGridMax", 8));
  const int mux = static_cast<int>(doc.integer_or("MuxMax", 8));
  const Pow2Range rows{static_cast<int>(doc.integer_or("MatRowsMin", 32)),
                       static_cast<int>(doc.integer_or("MatRowsMax", 1024))};
  const Pow2Range cols{static_cast<int>(doc.integer_or("MatColsMin", 32)),
                       static_cast<int>(doc.integer_or("MatColsMax", 1024))};
  SearchBounds& b = s.bounds;
  b.n_sr = pinned_or(rc, "SubarrayRows", o.n_sr, {1, grid});
  b.n_sc = pinned_or(rc, "SubarrayCols", o.n_sc, {1, grid});
  b.mats_r = pinned_or(rc, "MatsPerSubarrayRows", o.mats_r, {1, mgrid});
  b.mats_c = pinned_or(rc, "MatsPerSubarrayCols", o.mats_c, {1, mgrid});
  b.mat_rows = pinned_or(rc, "MatRows", o.mat_rows, rows);
  b.mat_cols = pinned_or(rc, "MatCols", o.mat_cols, cols);
  b.bl_mux = pinned_or(rc, "BitlineMux", o.bl_mux, {1, mux});
  b.sa_mux = pinned_or(rc, "SenseAmpMux", o.sa_mux, {1, 1});
  b.wl_segmentation = pinned_or(rc, "WordlineSegments", o.wl_segmentation, {1, 1});
  if (rc.has("Folds")) b.folds_lo = b.folds_hi = o.folds;
  if (rc.has("ActiveSubarrayRows") && rc.has("ActiveSubarrayCols") && rc.has("ActiveMatRows") &&
      rc.has("ActiveMatCols")) {
    b.active = SearchBounds::Active::Enumerate;
    b.n_asr = Pow2Range::pin(o.n_asr);
    b.n_asc = Pow2Range::pin(o.n_asc);
    b.n_amr = Pow2Range::pin(o.n_amr);
    b.n_amc = Pow2Range::pin(o.n_amc);
  }

  // Simulator overrides.
  TimingParams& t = rc.timing_overrides;
  CycleCounts& c = t.cycles;
  c.hit = doc.integer_or("HitCycles", c.hit);
  c.miss_detect = doc.integer_or("MissDetectCycles", c.miss_detect);
  c.write = doc.integer_or("WriteCycles", c.write);
  c.tag_access = doc.integer_or("TagAccessCycles", c.tag_access);
  c.tag_broadcast = doc.integer_or("TagBroadcastCycles", c.tag_broadcast);
  c.refresh_row = doc.integer_or("RefreshRowCycles", c.refresh_row);
  t.refresh.enabled = doc.boolean_or("RefreshEnabled", t.refresh.enabled);
  t.refresh.row_period_s = doc.number_or("RefreshRowPeriod", t.refresh.row_period_s);
  t.refresh.n_rows = static_cast<int>(doc.integer_or("RefreshRows", t.refresh.n_rows));
  if (doc.has("RefreshBlockingScope")) {
    try {
      t.blocking_scope = blocking_scope_from(doc.string("RefreshBlockingScope"));
    } catch (const Error& e) {
      doc.fail("RefreshBlockingScope", e.what());
    }
  }
  t.offchip_fill_cycles = doc.integer_or("OffchipFillCycles", t.offchip_fill_cycles);
  t.slice_hop_cycles = doc.integer_or("SliceHopCycles", t.slice_hop_cycles);
  t.subarrays = static_cast<int>(doc.integer_or("Subarrays", t.subarrays));
  t.mats_per_subarray = static_cast<int>(doc.integer_or("MatsPerSubarray", t.mats_per_subarray));
  t.f_clk_hz = rc.f_clk_hz;
  t.mode = o.mode;

  EnergyParams& e = rc.energy_overrides;
  e.e_hit = doc.number_or("HitEnergy", e.e_hit);
  e.e_miss = doc.number_or("MissEnergy", e.e_miss);
  e.e_write = doc.number_or("WriteEnergy", e.e_write);
  e.e_refresh_row = doc.number_or("RefreshRowEnergy", e.e_refresh_row);
  e.p_static = doc.number_or("StaticPower", e.p_static);
  e.miss_offchip_multiplier = doc.number_or("MissOffchipMultiplier", e.miss_offchip_multiplier);
  e.t_retention = t.refresh.row_period_s;
  e.n_row = t.refresh.n_rows;
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from(load_config(path)); }

SearchSpec search_spec(const RunConfig& rc) {
  if (!rc.has_design()) throw Error("config describes no design (needs a node and -MemoryCellInputFile)", rc.source);
  SearchSpec s = rc.search;
  s.base = rc.org;
  s.cell = *rc.cell;
  s.tag_cell = rc.tag_cell;
  s.tech = &*rc.tech;
  return s;
}

BankPPA model_design(const RunConfig& rc) {
  SearchSpec s = search_spec(rc);
  s.max_area_mm2.reset();
  s.max_latency_s.reset();
  s.max_tiers = std::max(s.max_tiers, 1 << std::max(0, rc.org.folds));
  const BankOrg org = with_derived_fields(rc.org);
  validate(org);
  const CandidateResult r = evaluate_candidate(s, org);
  if (!r.feasible) throw Error(r.reason, rc.source);
  return r.ppa;
}

CacheConfig cache_config(const RunConfig& rc) {
  CacheConfig c;
  c.capacity_bytes = rc.org.capacity_bytes;
  c.line_bytes = rc.org.w_block_data / 8;
  c.ways = rc.org.associativity;
  c.address_bits = rc.org.address_bits;
  validate(c);
  return c;
}

TimingParams sim_timing(const RunConfig& rc, const BankPPA* bank) {
  TimingParams t = rc.timing_overrides;
  if (bank) {
    const double derate = rc.cell ? rc.cell->retention_derate : 1.0;
    t = timing_from_bank(*bank, rc.f_clk_hz, derate);
    t.offchip_fill_cycles = rc.timing_overrides.offchip_fill_cycles;
    t.blocking_scope = rc.timing_overrides.blocking_scope;
    t.slice_hop_cycles = rc.timing_overrides.slice_hop_cycles;
    const TimingParams& o = rc.timing_overrides;
    if (rc.has("HitCycles")) t.cycles.hit = o.cycles.hit;
    if (rc.has("MissDetectCycles")) t.cycles.miss_detect = o.cycles.miss_detect;
    if (rc.has("WriteCycles")) t.cycles.write = o.cycles.write;
    if (rc.has("TagAccessCycles")) t.cycles.tag_access = o.cycles.tag_access;
    if (rc.has("TagBroadcastCycles")) t.cycles.tag_broadcast = o.cycles.tag_broadcast;
    if (rc.has("RefreshRowCycles")) t.cycles.refresh_row = o.cycles.refresh_row;
    if (rc.has("RefreshEnabled")) t.refresh.enabled = o.refresh.enabled;
    if (rc.has("RefreshRowPeriod")) t.refresh.row_period_s = o.refresh.row_period_s;
    if (rc.has("RefreshRows")) t.refresh.n_rows = o.refresh.n_rows;
    if (rc.has("Subarrays")) t.subarrays = o.subarrays;
    if (rc.has("MatsPerSubarray")) t.mats_per_subarray = o.mats_per_subarray;
  }
  validate(t);
  return t;
}

EnergyParams sim_energy(const RunConfig& rc, const BankPPA* bank) {
  EnergyParams e = rc.energy_overrides;
  if (bank) {
    const double derate = rc.cell ? rc.cell->retention_derate : 1.0;
    e = energy_from_bank(*bank, derate);
    const EnergyParams& o = rc.energy_overrides;
    e.miss_offchip_multiplier = o.miss_offchip_multiplier;
    if (rc.has("HitEnergy")) e.e_hit = o.e_hit;
    if (rc.has("MissEnergy")) e.e_miss = o.e_miss;
    if (rc.has("WriteEnergy")) e.e_write = o.e_write;
    if (rc.has("RefreshRowEnergy")) e.e_refresh_row = o.e_refresh_row;
    if (rc.has("StaticPower")) e.p_static = o.p_static;
    if (rc.has("RefreshRowPeriod")) e.t_retention = o.t_retention;
    if (rc.has("RefreshRows")) e.n_row = o.n_row;
  }
  if (rc.has("RefreshEnabled") && !rc.timing_overrides.refresh.enabled) e.e_refresh_row = 0;
  validate(e);
  return e;
}

}  // namespace nscache
