#include "nscache/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nscache {

double sig6(double v) {
  if (!std::isfinite(v) || v == 0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return sig6(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json org_json(const BankOrg& o) {
  Json j;
  j["kind"] = std::string(to_string(o.kind));
  j["mode"] = std::string(to_string(o.mode));
  j["capacity_bytes"] = o.capacity_bytes;
  j["slices"] = o.slices;
  j["associativity"] = o.associativity;
  j["n_block"] = o.n_block;
  j["w_block_data"] = o.w_block_data;
  j["w_block_tag"] = o.w_block_tag;
  j["address_bits"] = o.address_bits;
  j["ecc_ratio"] = num(o.ecc_ratio);
  j["subarrays"] = {o.n_sr, o.n_sc};
  j["active_subarrays"] = {o.n_asr, o.n_asc};
  j["mats_per_subarray"] = {o.mats_r, o.mats_c};
  j["active_mats"] = {o.n_amr, o.n_amc};
  j["mat"] = {o.mat_rows, o.mat_cols};
  j["bl_mux"] = o.bl_mux;
  j["sa_mux"] = o.sa_mux;
  j["wl_segmentation"] = o.wl_segmentation;
  j["folded_bitline"] = o.folded_bitline;
  j["reference_rows"] = o.reference_rows;
  j["folds"] = o.folds;
  return j;
}

Json bank_json(const BankPPA& b) {
  Json j;
  j["organization"] = org_json(b.org);
  j["area"] = {{"total_mm2", num(b.area_mm2)},
               {"feol_mm2", num(b.area_feol_mm2)},
               {"beol_mm2", num(b.area_beol_mm2)},
               {"slice_width_um", num(b.width_um)},
               {"slice_height_um", num(b.height_um)}};
  j["latency"] = {{"hit_s", num(b.t_hit_s)},         {"miss_detect_s", num(b.t_miss_detect_s)},
                  {"write_s", num(b.t_write_s)},     {"tag_s", num(b.t_tag_s)},
                  {"read_s", num(b.t_read_s)},       {"control_s", num(b.t_control_s)},
                  {"routing_s", num(b.t_routing_s)}, {"subarray_s", num(b.t_subarray_s)},
                  {"broadcast_s", num(b.t_broadcast_s)}};
  j["energy"] = {{"hit_j", num(b.e_hit_j)},
                 {"miss_j", num(b.e_miss_j)},
                 {"write_j", num(b.e_write_j)},
                 {"read_j", num(b.e_read_j)},
                 {"refresh_row_j", num(b.e_refresh_row_j)}};
  j["leakage_w"] = num(b.leakage_w);
  j["subarray_busy_s"] = num(b.subarray_busy_s);
  j["bandwidth_hz"] = num(b.bandwidth_hz());
  j["write_penalty_cycles"] = b.write_penalty_cycles;
  j["refresh_units"] = b.refresh_units;
  j["gdl"] = {{"n_aw", b.gdl.n_aw}, {"n_bw", b.gdl.n_bw}, {"n_dw", b.gdl.n_dw}};
  const MatPPA& m = b.mat;
  j["mat"] = {{"footprint_um2", num(m.footprint_um2())},
              {"width_um", num(m.width_um)},
              {"height_um", num(m.height_um)},
              {"tiers", m.tiers},
              {"physical_rows", m.physical_rows},
              {"physical_cols", m.physical_cols},
              {"t_read_s", num(m.t_read_s)},
              {"t_write_s", num(m.t_write_s)},
              {"t_cycle_s", num(m.t_cycle_s)},
              {"e_read_j", num(m.e_read_j)},
              {"e_write_j", num(m.e_write_j)},
              {"leakage_w", num(m.leakage_w)},
              {"refresh", {{"needed", m.refresh.needs},
                           {"retention_s", num(m.refresh.t_retention_s)},
                           {"rows", m.refresh.n_rows}}}};
  return j;
}

Json model_report(const RunConfig& rc, const BankPPA& bank) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "model";
  j["source"] = rc.source;
  j["tech_node_nm"] = rc.tech ? rc.tech->node_nm : 0;
  j["cell"] = rc.cell ? rc.cell->name : std::string();
  j["tag_cell"] = rc.tag_cell ? rc.tag_cell->name : std::string();
  j["bank"] = bank_json(bank);
  const double derate = rc.cell ? rc.cell->retention_derate : 1.0;
  j["cycles"] = timing_json(timing_from_bank(bank, rc.f_clk_hz, derate));
  return j;
}

std::string audit_csv(const BankPPA& b) {
  std::string out = "level,component,count,area_um2,leakage_w,energy_j,beol\n";
  for (const auto& c : b.components)
    out += "bank," + csv_field(c.name) + "," + fmt6(c.count) + "," + fmt6(c.area_um2) + "," + fmt6(c.leakage_w) +
           "," + fmt6(c.e_hit_j) + ",0\n";
  for (const auto& c : b.mat.components)
    out += "mat," + csv_field(c.name) + ",1," + fmt6(c.area_um2) + "," + fmt6(c.leakage_w) + "," +
           fmt6(c.e_read_j) + "," + (c.beol ? "1" : "0") + "\n";
  return out;
}

Json search_report(const SearchSpec& spec, const SearchResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "optimize";
  j["objective"] = std::string(to_string(spec.objective));
  j["cell"] = spec.cell.name;
  j["n_candidates"] = r.n_candidates;
  j["n_feasible"] = r.n_feasible;
  Json ranked = Json::array();
  for (const auto& d : r.ranked) {
    Json e;
    e["rank"] = d.rank;
    e["objective_value"] = num(d.objective_value);
    e["bank"] = bank_json(d.ppa);
    ranked.push_back(std::move(e));
  }
  j["ranked"] = std::move(ranked);
  return j;
}

std::string ranked_csv(const SearchResult& r) {
  std::string out =
      "rank,objective,area_mm2,t_hit_s,t_write_s,e_hit_j,leakage_w,n_sr,n_sc,mats_r,mats_c,mat_rows,mat_cols,"
      "bl_mux,folds,n_asr,n_asc,n_amr,n_amc\n";
  for (const auto& d : r.ranked) {
    const BankOrg& o = d.org;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%s,%s,%s,%s,%d,%d,%d,%d,%d,%d,%d,%d,%d,%d,%d,%d\n", d.rank,
                  fmt6(d.objective_value).c_str(), fmt6(d.ppa.area_mm2).c_str(), fmt6(d.ppa.t_hit_s).c_str(),
                  fmt6(d.ppa.t_write_s).c_str(), fmt6(d.ppa.e_hit_j).c_str(), fmt6(d.ppa.leakage_w).c_str(), o.n_sr,
                  o.n_sc, o.mats_r, o.mats_c, o.mat_rows, o.mat_cols, o.bl_mux, o.folds, o.n_asr, o.n_asc, o.n_amr,
                  o.n_amc);
    out += buf;
  }
  return out;
}

Json timing_json(const TimingParams& t) {
  Json j;
  j["f_clk_hz"] = num(t.f_clk_hz);
  j["mode"] = std::string(to_string(t.mode));
  j["hit"] = t.cycles.hit;
  j["miss_detect"] = t.cycles.miss_detect;
  j["write"] = t.cycles.write;
  j["tag_access"] = t.cycles.tag_access;
  j["tag_broadcast"] = t.cycles.tag_broadcast;
  j["refresh_row"] = t.cycles.refresh_row;
  j["offchip_fill"] = t.offchip_fill_cycles;
  j["slice_hop"] = t.slice_hop_cycles;
  j["refresh"] = {{"enabled", t.refresh.enabled},
                  {"row_period_s", num(t.refresh.row_period_s)},
                  {"rows", t.refresh.n_rows},
                  {"blocking_scope", std::string(to_string(t.blocking_scope))}};
  j["subarrays"] = t.subarrays;
  j["mats_per_subarray"] = t.mats_per_subarray;
  return j;
}

Json sim_stats_json(const SimStats& s) {
  Json j;
  j["n_reads"] = s.n_reads;
  j["n_hits"] = s.n_hits;
  j["n_misses"] = s.n_misses;
  j["n_writes"] = s.n_writes;
  j["n_write_hits"] = s.n_write_hits;
  j["n_writebacks"] = s.n_writebacks;
  j["runtime_cycles"] = s.runtime_cycles;
  j["refresh_stall_cycles"] = s.refresh_stall_cycles;
  j["n_refresh_windows"] = s.n_refresh_windows;
  j["hit_rate"] = num(s.n_reads > 0 ? static_cast<double>(s.n_hits) / static_cast<double>(s.n_reads) : 0.0);
  return j;
}

Json energy_json(const EnergyReport& r) {
  Json j;
  j["t_run_s"] = num(r.t_run_s);
  j["n_hits"] = r.n_hits;
  j["n_misses"] = r.n_misses;
  j["n_array_writes"] = r.n_array_writes;
  j["total_j"] = num(r.total_j);
  j["offchip_miss_j"] = num(r.offchip_miss_j);
  Json terms = Json::array();
  for (const auto& t : r.breakdown())
    terms.push_back({{"term", t.name}, {"joules", num(t.joules)}, {"share", num(t.share)}});
  j["breakdown"] = std::move(terms);
  return j;
}

Json simulate_report(const CacheConfig& cache, const TimingParams& timing, const SimStats& stats,
                     const EnergyReport& energy) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "simulate";
  j["cache"] = {{"capacity_bytes", cache.capacity_bytes},
                {"line_bytes", cache.line_bytes},
                {"ways", cache.ways},
                {"sets", cache.sets()}};
  j["timing"] = timing_json(timing);
  j["stats"] = sim_stats_json(stats);
  j["energy"] = energy_json(energy);
  return j;
}

std::string cdf_csv(const SimStats& s) {
  std::string out = "cycle_bucket,cumulative_fraction\n";
  for (const auto& [c, f] : load_to_use_cdf(s)) out += std::to_string(c) + "," + fmt6(f) + "\n";
  return out;
}

BankPPA bank_from_report(const Json& report) {
  try {
    const Json& b = report.contains("bank") ? report.at("bank") : report;
    BankPPA p;
    p.org.capacity_bytes = b.at("organization").at("capacity_bytes").get<std::int64_t>();
    p.area_mm2 = b.at("area").at("total_mm2").get<double>();
    p.t_hit_s = b.at("latency").at("hit_s").get<double>();
    p.t_write_s = b.at("latency").at("write_s").get<double>();
    p.e_hit_j = b.at("energy").at("hit_j").get<double>();
    p.e_write_j = b.at("energy").at("write_j").get<double>();
    p.leakage_w = b.at("leakage_w").get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("not a model report: ") + e.what());
  }
}

Json compare_report(const ComparisonReport& r, const std::string& a_name, const std::string& b_name) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "compare";
  j["baseline"] = a_name;
  j["candidate"] = b_name;
  Json rows = Json::array();
  for (const auto& d : r.rows)
    rows.push_back({{"metric", d.metric},
                    {"unit", d.unit},
                    {"baseline", num(d.a)},
                    {"candidate", num(d.b)},
                    {"change_pct", num(d.delta_pct)}});
  j["metrics"] = std::move(rows);
  return j;
}

std::string compare_text(const ComparisonReport& r, const std::string& a_name, const std::string& b_name) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-5s %14s %14s %10s\n", "metric", "unit", "baseline", "candidate",
                "% change");
  std::string out = "baseline:  " + a_name + "\ncandidate: " + b_name + "\n" + buf;
  for (const auto& d : r.rows) {
    std::snprintf(buf, sizeof buf, "%-14s %-5s %14s %14s %+10.1f\n", d.metric.c_str(), d.unit.c_str(),
                  fmt6(d.a).c_str(), fmt6(d.b).c_str(), d.delta_pct);
    out += buf;
  }
  return out;
}

Json error_report(const std::exception& e) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["error"] = {{"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e); err && !err->file().empty()) {
    j["error"]["file"] = err->file();
    j["error"]["line"] = err->line();
  }
  return j;
}

}  // namespace nscache
