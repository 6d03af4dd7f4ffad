#include "nscache/bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "nscache/error.hpp"

namespace nscache {

std::string_view to_string(BankKind k) {
  switch (k) {
    case BankKind::Data: return "Data";
    case BankKind::Tag: return "Tag";
    case BankKind::TAU_HM: return "TAU_HM";
    case BankKind::TAU_HT: return "TAU_HT";
  }
  return "?";
}

std::string_view to_string(AccessMode m) {
  switch (m) {
    case AccessMode::Normal: return "Normal";
    case AccessMode::Sequential: return "Sequential";
    case AccessMode::Fast: return "Fast";
  }
  return "?";
}

BankKind bank_kind_from(std::string_view s) {
  if (s == "Data" || s == "data") return BankKind::Data;
  if (s == "Tag" || s == "tag") return BankKind::Tag;
  if (s == "TAU_HM" || s == "HM" || s == "hm") return BankKind::TAU_HM;
  if (s == "TAU_HT" || s == "HT" || s == "ht") return BankKind::TAU_HT;
  throw Error("unknown bank kind '" + std::string(s) + "'");
}

AccessMode access_mode_from(std::string_view s) {
  if (s == "Normal" || s == "normal") return AccessMode::Normal;
  if (s == "Sequential" || s == "sequential") return AccessMode::Sequential;
  if (s == "Fast" || s == "fast") return AccessMode::Fast;
  throw Error("unknown access mode '" + std::string(s) + "'");
}

namespace {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(std::int64_t n, const char* what) {
  if (!is_pow2(n)) throw Error(std::string(what) + " must be a power of two");
  int l = 0;
  while ((std::int64_t{1} << l) < n) ++l;
  return l;
}

int ceil_log2(std::int64_t n) {
  int l = 0;
  while ((std::int64_t{1} << l) < n) ++l;
  return l;
}

// Random data toggles half of the wires of a bus per transfer.
constexpr double kBusActivity = 0.5;

// A leg shorter than half the optimal repeater spacing gets one fanout-4
// buffer instead of a delay-optimal repeater.
RepeatedWire leg_wire(const WireLayer& layer, double len, const TechNode& tech) {
  const double c0 = min_inverter_cap(tech);
  const double r0 = tech.logic_n.r_on_per_um / (2 * tech.circuit.min_nmos_width_um) +
                    tech.logic_p.r_on_per_um / (2 * tech.circuit.min_pmos_width_um);
  const double cp = tech.circuit.self_loading_gamma * c0;
  const double l_opt = std::sqrt(2.0 * r0 * (c0 + cp) / (layer.r_per_um * layer.c_per_um));
  if (len <= 0 || len >= 0.5 * l_opt) return repeated_wire(layer, len, tech);
  const WireRC w = wire_rc(layer, len);
  const double size = std::max(1.0, w.capacitance / (4.0 * c0));
  RepeatedWire out;
  out.segments = 1;
  out.repeater_size = size;
  out.ppa.delay_s = stage_delay(tech, size, w.capacitance) + 0.5 * w.resistance * w.capacitance;
  out.ppa.dynamic_energy_j = (w.capacitance + size * (c0 + cp)) * tech.vdd * tech.vdd;
  out.ppa.area_um2 = inverter_area_um2(tech, size);
  out.ppa.leakage_w = inverter_leakage_w(tech, size, tech.vdd);
  return out;
}

}  // namespace

int tag_address_bits(std::int64_t capacity_bytes, int associativity, int line_bytes, int address_bits) {
  const std::int64_t lines = capacity_bytes / line_bytes;
  const int set_bits = log2_exact(lines / associativity, "set count");
  const int offset_bits = log2_exact(line_bytes, "line size");
  const int t = address_bits - set_bits - offset_bits;
  if (t < 1) throw Error("address too narrow for the cache geometry");
  return t;
}

int tag_entry_bits(std::int64_t capacity_bytes, int associativity, int line_bytes, int address_bits) {
  return tag_address_bits(capacity_bytes, associativity, line_bytes, address_bits) + 2;
}

int tag_entry_stored_bits(int w_block_tag) { return 1 << ceil_log2(std::max(1, w_block_tag)); }

std::int64_t bits_per_access(const BankOrg& o) {
  if (o.kind == BankKind::Tag) return std::int64_t{o.associativity} * tag_entry_stored_bits(o.w_block_tag);
  if (o.mode == AccessMode::Sequential) return o.w_block_data;
  return std::int64_t{o.associativity} * o.w_block_data;
}

std::int64_t stored_bits_per_slice(const BankOrg& o) {
  const std::int64_t blocks = o.n_block / o.slices;
  if (o.kind == BankKind::Tag) return blocks * tag_entry_stored_bits(o.w_block_tag);
  return blocks * o.w_block_data;
}

void validate(const BankOrg& o) {
  char buf[256];
  auto need_pow2 = [&](std::int64_t v, const char* what) {
    if (!is_pow2(v)) {
      std::snprintf(buf, sizeof buf, "bank: %s = %lld must be a power of two", what, static_cast<long long>(v));
      throw Error(buf);
    }
  };
  need_pow2(o.n_sr, "subarray rows");
  need_pow2(o.n_sc, "subarray columns");
  need_pow2(o.mats_r, "mat rows per subarray");
  need_pow2(o.mats_c, "mat columns per subarray");
  need_pow2(o.associativity, "associativity");
  need_pow2(o.n_block, "block count");
  need_pow2(o.slices, "slice count");
  need_pow2(o.w_block_data, "block width");
  if (o.n_asr < 1 || o.n_asc < 1 || o.n_asr > o.n_sr || o.n_asc > o.n_sc)
    throw Error("bank: active subarrays must lie within the subarray grid");
  if (o.n_amr < 1 || o.n_amc < 1 || o.n_amr > o.mats_r || o.n_amc > o.mats_c)
    throw Error("bank: active mats must lie within the subarray's mat grid");
  if (o.folds < 0 || o.folds > 2) throw Error("bank: 0 to 2 folds supported");
  if (o.capacity_bytes <= 0) throw Error("bank: capacity must be positive");
  if (o.n_block * (o.w_block_data / 8) != o.capacity_bytes) {
    std::snprintf(buf, sizeof buf, "bank: %lld blocks of %d bits do not make %lld bytes",
                  static_cast<long long>(o.n_block), o.w_block_data, static_cast<long long>(o.capacity_bytes));
    throw Error(buf);
  }
  if (o.n_block / o.associativity < o.slices) throw Error("bank: fewer sets than slices");
  if (o.kind != BankKind::Data) {
    const int expect = tag_entry_bits(o.capacity_bytes, o.associativity, o.w_block_data / 8, o.address_bits);
    if (o.w_block_tag != expect) {
      std::snprintf(buf, sizeof buf, "bank: tag width %d inconsistent with the address split (expected %d)",
                    o.w_block_tag, expect);
      throw Error(buf);
    }
  }
  const std::int64_t cells = std::int64_t{o.n_sr} * o.n_sc * o.mats_r * o.mats_c * o.mat_rows * o.mat_cols;
  const std::int64_t need = stored_bits_per_slice(o);
  if (cells != need) {
    std::snprintf(buf, sizeof buf,
                  "bank: inconsistent capacity: %dx%d subarrays x %dx%d mats x %dx%d cells = %lld bits, need %lld",
                  o.n_sr, o.n_sc, o.mats_r, o.mats_c, o.mat_rows, o.mat_cols, static_cast<long long>(cells),
                  static_cast<long long>(need));
    throw Error(buf);
  }
}

MatDesign mat_design_for(const BankOrg& o, const CellModel& cell, const TechNode& tech, double budget) {
  MatDesign d;
  d.cell = cell;
  d.tech = &tech;
  d.n_rows = o.mat_rows;
  d.n_cols = o.mat_cols;
  d.bl_mux = o.bl_mux;
  d.sa_mux = o.sa_mux;
  d.wl_segmentation = o.wl_segmentation;
  d.folded_bitline = o.folded_bitline;
  d.reference_rows = o.reference_rows;
  d.ecc_ratio = o.kind == BankKind::Tag ? 0.0 : o.ecc_ratio;
  d.sense_leakage_budget = budget;
  return d;
}

MatPPA mat_for(const BankOrg& o, const CellModel& cell, const TechNode& tech, double budget, double extra_feol) {
  const MatDesign d = mat_design_for(o, cell, tech, budget);
  if (cell.is_beol) return assemble_m3d_mat(d, o.folds, extra_feol);
  if (o.folds != 0) throw Error("bank: folding needs a BEOL cell");
  if (extra_feol > 0) throw Error("bank: reserved FEOL area needs a BEOL data cell");
  return build_mat(d);
}

BankOrg matching_tag_org(const BankOrg& data) {
  BankOrg t = data;
  t.kind = BankKind::Tag;
  t.ecc_ratio = 0;
  t.folds = 0;
  t.folded_bitline = false;
  t.reference_rows = 0;
  t.sa_mux = 1;
  t.wl_segmentation = 1;
  t.w_block_tag = tag_entry_bits(data.capacity_bytes, data.associativity, data.w_block_data / 8, data.address_bits);
  const std::int64_t mats = std::int64_t{t.n_sr} * t.n_sc * t.mats_r * t.mats_c;
  const std::int64_t bits = stored_bits_per_slice(t);
  if (bits % mats != 0) throw Error("tag bank: tag store does not divide over the data grid");
  const std::int64_t per_mat = bits / mats;
  const std::int64_t per_access = bits_per_access(t);
  const std::int64_t n_active = std::int64_t{t.n_asr} * t.n_asc * t.n_amr * t.n_amc;
  const std::int64_t out = std::max<std::int64_t>(1, (per_access + n_active - 1) / n_active);
  int best_cols = 0;
  double best_skew = 1e9;
  for (int cols = 32; cols <= 1024; cols *= 2) {
    if (per_mat % cols != 0) continue;
    const std::int64_t rows = per_mat / cols;
    if (rows < 32 || rows > 1024 || !is_pow2(rows) || cols < out) continue;
    const double skew = std::fabs(std::log2(static_cast<double>(rows) / cols));
    if (skew < best_skew - 1e-12) {
      best_skew = skew;
      best_cols = cols;
    }
  }
  if (best_cols == 0) throw Error("tag bank: no mat shape holds the tag store on the data grid");
  t.mat_cols = best_cols;
  t.mat_rows = static_cast<int>(per_mat / best_cols);
  t.bl_mux = static_cast<int>(best_cols / (1 << ceil_log2(out)));
  t.bl_mux = std::max(1, t.bl_mux);
  return t;
}

GDLWidths gdl_widths(const BankOrg& o) {
  const int log_n = log2_exact(o.n_block, "N_Block");
  const int log_a = log2_exact(o.associativity, "associativity");
  if (o.associativity > o.n_block) throw Error("gdl_widths: associativity exceeds block count");
  const int log_sets = log_n - log_a;
  const int a = o.associativity;
  GDLWidths g;
  switch (o.mode) {
    case AccessMode::Normal:
      g.n_aw = log_sets;
      if (o.kind == BankKind::Data) {
        g.n_bw = log_a;
        g.n_dw = o.w_block_data;
      } else if (o.kind == BankKind::Tag) {
        g.n_bw = o.w_block_tag;
        g.n_dw = a;
      } else {
        g.n_bw = o.w_block_tag + 2;
        g.n_dw = o.w_block_data;
      }
      break;
    case AccessMode::Sequential:
      if (o.kind == BankKind::Data) {
        g.n_aw = log_n;
        g.n_bw = 0;
        g.n_dw = o.w_block_data;
      } else if (o.kind == BankKind::Tag) {
        g.n_aw = log_sets;
        g.n_bw = o.w_block_tag;
        g.n_dw = a;
      } else {
        g.n_aw = log_n;
        g.n_bw = o.w_block_tag + 2;
        g.n_dw = o.w_block_data;
      }
      break;
    case AccessMode::Fast:
      if (o.kind == BankKind::Data) {
        g.n_aw = log_n;
        g.n_bw = 0;
        g.n_dw = o.w_block_data;
      } else if (o.kind == BankKind::Tag) {
        g.n_aw = log_sets;
        g.n_bw = o.w_block_tag;
        g.n_dw = a;
      } else {
        g.n_aw = log_sets;
        g.n_bw = o.w_block_tag + 2;
        g.n_dw = o.w_block_data * a + a;
      }
      break;
  }
  return g;
}

HTreeResult route_htree(int rows, int cols, double leaf_w, double leaf_h, int active_rows, int active_cols, int bits,
                        const WireLayer& layer, const TechNode& tech, int leaf_bits) {
  if (!is_pow2(rows) || !is_pow2(cols)) throw Error("route_htree: grid dimensions must be powers of two");
  if (bits < 0 || leaf_bits < 0) throw Error("route_htree: negative bus width");
  HTreeResult h;
  int r = rows, c = cols;
  double region_w = cols * leaf_w, region_h = rows * leaf_h;
  double nodes = 1;
  const double pitch = layer.pitch_nm * 1e-3;
  while (r > 1 || c > 1) {
    double leg;
    if (c >= r) {
      leg = region_w / 4;
      region_w /= 2;
      c /= 2;
    } else {
      leg = region_h / 4;
      region_h /= 2;
      r /= 2;
    }
    nodes *= 2;
    const double active = std::ceil(static_cast<double>(active_rows) / r) * std::ceil(static_cast<double>(active_cols) / c);
    const double wires = bits + static_cast<double>(leaf_bits) * r * c;
    const double active_wires = bits + static_cast<double>(leaf_bits) * std::min(r, active_rows) * std::min(c, active_cols);
    const RepeatedWire w = leg_wire(layer, leg, tech);
    h.delay_s += w.ppa.delay_s;
    h.energy_j += kBusActivity * active * active_wires * w.ppa.dynamic_energy_j;
    h.wire_area_um2 += nodes * wires * leg * pitch;
    h.repeater_area_um2 += nodes * wires * w.ppa.area_um2;
    h.leakage_w += nodes * wires * w.ppa.leakage_w;
    h.leg_lengths_um.push_back(leg);
    ++h.levels;
  }
  return h;
}

HTreeResult route_htree(const BankOrg& o, double sub_w, double sub_h, int bits, const TechNode& tech) {
  return route_htree(o.n_sr, o.n_sc, sub_w, sub_h, o.n_asr, o.n_asc, bits, tech.global_layer(), tech);
}

namespace {

// Per-subarray structures added beside the mats.
struct SubarrayExtras {
  double area_um2 = 0;
  double leakage_w = 0;
  double e_access_j = 0;  // per active subarray per access
  double t_read_s = 0;    // in the read path after the mat
  std::string name;
};

struct Core {
  BankPPA b;
  double t_ctrl = 0, t_route = 0, t_predec = 0, t_intra = 0;
  double e_ctrl = 0, e_route_in = 0, e_route_out = 0, e_route_write = 0, e_sub_read = 0, e_sub_write = 0;
  double sub_w = 0, sub_h = 0;
  RepeatedWire bcast;
};

Core core_bank(const BankOrg& o, const MatPPA& mat, const TechNode& tech, const SubarrayExtras& ex = {}) {
  validate(o);
  Core k;
  BankPPA& b = k.b;
  b.org = o;
  b.mat = mat;
  b.gdl = gdl_widths(o);
  const GDLWidths& g = b.gdl;
  const int n_sub = o.n_sr * o.n_sc;
  const int n_as = o.n_asr * o.n_asc;
  const int mats = o.mats_r * o.mats_c;
  const int n_am = o.n_amr * o.n_amc;
  b.subarrays = n_sub;

  const std::int64_t need =
      static_cast<std::int64_t>(std::ceil(bits_per_access(o) * (1.0 + (o.kind == BankKind::Tag ? 0 : o.ecc_ratio)) - 1e-9));
  const std::int64_t delivered = std::int64_t{n_as} * n_am * mat.data_out_bits;
  if (delivered < need) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "bank: active mats deliver %lld bits per access, %lld needed",
                  static_cast<long long>(delivered), static_cast<long long>(need));
    throw Error(buf);
  }
  const std::int64_t per_sub = (need + n_as - 1) / n_as;
  const int mats_used = static_cast<int>(std::min<std::int64_t>(n_am, (per_sub + mat.data_out_bits - 1) / mat.data_out_bits));

  auto add = [&](const std::string& name, double count, double area, double leak, double e_hit) {
    b.components.push_back({name, count, area, leak, e_hit});
  };
  const WireLayer& layer = tech.intermediate_layer();

  // Predecoder: selects mats inside a subarray.
  PeripheralPPA predec;
  if (mats > 1) {
    PeripheralParams pp;
    pp.fan_in = ceil_log2(mats);
    pp.count = mats;
    predec = peripheral_ppa(PeripheralKind::RowDecoder, pp, tech).ppa;
  }

  // Intra-subarray routing over the mat grid.
  // Each mat's data wires run from the mat toward the subarray port. When an
  // access reads more bits than leave the bank (all ways of a set), the way
  // select is applied at the mat and only its share travels; the bits that
  // leave are spread over the active mats.
  const int row_bits = ceil_log2(o.mat_rows);
  const double ecc = o.kind == BankKind::Tag ? 0.0 : o.ecc_ratio;
  const double leaving = std::min(std::ceil(g.n_dw * (1.0 + ecc) - 1e-9), static_cast<double>(need));
  const int leaf_bits = std::max(1, static_cast<int>(std::ceil(leaving / (static_cast<double>(n_as) * n_am) - 1e-9)));
  const HTreeResult intra =
      route_htree(o.mats_r, o.mats_c, mat.width_um, mat.height_um, o.n_amr, o.n_amc, row_bits, layer, tech, leaf_bits);

  const double sub_extra_area = predec.area_um2 + intra.repeater_area_um2 + ex.area_um2;
  k.sub_w = o.mats_c * mat.width_um;
  k.sub_h = o.mats_r * mat.height_um + sub_extra_area / k.sub_w;

  // Bank H-tree carries address, broadcast and data wires.
  const int bus_bits = g.n_aw + g.n_bw + g.n_dw;
  const HTreeResult tree = route_htree(o, k.sub_w, k.sub_h, bus_bits, tech);
  const double per_wire = bus_bits > 0 ? 1.0 / bus_bits : 0.0;
  const double bank_w = o.n_sc * k.sub_w;
  const double bank_h = o.n_sr * k.sub_h;

  // Control: one decoder stage and a repeated wire across half the bank edge.
  PeripheralParams cp;
  cp.fan_in = std::max(1, g.n_aw);
  cp.count = 1;
  const PeripheralPPA ctrl_dec = peripheral_ppa(PeripheralKind::RowDecoder, cp, tech).ppa;
  const WireLayer& top = tech.global_layer();
  const RepeatedWire ctrl_wire = repeated_wire(top, 0.5 * std::max(bank_w, bank_h), tech);
  k.bcast = repeated_wire(top, 0.5 * (bank_w + bank_h), tech);

  k.t_ctrl = ctrl_dec.delay_s + ctrl_wire.ppa.delay_s;
  k.t_route = tree.delay_s;
  k.t_predec = predec.delay_s;
  k.t_intra = intra.delay_s;

  b.t_control_s = k.t_ctrl;
  b.t_routing_s = 2 * k.t_route;
  b.t_subarray_s = k.t_predec + 2 * k.t_intra + mat.t_read_s + ex.t_read_s;
  b.t_read_s = k.t_ctrl + b.t_routing_s + b.t_subarray_s;
  const double t_write_arr = k.t_ctrl + k.t_route + k.t_predec + k.t_intra + mat.t_write_s;
  b.subarray_busy_s = k.t_predec + 2 * k.t_intra + mat.t_cycle_s + ex.t_read_s;

  // Energies.
  const double in_bits = g.n_aw + g.n_bw;
  k.e_ctrl = ctrl_dec.dynamic_energy_j + kBusActivity * in_bits * ctrl_wire.ppa.dynamic_energy_j;
  k.e_route_in = tree.energy_j * per_wire * in_bits;
  k.e_route_out = tree.energy_j * per_wire * g.n_dw;
  k.e_route_write = tree.energy_j * per_wire * (in_bits + g.n_dw);
  const double e_intra = intra.energy_j;
  k.e_sub_read = n_as * (predec.dynamic_energy_j + e_intra + mats_used * mat.e_read_j + ex.e_access_j);
  k.e_sub_write = n_as * (predec.dynamic_energy_j + e_intra + mats_used * mat.e_write_j);
  b.e_read_j = k.e_ctrl + k.e_route_in + k.e_route_out + k.e_sub_read;
  const double e_write_arr = k.e_ctrl + k.e_route_write + k.e_sub_write;
  b.e_refresh_row_j = mat.e_refresh_row_j;

  // Components (one slice; scaled by slices at the end).
  const double n_mats = static_cast<double>(n_sub) * mats;
  add("mats", n_mats, n_mats * mat.footprint_um2(), n_mats * mat.leakage_w, n_as * mats_used * mat.e_read_j);
  if (mats > 1) add("predecoder", n_sub, n_sub * predec.area_um2, n_sub * predec.leakage_w, n_as * predec.dynamic_energy_j);
  add("subarray_htree", n_sub, n_sub * intra.repeater_area_um2, n_sub * intra.leakage_w, n_as * e_intra);
  if (ex.area_um2 > 0 || ex.leakage_w > 0)
    add(ex.name, n_sub, n_sub * ex.area_um2, n_sub * ex.leakage_w, n_as * ex.e_access_j);
  add("bank_htree", 1, tree.repeater_area_um2, tree.leakage_w, k.e_route_in + k.e_route_out);
  const double ctrl_area = ctrl_dec.area_um2 + bus_bits * ctrl_wire.ppa.area_um2;
  const double ctrl_leak = ctrl_dec.leakage_w + bus_bits * ctrl_wire.ppa.leakage_w;
  add("control", 1, ctrl_area, ctrl_leak, k.e_ctrl);

  b.width_um = bank_w;
  const double area_um2 = bank_w * bank_h + tree.repeater_area_um2 + ctrl_area;
  b.height_um = area_um2 / bank_w;
  b.area_mm2 = area_um2 * 1e-6;
  b.area_beol_mm2 = n_mats * mat.area_beol_um2 * 1e-6;
  b.area_feol_mm2 = b.area_mm2;  // the FEOL spans the whole footprint
  b.leakage_w = 0;
  for (const auto& c : b.components) b.leakage_w += c.leakage_w;
  b.refresh_units = mat.refresh.needs ? static_cast<int>(n_mats) : 0;

  // Array-only defaults; callers compose the access modes on top.
  b.t_hit_s = b.t_read_s;
  b.t_write_s = t_write_arr;
  b.e_hit_j = b.e_read_j;
  b.e_write_j = e_write_arr;
  b.e_miss_j = b.e_read_j;
  b.t_miss_detect_s = b.t_read_s;
  return k;
}

void scale_slices(BankPPA& b) {
  const int s = b.org.slices;
  if (s == 1) return;
  b.area_mm2 *= s;
  b.area_feol_mm2 *= s;
  b.area_beol_mm2 *= s;
  b.leakage_w *= s;
  for (auto& c : b.components) {
    c.count *= s;
    c.area_um2 *= s;
    c.leakage_w *= s;
  }
}

void merge_components(BankPPA& into, const BankPPA& from, const std::string& prefix) {
  for (auto c : from.components) {
    c.name = prefix + c.name;
    into.components.push_back(c);
  }
}

}  // namespace

BankPPA build_bank(const BankOrg& o, const MatPPA& mat, const TechNode& tech, const BankPPA* tag) {
  if (is_tau(o.kind)) throw Error("build_bank: combined tag/data banks are built with build_tau_bank");
  if (o.kind == BankKind::Tag) {
    if (tag) throw Error("build_bank: a tag bank takes no tag bank");
    PeripheralParams pp;
    pp.fan_in = std::max(1, tag_address_bits(o.capacity_bytes, o.associativity, o.w_block_data / 8, o.address_bits));
    pp.count = o.associativity;
    const PeripheralPPA cmp = peripheral_ppa(PeripheralKind::Comparator, pp, tech).ppa;
    SubarrayExtras ex;
    ex.name = "comparators";
    ex.area_um2 = cmp.area_um2;
    ex.leakage_w = cmp.leakage_w;
    ex.e_access_j = cmp.dynamic_energy_j;
    ex.t_read_s = cmp.delay_s;
    Core k = core_bank(o, mat, tech, ex);
    BankPPA b = k.b;
    b.t_tag_s = b.t_read_s;
    b.t_hit_s = b.t_miss_detect_s = b.t_read_s;
    b.e_hit_j = b.e_miss_j = b.e_read_j;
    scale_slices(b);
    return b;
  }

  Core k = core_bank(o, mat, tech);
  BankPPA b = k.b;
  if (tag && tag->org.kind != BankKind::Tag) throw Error("build_bank: tag argument is not a tag bank");
  const double t_tag = tag ? tag->t_hit_s : 0.0;
  const double e_tag = tag ? tag->e_hit_j : 0.0;
  const double t_bc = k.bcast.ppa.delay_s;
  const double e_bc = kBusActivity * o.associativity * k.bcast.ppa.dynamic_energy_j;
  b.t_tag_s = t_tag;
  b.t_broadcast_s = t_bc;
  const double t_data = b.t_read_s;
  const double t_write_arr = b.t_write_s;
  switch (o.mode) {
    case AccessMode::Sequential:
      b.t_hit_s = t_tag + t_bc + t_data;
      b.e_hit_j = e_tag + e_bc + b.e_read_j;
      b.e_miss_j = e_tag + e_bc;
      break;
    case AccessMode::Normal:
      b.t_hit_s = std::max(t_tag, t_data) + t_bc;
      b.e_hit_j = e_tag + e_bc + b.e_read_j;
      b.e_miss_j = b.e_hit_j;
      break;
    case AccessMode::Fast:
      b.t_hit_s = t_data;
      b.e_hit_j = e_tag + b.e_read_j;
      b.e_miss_j = b.e_hit_j;
      break;
  }
  b.t_miss_detect_s = t_tag + t_bc;
  b.t_write_s = t_tag + t_bc + t_write_arr;
  b.e_write_j = e_tag + e_bc + b.e_write_j;
  if (tag && o.mode != AccessMode::Sequential) {
    // The data subarray holds its row until the tag confirmation, broadcast
    // back down the data bank tree, reaches it.
    const double start = k.t_ctrl + k.t_route + k.t_predec + k.t_intra;
    const double wait = t_tag + t_bc + k.t_route + k.t_predec + k.t_intra - start;
    b.subarray_busy_s = k.t_predec + 2 * k.t_intra + std::max(b.mat.t_cycle_s, wait);
  }
  scale_slices(b);
  if (tag) {
    b.area_mm2 += tag->area_mm2;
    b.area_feol_mm2 += tag->area_feol_mm2;
    b.leakage_w += tag->leakage_w;
    merge_components(b, *tag, "tag.");
  }
  return b;
}

BankPPA build_cache_bank(const BankOrg& data, const CellModel& data_cell, const CellModel& tag_cell,
                         const TechNode& tech, double budget) {
  BankOrg d = data;
  d.kind = BankKind::Data;
  const BankOrg t = matching_tag_org(d);
  const BankPPA tag = build_bank(t, mat_for(t, tag_cell, tech, budget), tech);
  return build_bank(d, mat_for(d, data_cell, tech, budget), tech, &tag);
}

namespace {

struct TagLocal {
  MatPPA mat;
  PeripheralPPA cmp, enc;
  double t_lookup = 0;  // tag mat read + compare + one-hot encode
  int mats_used = 0;
};

TagLocal tag_local(const BankOrg& tag, const CellModel& tag_cell, const TechNode& tech, double budget, int n_as) {
  TagLocal t;
  t.mat = mat_for(tag, tag_cell, tech, budget);
  PeripheralParams pc;
  pc.fan_in = std::max(1, tag_address_bits(tag.capacity_bytes, tag.associativity, tag.w_block_data / 8, tag.address_bits));
  pc.count = tag.associativity;
  t.cmp = peripheral_ppa(PeripheralKind::Comparator, pc, tech).ppa;
  PeripheralParams pe;
  pe.fan_in = tag.associativity;
  pe.count = 1;
  t.enc = peripheral_ppa(PeripheralKind::OneHotEncoder, pe, tech).ppa;
  t.t_lookup = t.mat.t_read_s + t.cmp.delay_s + t.enc.delay_s;
  const std::int64_t need = bits_per_access(tag);
  const std::int64_t per_sub = (need + n_as - 1) / n_as;
  t.mats_used = static_cast<int>(
      std::min<std::int64_t>(tag.n_amr * tag.n_amc, (per_sub + t.mat.data_out_bits - 1) / t.mat.data_out_bits));
  return t;
}

}  // namespace

BankPPA build_tau_bank(const BankOrg& data, const CellModel& data_cell, const BankOrg& tag, const CellModel& tag_cell,
                       const TechNode& tech, TAUVariant variant, const TAUOptions& opts) {
  const BankKind want = variant == TAUVariant::HM ? BankKind::TAU_HM : BankKind::TAU_HT;
  if (data.kind != want) throw Error("build_tau_bank: organization kind does not match the TAU variant");
  if (!data_cell.is_beol) throw Error("build_tau_bank: data cells must be BEOL to free the FEOL for tags");
  if (tag_cell.kind != CellKind::SRAM6T) throw Error("build_tau_bank: tag cells must be SRAM");
  if (tag.kind != BankKind::Tag) throw Error("build_tau_bank: tag organization must be a tag bank");
  if (tag.n_sr != data.n_sr || tag.n_sc != data.n_sc || tag.mats_r != data.mats_r || tag.mats_c != data.mats_c)
    throw Error("build_tau_bank: tag and data banks need identical subarray and mat grids");
  if (tag.capacity_bytes != data.capacity_bytes || tag.associativity != data.associativity)
    throw Error("build_tau_bank: tag bank does not cover the data bank");
  if (!(opts.central_fraction > 0) || opts.central_fraction > 1)
    throw Error("build_tau_bank: central fraction must be in (0, 1]");
  validate(tag);

  const int n_as = data.n_asr * data.n_asc;
  const TagLocal tl = tag_local(tag, tag_cell, tech, opts.sense_leakage_budget, n_as);
  const double tag_fp = tl.mat.footprint_um2();
  const int n_sub = data.n_sr * data.n_sc;
  const int mats = data.mats_r * data.mats_c;
  const double n_mats = static_cast<double>(n_sub) * mats;

  MatPPA dmat;
  double central = 1.0;
  int rows_c = data.n_sr, cols_c = data.n_sc;
  if (variant == TAUVariant::HM) {
    dmat = mat_for(data, data_cell, tech, opts.sense_leakage_budget, tag_fp);
  } else {
    // Halve the grid around its centre until it holds the target share.
    const double target = std::max(1.0, opts.central_fraction * n_sub);
    while (static_cast<double>(rows_c) * cols_c > target + 1e-9) {
      if (cols_c >= rows_c && cols_c > 1) cols_c /= 2;
      else if (rows_c > 1) rows_c /= 2;
      else break;
    }
    central = static_cast<double>(rows_c) * cols_c / n_sub;
    const MatPPA outer = mat_for(data, data_cell, tech, opts.sense_leakage_budget, 0);
    const MatPPA inner = mat_for(data, data_cell, tech, opts.sense_leakage_budget, tag_fp / central);
    // Mean mat footprint at the outer mat's aspect.
    const double fp = central * inner.footprint_um2() + (1 - central) * outer.footprint_um2();
    dmat = outer;
    const double s = std::sqrt(fp / outer.footprint_um2());
    dmat.width_um *= s;
    dmat.height_um *= s;
    dmat.area_feol_um2 = central * inner.area_feol_um2 + (1 - central) * outer.area_feol_um2;
  }

  SubarrayExtras ex;
  ex.name = "tag_compare_encode";
  const double lookup_share = variant == TAUVariant::HM ? 1.0 : central;
  ex.area_um2 = lookup_share * (tl.cmp.area_um2 + tl.enc.area_um2);
  ex.leakage_w = lookup_share * (tl.cmp.leakage_w + tl.enc.leakage_w);
  Core k = core_bank(data, dmat, tech, ex);
  BankPPA b = k.b;

  const double e_tag_local = n_as * (tl.mats_used * tl.mat.e_read_j + tl.cmp.dynamic_energy_j + tl.enc.dynamic_energy_j);
  b.components.push_back({"tag_mats", n_mats, 0.0, n_mats * tl.mat.leakage_w, n_as * tl.mats_used * tl.mat.e_read_j});
  b.components.back().area_um2 = 0;  // inside the reserved FEOL of the data mats
  b.leakage_w += n_mats * tl.mat.leakage_w;
  b.components.push_back({"tag_logic_energy", 0, 0, 0, n_as * (tl.cmp.dynamic_energy_j + tl.enc.dynamic_energy_j)});

  const double start = k.t_ctrl + k.t_route + k.t_predec + k.t_intra;  // request reaches the mats
  const double out = k.t_intra + k.t_route;                           // mats to bank edge
  const double t_mat = b.mat.t_read_s;
  const double e_data = b.e_read_j;
  const double e_in = k.e_ctrl + k.e_route_in;
  const double e_sub_data = k.e_sub_read;
  const double e_out = k.e_route_out;

  if (variant == TAUVariant::HM) {
    const double t_lookup = tl.t_lookup;
    b.t_tag_s = start + t_lookup + out;
    b.t_miss_detect_s = b.t_tag_s;
    switch (data.mode) {
      case AccessMode::Sequential:
        b.t_hit_s = start + t_lookup + t_mat + out;
        b.subarray_busy_s = k.t_predec + 2 * k.t_intra + t_lookup + b.mat.t_cycle_s;
        b.e_hit_j = e_data + e_tag_local;
        b.e_miss_j = e_in + e_tag_local + e_out;
        break;
      case AccessMode::Normal:
        b.t_hit_s = start + std::max(t_mat, t_lookup) + out;
        b.subarray_busy_s = k.t_predec + 2 * k.t_intra + std::max(b.mat.t_cycle_s, t_lookup);
        b.e_hit_j = b.e_miss_j = e_data + e_tag_local;
        break;
      case AccessMode::Fast:
        b.t_hit_s = start + std::max(t_mat, t_lookup) + out;
        b.subarray_busy_s = k.t_predec + 2 * k.t_intra + std::max(b.mat.t_cycle_s, t_lookup);
        b.e_hit_j = b.e_miss_j = e_data + e_tag_local;
        break;
    }
    b.t_write_s = start + t_lookup + b.mat.t_write_s;
  } else {
    // Two-stage forward routing: controller -> central tag region, then the
    // hit result fans out over the full tree to the data subarray.
    const int bits_c = data.w_block_tag + 2 + ceil_log2(data.n_block / data.associativity);
    const HTreeResult tree_c = route_htree(rows_c, cols_c, k.sub_w, k.sub_h, 1, 1, bits_c, tech.global_layer(), tech);
    const HTreeResult fwd = route_htree(data, k.sub_w, k.sub_h, data.associativity, tech);
    const double t_lookup = k.t_predec + k.t_intra + tl.t_lookup + k.t_intra;
    const double t_tag_done = k.t_ctrl + tree_c.delay_s + t_lookup;
    const double confirm = t_tag_done + tree_c.delay_s + fwd.delay_s;
    b.t_tag_s = t_tag_done + tree_c.delay_s;
    b.t_miss_detect_s = b.t_tag_s;
    const double e_route_tag = kBusActivity * (tree_c.energy_j + fwd.energy_j);
    switch (data.mode) {
      case AccessMode::Sequential:
        b.t_hit_s = confirm + k.t_predec + k.t_intra + t_mat + out;
        b.subarray_busy_s = k.t_predec + 2 * k.t_intra + b.mat.t_cycle_s;
        b.e_hit_j = e_data + e_tag_local + e_route_tag;
        b.e_miss_j = k.e_ctrl + e_tag_local + kBusActivity * tree_c.energy_j;
        break;
      case AccessMode::Normal:
      case AccessMode::Fast: {
        const double ready = start + t_mat;
        b.t_hit_s = data.mode == AccessMode::Fast ? std::max(ready + out, b.t_tag_s) : std::max(ready, confirm) + out;
        const double wait = data.mode == AccessMode::Fast ? 0.0 : confirm - start;
        b.subarray_busy_s = k.t_predec + 2 * k.t_intra + std::max(b.mat.t_cycle_s, wait);
        b.e_hit_j = b.e_miss_j = e_data + e_tag_local + e_route_tag;
        break;
      }
    }
    b.t_write_s = confirm + k.t_predec + k.t_intra + b.mat.t_write_s;
    b.write_penalty_cycles = opts.ht_write_penalty_cycles;
    b.components.push_back({"tag_route", 1, tree_c.repeater_area_um2, tree_c.leakage_w, e_route_tag});
    b.area_mm2 += tree_c.repeater_area_um2 * 1e-6;
    b.leakage_w += tree_c.leakage_w;
  }
  (void)e_sub_data;
  b.e_write_j = k.e_ctrl + k.e_route_write + k.e_sub_write + e_tag_local;
  b.e_refresh_row_j = b.mat.e_refresh_row_j;
  scale_slices(b);
  return b;
}

}  // namespace nscache
