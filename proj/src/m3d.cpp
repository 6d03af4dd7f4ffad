#include "nscache/m3d.hpp"

#include <algorithm>
#include <cmath>

#include "nscache/error.hpp"

namespace nscache {

TierStack fold_array(double array_w_um, double array_h_um, int n_folds, double device_tier_height_um,
                     int tiers_per_cell, double cell_w_um, double cell_h_um) {
  if (!(array_w_um > 0) || !(array_h_um > 0)) throw Error("fold_array: array dimensions must be positive");
  if (n_folds < 0 || n_folds > 2) throw Error("fold_array: 0 to 2 folds supported (at most 4 memory tiers)");
  if (tiers_per_cell < 1) throw Error("fold_array: tiers per cell must be >= 1");
  TierStack s;
  s.array_w_um = array_w_um;
  s.array_h_um = array_h_um;
  const bool cells = cell_w_um > 0 && cell_h_um > 0;
  double cols = cells ? std::round(array_w_um / cell_w_um) : 0;
  double rows = cells ? std::round(array_h_um / cell_h_um) : 0;
  double w = array_w_um, h = array_h_um;
  for (int i = 0; i < n_folds; ++i) {
    if (w > h) {
      if (cells) {
        if (std::fmod(cols, 2.0) != 0) cols += 1;
        cols /= 2;
        w = cols * cell_w_um;
      } else {
        w /= 2;
      }
      ++s.folds_w;
    } else {
      if (cells) {
        if (std::fmod(rows, 2.0) != 0) rows += 1;
        rows /= 2;
        h = rows * cell_h_um;
      } else {
        h /= 2;
      }
      ++s.folds_h;
    }
  }
  s.n_memory_tiers = 1 << n_folds;
  s.tier_w_um = w;
  s.tier_h_um = h;
  s.miv_max_height_um = s.n_memory_tiers * tiers_per_cell * device_tier_height_um;
  return s;
}

FeolFrame reshape_feol(double periph_area_um2, double target_aspect, double array_w_um, double array_h_um) {
  if (!(periph_area_um2 > 0)) throw Error("reshape_feol: periphery area must be positive");
  if (!(target_aspect > 0)) throw Error("reshape_feol: aspect ratio must be positive");
  FeolFrame f;
  f.w_um = std::sqrt(periph_area_um2 * target_aspect);
  f.h_um = std::sqrt(periph_area_um2 / target_aspect);
  f.xwl_extension_um = array_w_um > 0 ? std::fabs(f.w_um - array_w_um) : 0;
  f.xbl_extension_um = array_h_um > 0 ? std::fabs(f.h_um - array_h_um) : 0;
  return f;
}

MIVParasitics miv_parasitics(const TierStack& stack, const MIVParams& mivs, int signals) {
  if (signals < 0) throw Error("miv_parasitics: negative signal count");
  if (signals == 0) return {};
  MIVParasitics p;
  p.r = mivs.r_per_via * stack.n_memory_tiers;
  p.c = mivs.c_per_um_height * stack.miv_max_height_um;
  const double pitch = mivs.pitch_nm * 1e-3;
  p.area_um2 = signals * pitch * pitch;
  return p;
}

MatPPA assemble_m3d_mat(const MatDesign& d, int n_folds, double extra_feol_area_um2) {
  if (!d.cell.is_beol) throw Error("assemble_m3d_mat: cell is not a BEOL cell");
  if (extra_feol_area_um2 < 0) throw Error("assemble_m3d_mat: negative reserved FEOL area");
  validate(d);
  const TechNode& tech = *d.tech;
  const MatPPA planar = build_mat(d);

  TierStack stack = fold_array(planar.array_width_um, planar.array_height_um, n_folds, tech.miv.tier_height_um,
                               d.cell.tiers_per_cell, d.cell.width_um(), d.cell.height_um());
  const int signals = planar.wordlines + planar.bitlines;
  const MIVParasitics miv = miv_parasitics(stack, tech.miv, signals);
  stack.miv_count = signals;

  const WireLayer& ext = tech.intermediate_layer();
  const double aspect = stack.tier_w_um / stack.tier_h_um;
  auto lines_for = [&](const FeolFrame& f) {
    LineParasitics l;
    l.wl_branches = 1 << stack.folds_w;
    l.bl_branches = 1 << stack.folds_h;
    l.wl_extra_r = miv.r + f.xwl_extension_um * ext.r_per_um;
    l.wl_extra_c = miv.c + f.xwl_extension_um * ext.c_per_um;
    l.bl_extra_r = miv.r + f.xbl_extension_um * ext.r_per_um;
    l.bl_extra_c = miv.c + f.xbl_extension_um * ext.c_per_um;
    return l;
  };

  // Drivers resize for the added load, so the frame is re-derived once from
  // the loaded periphery.
  FeolFrame frame = reshape_feol(planar.periph_area_um2 + miv.area_um2 + extra_feol_area_um2, aspect,
                                 stack.tier_w_um, stack.tier_h_um);
  MatPPA m = build_mat(d, lines_for(frame));
  frame = reshape_feol(m.periph_area_um2 + miv.area_um2 + extra_feol_area_um2, aspect, stack.tier_w_um,
                       stack.tier_h_um);
  stack.xwl_extension_um = frame.xwl_extension_um;
  stack.xbl_extension_um = frame.xbl_extension_um;

  m.tiers = stack.n_memory_tiers;
  m.array_width_um = stack.tier_w_um;
  m.array_height_um = stack.tier_h_um;
  m.area_beol_um2 = stack.tier_area_um2() * stack.n_memory_tiers;
  m.area_feol_um2 = frame.w_um * frame.h_um;
  m.width_um = std::max(frame.w_um, stack.tier_w_um);
  m.height_um = std::max(frame.h_um, stack.tier_h_um);
  for (auto& c : m.components)
    if (c.name == "array") c.area_um2 = m.area_beol_um2;
  m.components.push_back({"miv_array", miv.area_um2, 0, 0, 0, false});
  if (extra_feol_area_um2 > 0) m.components.push_back({"reserved_feol", extra_feol_area_um2, 0, 0, 0, false});
  return m;
}

}  // namespace nscache
