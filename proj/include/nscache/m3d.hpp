#pragma once

#include "nscache/mat.hpp"

namespace nscache {

struct TierStack {
  int n_memory_tiers = 1;
  int folds_w = 0;  // folds that halved the width (wordline axis)
  int folds_h = 0;  // folds that halved the height (bitline axis)
  double array_w_um = 0, array_h_um = 0;  // unfolded input
  double tier_w_um = 0, tier_h_um = 0;    // per-tier footprint after folding and padding
  double xwl_extension_um = 0;
  double xbl_extension_um = 0;
  int miv_count = 0;
  double miv_max_height_um = 0;

  double tier_area_um2() const { return tier_w_um * tier_h_um; }
};

// Folds the array up to twice, always along the currently larger planar
// dimension (height on ties). With cell pitches given, an odd cell count on
// the folded axis is padded by one before halving.
TierStack fold_array(double array_w_um, double array_h_um, int n_folds, double device_tier_height_um = 0.2,
                     int tiers_per_cell = 1, double cell_w_um = 0, double cell_h_um = 0);

struct FeolFrame {
  double w_um = 0, h_um = 0;
  double xwl_extension_um = 0;  // |frame width - array width|
  double xbl_extension_um = 0;  // |frame height - array height|
};

FeolFrame reshape_feol(double periph_area_um2, double target_aspect, double array_w_um = 0, double array_h_um = 0);

struct MIVParasitics {
  double r = 0;  // ohm per signal
  double c = 0;  // F per signal
  double area_um2 = 0;
};

MIVParasitics miv_parasitics(const TierStack& stack, const MIVParams& mivs, int signals);

// `extra_feol_area_um2` reserves FEOL area under the array for another
// structure (tag mats in a combined tag/data bank).
MatPPA assemble_m3d_mat(const MatDesign& design, int n_folds, double extra_feol_area_um2 = 0);

}  // namespace nscache
