#pragma once

#include <string>
#include <vector>

#include "nscache/cells.hpp"
#include "nscache/circuits.hpp"

namespace nscache {

struct MatDesign {
  CellModel cell;
  const TechNode* tech = nullptr;
  int n_rows = 256;
  int n_cols = 256;  // data columns; ECC columns are added on top
  int bl_mux = 1;
  int sa_mux = 1;
  int wl_segmentation = 1;
  bool folded_bitline = false;
  int reference_rows = 0;  // per folded partition
  double ecc_ratio = 0;    // extra check bits per data bit
  double sense_leakage_budget = 0.1;
};

// Extra line parasitics imposed by 3D assembly. Folded lines become parallel
// branches that join at the MIV; extras sit between the driver and the split.
struct LineParasitics {
  int wl_branches = 1;
  int bl_branches = 1;
  double wl_extra_r = 0, wl_extra_c = 0;
  double bl_extra_r = 0, bl_extra_c = 0;
};

struct RefreshInfo {
  bool needs = false;
  double t_retention_s = 0;
  int n_rows = 0;
};

struct MatComponent {
  std::string name;
  double area_um2 = 0;
  double leakage_w = 0;
  double e_read_j = 0;
  double e_write_j = 0;
  bool beol = false;
};

struct MatTiming {
  double t_decode = 0;
  double t_wordline = 0;
  double t_bitline = 0;
  double t_sense = 0;
  double t_mux = 0;
  double t_write_row = 0;
  double t_write_drive = 0;
  double t_cell_write = 0;
  double t_restore = 0;
};

struct MatPPA {
  double area_feol_um2 = 0;
  double area_beol_um2 = 0;
  double width_um = 0;   // footprint
  double height_um = 0;
  int tiers = 1;         // memory tiers
  double array_width_um = 0;   // per tier
  double array_height_um = 0;
  double periph_area_um2 = 0;  // FEOL periphery excluding the array
  double t_read_s = 0;
  double t_write_s = 0;
  double t_cycle_s = 0;  // read occupancy: read + precharge (+ restore)
  double e_read_j = 0;
  double e_write_j = 0;
  double e_refresh_row_j = 0;
  double e_write_boost_j = 0;  // part of e_write scaling with VBoost^2
  double e_write_hold_j = 0;   // part of e_write scaling with VHold^2
  double leakage_w = 0;
  double cell_leakage_w = 0;
  RefreshInfo refresh;
  int physical_rows = 0;
  int physical_cols = 0;
  int data_out_bits = 0;  // physical bits per access
  int wordlines = 0;      // lines that cross to the BEOL when stacked
  int bitlines = 0;
  int driver_stages_max = 0;
  MatTiming timing;
  std::vector<MatComponent> components;

  double footprint_um2() const { return width_um * height_um; }
};

int physical_columns(int n_cols, double ecc_ratio);
void validate(const MatDesign& d);

MatPPA build_mat(const MatDesign& design);
MatPPA build_mat(const MatDesign& design, const LineParasitics& lines);

// Returns (interval between refreshes of one row, rows per sweep).
struct RefreshParams {
  double interval_per_row_s = 0;
  int rows = 0;
};
RefreshParams refresh_params(const MatPPA& mat, double derate);

}  // namespace nscache
