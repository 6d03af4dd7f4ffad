#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nscache/m3d.hpp"
#include "nscache/mat.hpp"

namespace nscache {

enum class BankKind { Data, Tag, TAU_HM, TAU_HT };
enum class AccessMode { Normal, Sequential, Fast };

std::string_view to_string(BankKind k);
std::string_view to_string(AccessMode m);
BankKind bank_kind_from(std::string_view s);
AccessMode access_mode_from(std::string_view s);

inline bool is_tau(BankKind k) { return k == BankKind::TAU_HM || k == BankKind::TAU_HT; }

struct BankOrg {
  BankKind kind = BankKind::Data;
  int n_sr = 1, n_sc = 1;    // subarray grid
  int n_asr = 1, n_asc = 1;  // active subarrays
  int mats_r = 1, mats_c = 1;  // mats per subarray
  int n_amr = 1, n_amc = 1;    // active mats per active subarray
  int associativity = 16;
  std::int64_t n_block = 0;
  int w_block_data = 512;  // bits
  int w_block_tag = 0;     // bits, tag plus status
  AccessMode mode = AccessMode::Normal;
  double ecc_ratio = 0;
  std::int64_t capacity_bytes = 0;
  int slices = 1;
  int address_bits = 48;
  // Mat organization shared by every mat of the bank.
  int mat_rows = 256, mat_cols = 256;
  int bl_mux = 1, sa_mux = 1;
  int wl_segmentation = 1;
  bool folded_bitline = false;
  int reference_rows = 0;
  int folds = 0;  // BEOL stacking folds (0..2)

  bool operator==(const BankOrg&) const = default;
};

// Tag bits T for a physical address split into tag / set index / line offset.
int tag_address_bits(std::int64_t capacity_bytes, int associativity, int line_bytes, int address_bits);
// Stored tag entry: T plus valid and dirty bits.
int tag_entry_bits(std::int64_t capacity_bytes, int associativity, int line_bytes, int address_bits);
// Tag entries are stored at the next power-of-two width.
int tag_entry_stored_bits(int w_block_tag);

// Bits each access must deliver to the bank edge from the arrays, before ECC.
std::int64_t bits_per_access(const BankOrg& org);
std::int64_t stored_bits_per_slice(const BankOrg& org);

void validate(const BankOrg& org);

MatDesign mat_design_for(const BankOrg& org, const CellModel& cell, const TechNode& tech,
                         double sense_leakage_budget = 0.1);

// Tag bank for `data` with the same subarray grid and mats per subarray; mat
// dimensions are chosen to hold the tag store.
BankOrg matching_tag_org(const BankOrg& data);

struct GDLWidths {
  int n_aw = 0;  // address
  int n_bw = 0;  // broadcast
  int n_dw = 0;  // distributed (data)
  int total() const { return n_aw + n_bw + n_dw; }
  bool operator==(const GDLWidths&) const = default;
};

GDLWidths gdl_widths(const BankOrg& org);

struct HTreeResult {
  double delay_s = 0;   // to the deepest leaf
  double energy_j = 0;  // one transfer over legs toward active leaves
  double wire_area_um2 = 0;
  double repeater_area_um2 = 0;
  double leakage_w = 0;
  int levels = 0;
  std::vector<double> leg_lengths_um;  // one per level, root first
};

// Recursive H-tree over a rows x cols grid of leaves of leaf_w x leaf_h um,
// splitting the dimension with more leaves first (columns on ties). Every leg
// carries `bits_per_leg` wires plus `leaf_bits` for each leaf below it.
HTreeResult route_htree(int rows, int cols, double leaf_w_um, double leaf_h_um, int active_rows, int active_cols,
                        int bits_per_leg, const WireLayer& layer, const TechNode& tech, int leaf_bits = 0);
// Bank-level H-tree over the subarray grid of `org`, on the global layer.
HTreeResult route_htree(const BankOrg& org, double subarray_w_um, double subarray_h_um, int bits_per_leg,
                        const TechNode& tech);

struct BankComponent {
  std::string name;
  double count = 1;
  double area_um2 = 0;   // total over all instances
  double leakage_w = 0;  // total
  double e_hit_j = 0;    // per hit
};

struct BankPPA {
  BankOrg org;
  double area_mm2 = 0;  // all slices
  double area_feol_mm2 = 0;
  double area_beol_mm2 = 0;
  double width_um = 0, height_um = 0;  // one slice
  double t_hit_s = 0;
  double t_miss_detect_s = 0;
  double t_write_s = 0;
  double t_tag_s = 0;
  double t_read_s = 0;  // array read, request to data at the bank edge
  double t_control_s = 0;
  double t_routing_s = 0;   // H-tree in and out
  double t_subarray_s = 0;  // predecode + intra-subarray routing + mat
  double t_broadcast_s = 0;
  double e_hit_j = 0;
  double e_miss_j = 0;
  double e_write_j = 0;
  double e_read_j = 0;  // array read alone
  double e_refresh_row_j = 0;  // one row in one mat
  double leakage_w = 0;  // all slices
  double subarray_busy_s = 0;
  int write_penalty_cycles = 0;
  int refresh_units = 0;  // independently refreshed mats per slice
  int subarrays = 0;
  GDLWidths gdl;
  MatPPA mat;
  std::vector<BankComponent> components;

  double bandwidth_hz() const { return subarray_busy_s > 0 ? 1.0 / subarray_busy_s : 0.0; }
};

// Data or tag bank. When `tag` is given (data bank only) the access-mode
// composition uses its lookup latency and energy; area and leakage include it.
BankPPA build_bank(const BankOrg& org, const MatPPA& mat, const TechNode& tech, const BankPPA* tag = nullptr);

enum class TAUVariant { HM, HT };

struct TAUOptions {
  double central_fraction = 0.25;
  int ht_write_penalty_cycles = 2;
  double sense_leakage_budget = 0.1;
};

BankPPA build_tau_bank(const BankOrg& data, const CellModel& data_cell, const BankOrg& tag, const CellModel& tag_cell,
                       const TechNode& tech, TAUVariant variant, const TAUOptions& opts = {});

// Mat for `org`: the M3D assembly for BEOL cells, planar otherwise.
MatPPA mat_for(const BankOrg& org, const CellModel& cell, const TechNode& tech, double sense_leakage_budget = 0.1,
               double extra_feol_area_um2 = 0);

// Bank plus its matching SRAM tag bank in the org's access mode.
BankPPA build_cache_bank(const BankOrg& data, const CellModel& data_cell, const CellModel& tag_cell,
                         const TechNode& tech, double sense_leakage_budget = 0.1);

}  // namespace nscache
