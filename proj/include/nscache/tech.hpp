#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nscache/config.hpp"

namespace nscache {

enum class DeviceClass { FinFET, Nanosheet, BEOL_AOS_DG, BEOL_AOS_CAA };

std::string_view to_string(DeviceClass c);
DeviceClass device_class_from(std::string_view s);

// Per-micron transistor parameters at the node supply voltage.
struct DeviceParams {
  double i_on_per_um = 0;            // A/um, saturation current
  double i_off_per_um = 0;           // A/um at Vgs = 0, Vds = Vdd
  double ss_mv_per_dec = 0;          // subthreshold swing
  double vth = 0;                    // V
  double c_gate_per_um = 0;          // F/um
  double c_parasitic_gs_per_um = 0;  // F/um (overlap / contact)
  double c_parasitic_gd_per_um = 0;  // F/um
  double r_on_per_um = 0;            // ohm*um effective switching resistance
  double alpha_power = 1.3;          // above-threshold exponent
  double overdrive_half = 0.3;       // V of overdrive at which half of i_on is reached

  bool operator==(const DeviceParams&) const = default;
};

struct WireLayer {
  std::string name;
  double r_per_um = 0;  // ohm/um
  double c_per_um = 0;  // F/um
  double pitch_nm = 0;

  bool operator==(const WireLayer&) const = default;
};

struct MIVParams {
  double r_per_via = 20.0;         // ohm per memory tier crossed
  double c_per_um_height = 0.2e-15;  // F/um
  double diameter_nm = 40.0;
  double pitch_nm = 100.0;
  double tier_height_um = 0.2;     // one device tier

  bool operator==(const MIVParams&) const = default;
};

// Standard-cell and peripheral constants used by the circuit models.
struct CircuitConstants {
  double min_nmos_width_um = 0.1;
  double min_pmos_width_um = 0.1;
  double max_finger_width_um = 0.3;   // widest device that fits a cell row
  double input_slew_s = 5e-12;        // fixed input ramp for Horowitz stages
  double self_loading_gamma = 1.0;    // C_int / C_g
  double sense_voltage = 0.08;        // V input swing for a voltage latch SA
  double sense_amp_devices = 12;      // min-device equivalents per voltage SA
  double csa_area_factor = 2.0;       // current SA area over a voltage SA
  double csa_leakage_factor = 8.0;    // current SA leakage over a voltage SA
  double csa_sense_time_factor = 3.0; // current SA resolve time over a voltage SA
  double level_shifter_width_factor = 2.0;  // cross-coupled devices, x min width
  double level_shifter_area_factor = 3.0;   // thick-oxide / spacing overhead
  double tristate_area_factor = 2.0;        // tri-state stage over a plain inverter
  double write_driver_strength = 2.0;       // extra drive for write drivers
  double sram_cell_leak_devices = 3.0;      // off devices per SRAM cell
  double dibl_v_per_v = 0.03;               // threshold drop per volt of drain bias above Vdd
  double driver_final_fanout = 8.0;         // minimum last-stage fanout of driver chains, 0 = delay-optimal
};

struct TechNode {
  int node_nm = 0;
  DeviceClass device_class = DeviceClass::FinFET;
  DeviceClass aos_class = DeviceClass::BEOL_AOS_DG;
  double vdd = 0;
  double temperature_k = 358.15;
  double reference_temperature_k = 358.15;
  double leakage_activation_ev = 0.3;
  DeviceParams logic_n, logic_p, access_aos_write, access_aos_read;
  double fin_pitch_nm = 0;
  double gate_pitch_nm = 0;
  double track_pitch_nm = 0;
  int std_cell_height_tracks = 0;
  std::vector<WireLayer> metal_layers;  // ordered local -> global
  MIVParams miv;
  CircuitConstants circuit;
  std::string source;

  bool operator==(const TechNode&) const;

  const WireLayer& local_layer() const { return metal_layers.front(); }
  const WireLayer& intermediate_layer() const { return metal_layers[metal_layers.size() / 2]; }
  const WireLayer& global_layer() const { return metal_layers.back(); }
  const WireLayer& layer(std::string_view name) const;

  double std_cell_height_um() const { return std_cell_height_tracks * track_pitch_nm * 1e-3; }
  double gate_pitch_um() const { return gate_pitch_nm * 1e-3; }
};

// "7nm"/"3nm" (built-in data files), a bare number, or a path to a tech file.
TechNode load_tech(std::string_view source);
TechNode tech_from_config(const ConfigDocument& doc);

// Device parameters adjusted to the node temperature: SS scales with absolute
// temperature and off-current with an Arrhenius factor.
DeviceParams at_temperature(const DeviceParams& d, const TechNode& tech);

struct WireRC {
  double resistance = 0;   // ohm
  double capacitance = 0;  // F
};

WireRC wire_rc(const WireLayer& layer, double length_um);

struct DeviceCaps {
  double c_gate = 0;
  double c_gs = 0;
  double c_gd = 0;
};

DeviceCaps device_caps(const DeviceParams& d, double width_um);

void validate(const DeviceParams& d, std::string_view role);
void validate(const TechNode& t);

}  // namespace nscache
