#include "nscache/tech.hpp"

#include <cmath>
#include <filesystem>

namespace nscache {

namespace {

constexpr double kBoltzmannEv = 8.617333262e-5;

DeviceParams device_from(const ConfigDocument& doc, const std::string& role, const DeviceParams& defaults) {
  DeviceParams d;
  d.i_on_per_um = doc.number(role + "_IonPerUm");
  d.i_off_per_um = doc.number(role + "_IoffPerUm");
  d.ss_mv_per_dec = doc.number(role + "_SS");
  d.vth = doc.number(role + "_Vth");
  d.c_gate_per_um = doc.number(role + "_CgatePerUm");
  d.c_parasitic_gs_per_um = doc.number(role + "_CgsPerUm");
  d.c_parasitic_gd_per_um = doc.number(role + "_CgdPerUm");
  d.r_on_per_um = doc.number(role + "_RonPerUm");
  d.alpha_power = doc.number_or(role + "_AlphaPower", defaults.alpha_power);
  d.overdrive_half = doc.number_or(role + "_OverdriveHalf", defaults.overdrive_half);
  try {
    validate(d, role);
  } catch (const Error& e) {
    doc.fail(role + "_IonPerUm", e.what());
  }
  return d;
}

WireLayer layer_from(const ConfigDocument& doc, const std::string& name) {
  WireLayer l;
  l.name = name;
  l.r_per_um = doc.number("WireResistancePerUm_" + name);
  l.c_per_um = doc.number("WireCapacitancePerUm_" + name);
  l.pitch_nm = doc.number("WirePitch_" + name);
  if (!(l.r_per_um > 0)) doc.fail("WireResistancePerUm_" + name, "must be positive");
  if (!(l.c_per_um > 0)) doc.fail("WireCapacitancePerUm_" + name, "must be positive");
  if (!(l.pitch_nm > 0)) doc.fail("WirePitch_" + name, "must be positive");
  return l;
}

double positive(const ConfigDocument& doc, std::string_view key) {
  const double v = doc.number(key);
  if (!(v > 0)) doc.fail(key, "must be positive");
  return v;
}

double positive_or(const ConfigDocument& doc, std::string_view key, double fallback) {
  return doc.has(key) ? positive(doc, key) : fallback;
}

}  // namespace

std::string_view to_string(DeviceClass c) {
  switch (c) {
    case DeviceClass::FinFET: return "FinFET";
    case DeviceClass::Nanosheet: return "Nanosheet";
    case DeviceClass::BEOL_AOS_DG: return "BEOL_AOS_DG";
    case DeviceClass::BEOL_AOS_CAA: return "BEOL_AOS_CAA";
  }
  return "?";
}

DeviceClass device_class_from(std::string_view s) {
  if (s == "FinFET") return DeviceClass::FinFET;
  if (s == "Nanosheet") return DeviceClass::Nanosheet;
  if (s == "BEOL_AOS_DG") return DeviceClass::BEOL_AOS_DG;
  if (s == "BEOL_AOS_CAA") return DeviceClass::BEOL_AOS_CAA;
  throw Error("unknown device class '" + std::string(s) + "'");
}

bool TechNode::operator==(const TechNode& o) const {
  return node_nm == o.node_nm && device_class == o.device_class && aos_class == o.aos_class && vdd == o.vdd &&
         temperature_k == o.temperature_k && reference_temperature_k == o.reference_temperature_k &&
         leakage_activation_ev == o.leakage_activation_ev && logic_n == o.logic_n && logic_p == o.logic_p &&
         access_aos_write == o.access_aos_write && access_aos_read == o.access_aos_read &&
         fin_pitch_nm == o.fin_pitch_nm && gate_pitch_nm == o.gate_pitch_nm && track_pitch_nm == o.track_pitch_nm &&
         std_cell_height_tracks == o.std_cell_height_tracks && metal_layers == o.metal_layers && miv == o.miv;
}

const WireLayer& TechNode::layer(std::string_view name) const {
  for (const auto& l : metal_layers)
    if (l.name == name) return l;
  throw Error("unknown metal layer '" + std::string(name) + "'");
}

void validate(const DeviceParams& d, std::string_view role) {
  const std::string r(role);
  if (!(d.i_off_per_um > 0)) throw Error(r + ": off-current must be positive");
  if (!(d.i_on_per_um > d.i_off_per_um)) throw Error(r + ": on-current must exceed off-current");
  if (!(d.ss_mv_per_dec >= 60.0)) throw Error(r + ": subthreshold swing below 60 mV/dec");
  if (d.c_gate_per_um < 0 || d.c_parasitic_gs_per_um < 0 || d.c_parasitic_gd_per_um < 0)
    throw Error(r + ": capacitances must be non-negative");
  if (!(d.r_on_per_um > 0)) throw Error(r + ": on-resistance must be positive");
  if (!(d.alpha_power > 0) || !(d.overdrive_half > 0)) throw Error(r + ": alpha-power parameters must be positive");
}

void validate(const TechNode& t) {
  if (t.node_nm <= 0) throw Error("technology node must be positive");
  if (!(t.vdd > 0)) throw Error("Vdd must be positive");
  if (t.metal_layers.empty()) throw Error("at least one metal layer required");
  if (!(t.fin_pitch_nm > 0) || !(t.gate_pitch_nm > 0) || !(t.track_pitch_nm > 0))
    throw Error("all pitches must be positive");
  if (t.std_cell_height_tracks <= 0) throw Error("standard-cell height must be positive");
  validate(t.logic_n, "LogicN");
  validate(t.logic_p, "LogicP");
  validate(t.access_aos_write, "AOSWrite");
  validate(t.access_aos_read, "AOSRead");
}

TechNode tech_from_config(const ConfigDocument& doc) {
  TechNode t;
  t.source = doc.source;
  t.node_nm = static_cast<int>(doc.integer("TechnologyNode"));
  if (t.node_nm <= 0) doc.fail("TechnologyNode", "must be positive");
  try {
    t.device_class = device_class_from(doc.string("DeviceClass"));
    t.aos_class = device_class_from(doc.string_or("AOSDeviceClass", "BEOL_AOS_DG"));
  } catch (const Error& e) {
    doc.fail("DeviceClass", e.what());
  }
  t.vdd = positive(doc, "Vdd");
  t.reference_temperature_k = positive_or(doc, "ReferenceTemperature", 358.15);
  t.temperature_k = positive_or(doc, "Temperature", t.reference_temperature_k);
  t.leakage_activation_ev = doc.number_or("LeakageActivationEnergy", 0.3);
  t.fin_pitch_nm = positive(doc, "FinPitch");
  t.gate_pitch_nm = positive(doc, "GatePitch");
  t.track_pitch_nm = positive(doc, "TrackPitch");
  t.std_cell_height_tracks = static_cast<int>(doc.integer("StdCellHeightTracks"));
  if (t.std_cell_height_tracks <= 0) doc.fail("StdCellHeightTracks", "must be positive");

  const DeviceParams defaults;
  t.logic_n = device_from(doc, "LogicN", defaults);
  t.logic_p = device_from(doc, "LogicP", defaults);
  t.access_aos_write = device_from(doc, "AOSWrite", defaults);
  t.access_aos_read = device_from(doc, "AOSRead", defaults);

  for (const char* name : {"M1", "M4", "M7"}) t.metal_layers.push_back(layer_from(doc, name));

  t.miv.r_per_via = positive_or(doc, "MIVResistance", t.miv.r_per_via);
  t.miv.c_per_um_height = positive_or(doc, "MIVCapacitancePerUm", t.miv.c_per_um_height);
  t.miv.diameter_nm = positive_or(doc, "MIVDiameter", t.miv.diameter_nm);
  t.miv.pitch_nm = positive_or(doc, "MIVPitch", t.miv.pitch_nm);
  t.miv.tier_height_um = positive_or(doc, "TierHeight", t.miv.tier_height_um);

  auto& c = t.circuit;
  c.min_nmos_width_um = positive_or(doc, "MinNmosWidth", c.min_nmos_width_um);
  c.min_pmos_width_um = positive_or(doc, "MinPmosWidth", c.min_pmos_width_um);
  c.max_finger_width_um = positive_or(doc, "MaxFingerWidth", c.max_finger_width_um);
  c.input_slew_s = positive_or(doc, "InputSlew", c.input_slew_s);
  c.self_loading_gamma = doc.number_or("SelfLoadingRatio", c.self_loading_gamma);
  c.sense_voltage = positive_or(doc, "SenseVoltage", c.sense_voltage);
  c.sense_amp_devices = positive_or(doc, "SenseAmpDevices", c.sense_amp_devices);
  c.csa_area_factor = positive_or(doc, "CurrentSenseAmpAreaFactor", c.csa_area_factor);
  c.csa_leakage_factor = positive_or(doc, "CurrentSenseAmpLeakageFactor", c.csa_leakage_factor);
  c.csa_sense_time_factor = positive_or(doc, "CurrentSenseAmpTimeFactor", c.csa_sense_time_factor);
  c.level_shifter_width_factor = positive_or(doc, "LevelShifterWidthFactor", c.level_shifter_width_factor);
  c.level_shifter_area_factor = positive_or(doc, "LevelShifterAreaFactor", c.level_shifter_area_factor);
  c.tristate_area_factor = positive_or(doc, "TristateAreaFactor", c.tristate_area_factor);
  c.write_driver_strength = positive_or(doc, "WriteDriverStrength", c.write_driver_strength);
  c.sram_cell_leak_devices = positive_or(doc, "SRAMCellLeakDevices", c.sram_cell_leak_devices);
  c.dibl_v_per_v = doc.number_or("DIBL", c.dibl_v_per_v);
  if (c.dibl_v_per_v < 0) doc.fail("DIBL", "must be non-negative");
  c.driver_final_fanout = doc.number_or("DriverFinalFanout", c.driver_final_fanout);
  if (c.driver_final_fanout < 0) doc.fail("DriverFinalFanout", "must be non-negative");
  if (c.self_loading_gamma < 0) doc.fail("SelfLoadingRatio", "must be non-negative");

  validate(t);
  return t;
}

TechNode load_tech(std::string_view source) {
  std::string id(source);
  std::filesystem::path path;
  if (id == "7nm" || id == "7") {
    path = data_dir() / "tech" / "7nm.tech";
  } else if (id == "3nm" || id == "3") {
    path = data_dir() / "tech" / "3nm.tech";
  } else if (std::filesystem::exists(id)) {
    path = id;
  } else {
    throw Error("unknown technology node '" + id + "' (built-in: 7nm, 3nm)");
  }
  return tech_from_config(load_config(path));
}

DeviceParams at_temperature(const DeviceParams& d, const TechNode& tech) {
  DeviceParams out = d;
  const double t = tech.temperature_k;
  const double t0 = tech.reference_temperature_k;
  if (t == t0) return out;
  out.ss_mv_per_dec = d.ss_mv_per_dec * t / t0;
  out.i_off_per_um = d.i_off_per_um * std::exp(tech.leakage_activation_ev / kBoltzmannEv * (1.0 / t0 - 1.0 / t));
  return out;
}

WireRC wire_rc(const WireLayer& layer, double length_um) {
  if (length_um < 0) throw Error("wire length must be non-negative");
  return {layer.r_per_um * length_um, layer.c_per_um * length_um};
}

DeviceCaps device_caps(const DeviceParams& d, double width_um) {
  if (!(width_um > 0)) throw Error("device width must be positive");
  return {d.c_gate_per_um * width_um, d.c_parasitic_gs_per_um * width_um, d.c_parasitic_gd_per_um * width_um};
}

}  // namespace nscache
