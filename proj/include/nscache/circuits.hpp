#pragma once

#include <string_view>
#include <vector>

#include "nscache/tech.hpp"

namespace nscache {

struct PeripheralPPA {
  double area_um2 = 0;
  double delay_s = 0;
  double dynamic_energy_j = 0;  // per activation
  double leakage_w = 0;

  PeripheralPPA& operator+=(const PeripheralPPA& o);  // areas, energies, leakage and delays all add
  PeripheralPPA scaled(double n) const;               // n copies in parallel: delay unchanged
};

// Stage sizes are input capacitances in units of c_in.
struct BufferChain {
  int n_stages = 1;
  std::vector<double> sizes{1.0};
  double c_in = 0;
  double c_load = 0;
  double gamma = 0;
};

struct RCSegment {
  double r = 0;
  double c = 0;
};

struct RCLadder {
  std::vector<RCSegment> segments;  // from the driver outward
  double driver_r = 0;
  double load_c = 0;
};

// Delay of an N-stage chain under the self-loading model N*(gamma + F^(1/N)),
// in units of the unloaded inverter delay.
double chain_delay_model(double f, double gamma, int n);
int optimal_stage_count(double f, double gamma);

BufferChain size_chain(double c_in, double c_load, int n, double gamma = 0);

// Input capacitance of a minimum inverter.
double min_inverter_cap(const TechNode& tech);
// Layout footprint of an inverter whose input capacitance is `size` minimum
// inverters (folded into fingers that fit the standard-cell row).
double inverter_area_um2(const TechNode& tech, double size);
double inverter_leakage_w(const TechNode& tech, double size, double supply);

// Fixed-slew Horowitz step delay of one inverter stage of relative `size`
// driving `c_next` farads.
double stage_delay(const TechNode& tech, double size, double c_next);

PeripheralPPA chain_metrics(const BufferChain& chain, const TechNode& tech, double supply = 0);
// Minimum-delay chain from a minimum inverter to `c_load`, with equal effort
// per stage and a stage count in [min_stages, max_stages].
BufferChain latency_chain(const TechNode& tech, double c_load, int max_stages = 10, int min_stages = 1);

// First moment of the step response at the far end (no 50% scaling; it is an
// upper bound on the 50% delay of any RC ladder).
double elmore_delay(const RCLadder& ladder);

// Distributed line of `n` equal pi-segments.
RCLadder distributed_line(double r_total, double c_total, int n, double driver_r = 0, double load_c = 0);

struct RepeatedWire {
  PeripheralPPA ppa;
  int segments = 0;         // repeater count; 0 = bare wire driven by a minimum inverter
  double repeater_size = 0; // in minimum inverters
};

// Uniformly repeated wire; `forced_segments` >= 0 pins the repeater count.
RepeatedWire repeated_wire(const WireLayer& layer, double length_um, const TechNode& tech, int forced_segments = -1);

enum class PeripheralKind {
  RowDecoder,
  TristateWLDriver,
  LevelShifter,
  SenseAmpVoltage,
  SenseAmpCurrent,
  PrechargerWriteDriver,
  Comparator,
  OneHotEncoder,
  Mux,
};

std::string_view to_string(PeripheralKind k);

struct PeripheralParams {
  int fan_in = 1;         // address bits, compared bits, mux ways, encoded ways
  int count = 1;          // outputs / instances
  double c_load = 0;      // F per output; 0 means one minimum inverter
  double v_high = 0;      // upper rail; 0 means vdd
  double v_low = 0;       // lower rail (level shifters)
  int max_stages = 10;    // driver chain cap
};

struct PeripheralResult {
  PeripheralPPA ppa;
  int chain_stages = 0;  // stages in the output driver chain, where one exists
};

PeripheralResult peripheral_ppa(PeripheralKind kind, const PeripheralParams& params, const TechNode& tech);

}  // namespace nscache
