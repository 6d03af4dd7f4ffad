#include "nscache/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nscache {

PeripheralPPA& PeripheralPPA::operator+=(const PeripheralPPA& o) {
  area_um2 += o.area_um2;
  delay_s += o.delay_s;
  dynamic_energy_j += o.dynamic_energy_j;
  leakage_w += o.leakage_w;
  return *this;
}

PeripheralPPA PeripheralPPA::scaled(double n) const {
  return {area_um2 * n, delay_s, dynamic_energy_j * n, leakage_w * n};
}

double chain_delay_model(double f, double gamma, int n) { return n * (gamma + std::pow(f, 1.0 / n)); }

int optimal_stage_count(double f, double gamma) {
  if (!(f >= 1.0)) throw Error("effective fanout must be at least 1");
  if (gamma < 0) throw Error("self-loading ratio must be non-negative");
  const double lnf = std::log(f);
  if (gamma == 0) return std::max(1, static_cast<int>(std::lround(lnf)));
  if (lnf == 0) return 1;
  // d/dN [N (gamma + F^(1/N))] = gamma + F^(1/N) (1 - ln F / N)
  auto slope = [&](double n) {
    const double x = lnf / n;
    return gamma + std::exp(x) * (1.0 - x);
  };
  double lo = lnf / 50.0, hi = lnf + 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0 ? lo : hi) = mid;
  }
  const int below = std::max(1, static_cast<int>(std::floor(lo)));
  const int above = std::max(1, static_cast<int>(std::ceil(lo)));
  return chain_delay_model(f, gamma, above) < chain_delay_model(f, gamma, below) ? above : below;
}

BufferChain size_chain(double c_in, double c_load, int n, double gamma) {
  if (!(c_in > 0)) throw Error("chain input capacitance must be positive");
  if (n < 1) throw Error("chain needs at least one stage");
  BufferChain chain;
  chain.c_in = c_in;
  chain.c_load = c_load;
  chain.gamma = gamma;
  if (c_load < c_in || n == 1) {
    chain.n_stages = 1;
    chain.sizes = {1.0};
    return chain;
  }
  chain.n_stages = n;
  chain.sizes.resize(n);
  const double ratio = c_load / c_in;
  for (int k = 0; k < n; ++k) chain.sizes[k] = std::pow(ratio, static_cast<double>(k) / (n - 1));
  chain.sizes.back() = ratio;
  return chain;
}

double min_inverter_cap(const TechNode& tech) {
  return tech.logic_n.c_gate_per_um * tech.circuit.min_nmos_width_um +
         tech.logic_p.c_gate_per_um * tech.circuit.min_pmos_width_um;
}

double inverter_area_um2(const TechNode& tech, double size) {
  const auto& c = tech.circuit;
  const double fingers = std::max({1.0, std::ceil(size * c.min_nmos_width_um / c.max_finger_width_um - 1e-9),
                                   std::ceil(size * c.min_pmos_width_um / c.max_finger_width_um - 1e-9)});
  return (fingers + 1.0) * tech.gate_pitch_um() * tech.std_cell_height_um();
}

double inverter_leakage_w(const TechNode& tech, double size, double supply) {
  const DeviceParams n = at_temperature(tech.logic_n, tech);
  const DeviceParams p = at_temperature(tech.logic_p, tech);
  const auto& c = tech.circuit;
  // Drains biased above Vdd (boosted rails) lower the off device's barrier.
  const double over = std::max(0.0, supply - tech.vdd) * c.dibl_v_per_v * 1e3;
  const double kn = std::pow(10.0, over / n.ss_mv_per_dec);
  const double kp = std::pow(10.0, over / p.ss_mv_per_dec);
  // One of the two devices is off in either state.
  return 0.5 * size * (kn * n.i_off_per_um * c.min_nmos_width_um + kp * p.i_off_per_um * c.min_pmos_width_um) * supply;
}

namespace {

double drive_resistance(const TechNode& tech, double size) {
  const auto& c = tech.circuit;
  const double rn = tech.logic_n.r_on_per_um / (size * c.min_nmos_width_um);
  const double rp = tech.logic_p.r_on_per_um / (size * c.min_pmos_width_um);
  return 0.5 * (rn + rp);
}

double horowitz(double tau, double input_slew) {
  if (tau <= 0) return 0;
  constexpr double kVs = 0.5;
  constexpr double kB = 0.5;
  const double a = input_slew / tau;
  const double ln_vs = std::log(kVs);
  return tau * std::sqrt(ln_vs * ln_vs + 2.0 * a * kB * (1.0 - kVs));
}

}  // namespace

double stage_delay(const TechNode& tech, double size, double c_next) {
  const double c_self = tech.circuit.self_loading_gamma * size * min_inverter_cap(tech);
  return horowitz(drive_resistance(tech, size) * (c_self + c_next), tech.circuit.input_slew_s);
}

PeripheralPPA chain_metrics(const BufferChain& chain, const TechNode& tech, double supply) {
  const double v = supply > 0 ? supply : tech.vdd;
  const double c_min = min_inverter_cap(tech);
  const double c_in = chain.c_in > 0 ? chain.c_in : c_min;
  const double gamma = tech.circuit.self_loading_gamma;
  PeripheralPPA out;
  const int n = static_cast<int>(chain.sizes.size());
  for (int k = 0; k < n; ++k) {
    const double m = chain.sizes[k] * c_in / c_min;
    const double c_next = k + 1 < n ? chain.sizes[k + 1] * c_in : chain.c_load;
    out.delay_s += stage_delay(tech, m, c_next);
    out.dynamic_energy_j += (c_next + gamma * m * c_min) * v * v;
    out.leakage_w += inverter_leakage_w(tech, m, v);
    out.area_um2 += inverter_area_um2(tech, m);
  }
  return out;
}

namespace {

BufferChain standard_chain(const TechNode& tech, double c_load, int n) {
  const double c_min = min_inverter_cap(tech);
  const double f = std::max(1.0, c_load / c_min);
  // Equal effort F^(1/N) per stage, the last stage included.
  double last_in = std::pow(f, static_cast<double>(n - 1) / n);
  // A floor on the last-stage fanout trades some delay for a much smaller
  // output device; the earlier stages taper toward the reduced input.
  const double phi = tech.circuit.driver_final_fanout;
  if (n > 1 && phi > 0 && f / last_in < phi) last_in = std::max(1.0, f / phi);
  BufferChain chain = size_chain(c_min, c_min * last_in, n, tech.circuit.self_loading_gamma);
  if (chain.n_stages != n) {  // degenerate ratio collapses to one stage; keep the count
    chain.n_stages = n;
    chain.sizes.assign(n, 1.0);
  }
  chain.c_load = c_load;
  return chain;
}

}  // namespace

BufferChain latency_chain(const TechNode& tech, double c_load, int max_stages, int min_stages) {
  if (max_stages < 1) throw Error("driver chain needs at least one stage");
  min_stages = std::clamp(min_stages, 1, max_stages);
  const double c_min = min_inverter_cap(tech);
  const double f = std::max(1.0, c_load / c_min);
  const int guess = std::clamp(optimal_stage_count(f, tech.circuit.self_loading_gamma), min_stages, max_stages);
  BufferChain best;
  double best_delay = std::numeric_limits<double>::infinity();
  for (int n = std::max(min_stages, guess - 1); n <= std::min(max_stages, guess + 1); ++n) {
    BufferChain c = standard_chain(tech, c_load, n);
    const double d = chain_metrics(c, tech).delay_s;
    if (d < best_delay) {
      best_delay = d;
      best = c;
    }
  }
  return best;
}

double elmore_delay(const RCLadder& ladder) {
  double downstream = ladder.load_c;
  for (const auto& s : ladder.segments) downstream += s.c;
  double delay = ladder.driver_r * downstream;
  for (const auto& s : ladder.segments) {
    downstream -= s.c;
    delay += s.r * (0.5 * s.c + downstream);
  }
  return delay;
}

RCLadder distributed_line(double r_total, double c_total, int n, double driver_r, double load_c) {
  RCLadder l;
  l.driver_r = driver_r;
  l.load_c = load_c;
  n = std::max(1, n);
  l.segments.assign(n, RCSegment{r_total / n, c_total / n});
  return l;
}

RepeatedWire repeated_wire(const WireLayer& layer, double length_um, const TechNode& tech, int forced_segments) {
  if (length_um < 0) throw Error("wire length must be non-negative");
  RepeatedWire out;
  if (length_um == 0) return out;
  const WireRC w = wire_rc(layer, length_um);
  const double c0 = min_inverter_cap(tech);
  const double r0 = drive_resistance(tech, 1.0);
  const double cp = tech.circuit.self_loading_gamma * c0;
  const double v = tech.vdd;

  if (forced_segments == 0) {
    out.ppa.delay_s = stage_delay(tech, 1.0, w.capacitance) + 0.5 * w.resistance * w.capacitance;
    out.ppa.dynamic_energy_j = w.capacitance * v * v;
    return out;
  }

  const double h = std::max(1.0, std::sqrt(r0 * layer.c_per_um / (layer.r_per_um * c0)));
  int k = forced_segments;
  if (k < 0) {
    const double l_opt = std::sqrt(2.0 * r0 * (c0 + cp) / (layer.r_per_um * layer.c_per_um));
    k = std::max(1, static_cast<int>(std::lround(length_um / l_opt)));
  }
  const double r_seg = w.resistance / k;
  const double c_seg = w.capacitance / k;
  const double seg_delay = stage_delay(tech, h, c_seg + h * c0) + r_seg * (0.5 * c_seg + h * c0);
  out.segments = k;
  out.repeater_size = h;
  out.ppa.delay_s = k * seg_delay;
  out.ppa.dynamic_energy_j = (w.capacitance + k * h * (c0 + cp)) * v * v;
  out.ppa.area_um2 = k * inverter_area_um2(tech, h);
  out.ppa.leakage_w = k * inverter_leakage_w(tech, h, v);
  return out;
}

std::string_view to_string(PeripheralKind k) {
  switch (k) {
    case PeripheralKind::RowDecoder: return "row_decoder";
    case PeripheralKind::TristateWLDriver: return "tristate_wl_driver";
    case PeripheralKind::LevelShifter: return "level_shifter";
    case PeripheralKind::SenseAmpVoltage: return "sense_amp_voltage";
    case PeripheralKind::SenseAmpCurrent: return "sense_amp_current";
    case PeripheralKind::PrechargerWriteDriver: return "precharger_write_driver";
    case PeripheralKind::Comparator: return "comparator";
    case PeripheralKind::OneHotEncoder: return "onehot_encoder";
    case PeripheralKind::Mux: return "mux";
  }
  return "?";
}

namespace {

int ceil_log2(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

PeripheralResult voltage_sense_amp(const PeripheralParams& p, const TechNode& tech, double load, double v) {
  const auto& cc = tech.circuit;
  const double c_min = min_inverter_cap(tech);
  const double pairs = cc.sense_amp_devices / 2.0;
  PeripheralPPA one;
  one.area_um2 = pairs * inverter_area_um2(tech, 1.0);
  one.leakage_w = pairs * inverter_leakage_w(tech, 1.0, v);
  const double tau = stage_delay(tech, 2.0, 2.0 * c_min);
  one.delay_s = tau * std::log(v / cc.sense_voltage) + stage_delay(tech, 2.0, load);
  one.dynamic_energy_j = (pairs * c_min + load) * v * v;
  return {one.scaled(p.count), 0};
}

}  // namespace

PeripheralResult peripheral_ppa(PeripheralKind kind, const PeripheralParams& p, const TechNode& tech) {
  if (p.fan_in < 1 || p.count < 1) throw Error(std::string(to_string(kind)) + ": fan-in and count must be >= 1");
  if (p.c_load < 0) throw Error(std::string(to_string(kind)) + ": negative load");
  const double c_min = min_inverter_cap(tech);
  const double load = p.c_load > 0 ? p.c_load : c_min;
  const double v = p.v_high > 0 ? p.v_high : tech.vdd;
  const double count = p.count;

  switch (kind) {
    case PeripheralKind::RowDecoder: {
      const int levels = p.fan_in <= 1 ? 0 : ceil_log2(p.fan_in);
      // The AND tree adds delay ahead of the driver; it does not enlarge it.
      const BufferChain chain = latency_chain(tech, load, p.max_stages, 2);
      PeripheralPPA one = chain_metrics(chain, tech, v);
      const double nand_delay = stage_delay(tech, 1.0, 2.0 * c_min) * 4.0 / 3.0;
      one.delay_s += levels * nand_delay;
      one.area_um2 += levels * 2.0 * inverter_area_um2(tech, 1.0);
      one.leakage_w += levels * inverter_leakage_w(tech, 1.0, v);
      one.dynamic_energy_j += levels * 2.0 * c_min * v * v;
      PeripheralPPA all = one.scaled(count);
      all.dynamic_energy_j = one.dynamic_energy_j;
      if (p.count > 1) all.dynamic_energy_j += 0.5 * p.fan_in * (0.5 * count * c_min) * v * v;
      return {all, chain.n_stages};
    }
    case PeripheralKind::TristateWLDriver: {
      const BufferChain chain = latency_chain(tech, load, p.max_stages);
      PeripheralPPA one = chain_metrics(chain, tech, v);
      const double last = chain.sizes.back() * chain.c_in / c_min;
      one.area_um2 += (tech.circuit.tristate_area_factor - 1.0) * inverter_area_um2(tech, last);
      one.leakage_w += 0.5 * inverter_leakage_w(tech, last, v);
      one.delay_s += stage_delay(tech, last, load) - stage_delay(tech, last, 0.0);
      PeripheralPPA all = one.scaled(count);
      all.dynamic_energy_j = one.dynamic_energy_j;
      return {all, chain.n_stages};
    }
    case PeripheralKind::LevelShifter: {
      const double swing = v - p.v_low;
      if (!(swing > 0)) throw Error("level_shifter: upper rail must exceed lower rail");
      const auto& cc = tech.circuit;
      const double wf = cc.level_shifter_width_factor;
      const double c_pair = 2.0 * wf * c_min;  // four devices at wf x minimum width
      PeripheralPPA core;
      core.area_um2 = 2.0 * inverter_area_um2(tech, wf) * cc.level_shifter_area_factor;
      core.leakage_w = 2.0 * inverter_leakage_w(tech, wf, swing);
      core.delay_s = 3.0 * stage_delay(tech, wf, c_pair);
      core.dynamic_energy_j = c_pair * (v * v + p.v_low * p.v_low);
      const BufferChain chain = latency_chain(tech, load, std::min(10, p.max_stages));
      PeripheralPPA out = chain_metrics(chain, tech, swing);
      const double c_switched = out.dynamic_energy_j / (swing * swing);
      out.dynamic_energy_j = c_switched * (v * v + p.v_low * p.v_low);
      out += core;
      PeripheralPPA all = out.scaled(count);
      all.dynamic_energy_j = out.dynamic_energy_j;
      return {all, chain.n_stages};
    }
    case PeripheralKind::SenseAmpVoltage:
      return voltage_sense_amp(p, tech, load, v);
    case PeripheralKind::SenseAmpCurrent: {
      PeripheralResult r = voltage_sense_amp(p, tech, load, v);
      const auto& cc = tech.circuit;
      r.ppa.area_um2 *= cc.csa_area_factor;
      r.ppa.leakage_w *= cc.csa_leakage_factor;
      r.ppa.delay_s *= cc.csa_sense_time_factor;
      r.ppa.dynamic_energy_j *= cc.csa_sense_time_factor;
      return r;
    }
    case PeripheralKind::PrechargerWriteDriver: {
      const auto& cc = tech.circuit;
      const BufferChain chain = latency_chain(tech, load * cc.write_driver_strength, p.max_stages);
      BufferChain driven = chain;
      driven.c_load = load;
      PeripheralPPA one = chain_metrics(driven, tech, v);
      const double pre = std::max(1.0, load / (8.0 * c_min));
      one.area_um2 += 0.5 * inverter_area_um2(tech, pre);
      one.leakage_w += 0.5 * inverter_leakage_w(tech, pre, v);
      one.dynamic_energy_j += pre * c_min * v * v;
      return {one.scaled(count), chain.n_stages};
    }
    case PeripheralKind::Comparator: {
      const int bits = p.fan_in;
      const int levels = ceil_log2(bits);
      PeripheralPPA one;
      one.area_um2 = bits * 3.0 * inverter_area_um2(tech, 1.0) + levels * 2.0 * inverter_area_um2(tech, 1.0);
      one.leakage_w = bits * 3.0 * inverter_leakage_w(tech, 1.0, v) + levels * inverter_leakage_w(tech, 1.0, v);
      one.delay_s = (1 + levels) * stage_delay(tech, 1.0, 2.0 * c_min) * 4.0 / 3.0;
      one.dynamic_energy_j = (bits * 3.0 + levels * 2.0) * c_min * v * v * 0.5;
      const BufferChain chain = latency_chain(tech, load, p.max_stages);
      one += chain_metrics(chain, tech, v);
      return {one.scaled(count), chain.n_stages};
    }
    case PeripheralKind::OneHotEncoder: {
      const int ways = p.fan_in;
      const int levels = std::max(1, ceil_log2(ways));
      const BufferChain chain = latency_chain(tech, load, p.max_stages);
      const PeripheralPPA drv = chain_metrics(chain, tech, v);
      PeripheralPPA one;
      one.area_um2 = ways * (levels * inverter_area_um2(tech, 1.0) + drv.area_um2);
      one.leakage_w = ways * (levels * inverter_leakage_w(tech, 1.0, v) + drv.leakage_w);
      one.delay_s = levels * stage_delay(tech, 1.0, 2.0 * c_min) * 4.0 / 3.0 + drv.delay_s;
      one.dynamic_energy_j = levels * 2.0 * c_min * v * v + drv.dynamic_energy_j;
      return {one.scaled(count), chain.n_stages};
    }
    case PeripheralKind::Mux: {
      const int ways = p.fan_in;
      if (ways == 1) return {};
      const DeviceParams n = tech.logic_n;
      const double c_diff = (n.c_parasitic_gd_per_um + n.c_parasitic_gs_per_um) * tech.circuit.min_nmos_width_um;
      PeripheralPPA one;
      one.area_um2 = ways * inverter_area_um2(tech, 1.0);
      one.leakage_w = 0.5 * ways * inverter_leakage_w(tech, 1.0, v);
      const double c_node = ways * c_diff + load;
      one.delay_s = horowitz(drive_resistance(tech, 1.0) * c_node, tech.circuit.input_slew_s);
      one.dynamic_energy_j = c_node * v * v;
      return {one.scaled(count), 0};
    }
  }
  throw Error("unsupported peripheral kind");
}

}  // namespace nscache
