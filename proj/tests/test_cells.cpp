#include <doctest.h>

#include <cmath>

#include "nscache/cells.hpp"

using namespace nscache;

namespace {

DeviceParams toy_device() {
  DeviceParams d;
  d.i_on_per_um = 1e-4;
  d.i_off_per_um = 1e-12;
  d.ss_mv_per_dec = 70;
  d.vth = 0.3;
  d.alpha_power = 1.3;
  d.overdrive_half = 0.3;
  return d;
}

}  // namespace

TEST_CASE("compact current asymptotes") {
  const DeviceParams d = toy_device();
  const double on = compact_current(d, d.vth + 2.0, 10.0, 1.0);
  CHECK(on <= d.i_on_per_um);
  CHECK(on >= 0.85 * d.i_on_per_um);
  CHECK(compact_current(d, d.vth + 2.0, 10.0, 2.0) == doctest::Approx(2 * on));
  // One swing of gate bias in subthreshold is one decade of current.
  const double i0 = compact_current(d, -0.2, 0.7), i1 = compact_current(d, -0.2 + 0.070, 0.7);
  CHECK(i1 / i0 == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(compact_current(d, 0.0, 0.0) == 0.0);
  CHECK(compact_current(d, 0.5, -0.3) < 0);
}

TEST_CASE("onoff_decades") {
  CHECK(onoff_decades(1.95, 65) == doctest::Approx(30.0));
  CHECK(onoff_decades(0, 65) == 0);
  CHECK(onoff_decades(0.6, 60) == doctest::Approx(10.0));
  CHECK_THROWS_AS(onoff_decades(1, 0), Error);
}

TEST_CASE("charge integral closed forms") {
  const auto c = [](double) { return 1e-15; };
  CHECK(charge_time(c, [](double) { return 1e-6; }, 0, 0.7) == doctest::Approx(0.7e-9).epsilon(1e-9));
  CHECK(charge_time(c, [](double) { return 1e-18; }, 0.7, 0.4) == doctest::Approx(300.0).epsilon(1e-9));
  // Linear in c, inverse in i.
  const auto half = [](double) { return 0.5e-15; };
  const auto ramp = [](double v) { return 1e-6 * (1 + v); };
  CHECK(charge_time(half, ramp, 0, 0.7) == doctest::Approx(0.5 * charge_time(c, ramp, 0, 0.7)).epsilon(1e-9));
  CHECK(charge_time(c, [](double) { return 1e-17; }, 0.4, 0.7) ==
        doctest::Approx(0.1 * charge_time(c, [](double) { return 1e-18; }, 0.4, 0.7)).epsilon(1e-9));
  CHECK_THROWS_AS(charge_time(c, [](double) { return 0.0; }, 0, 0.7), Error);
}

TEST_CASE("gain cell calibration anchors") {
  const TechNode t = load_tech("7nm");
  const CellModel gc = load_cell("gc2t_dg_7nm", t);
  CHECK(gc.area_um2 == 0.02052);
  CHECK(gc.v_boost == 1.2);
  CHECK(gc.v_hold == -0.75);
  const double ta = access_time(gc, default_levels(gc));
  const double tr = retention_time(gc, default_levels(gc));
  CHECK(ta == doctest::Approx(122e-12).epsilon(0.10));
  CHECK(tr == doctest::Approx(0.315).epsilon(0.15));
  CHECK(gc.retention_s == tr);
}

TEST_CASE("shipped cell areas") {
  const TechNode t7 = load_tech("7nm"), t3 = load_tech("3nm");
  CHECK(load_cell("sram_7nm", t7).area_um2 == 0.0276);
  CHECK(load_cell("sram_3nm", t3).area_um2 == 0.0199);
  CHECK(load_cell("edram_7nm", t7).area_um2 == 0.0116);
  CHECK(load_cell("sttmram_7nm", t7).area_um2 == 0.0138);
  CHECK(load_cell("gc2t_caa_3nm", t3).area_um2 == 0.013);
}

TEST_CASE("write device on/off between the two gate biases") {
  // A saturating device sits below the pure exponential bound; 8 decades is
  // the floor required for multi-hundred-ms retention at ~100 ps writes.
  for (auto [node, name] : {std::pair{"7nm", "gc2t_dg_7nm"}, std::pair{"3nm", "gc2t_caa_3nm"}}) {
    const TechNode t = load_tech(node);
    const CellModel c = load_cell(name, t);
    const double on = compact_current(c.write_device, c.v_boost, c.vdd);
    const double off = compact_current(c.write_device, c.v_hold, c.vdd);
    const double decades = std::log10(on / off);
    CHECK(decades <= onoff_decades(c.v_boost - c.v_hold, c.write_device.ss_mv_per_dec) + 1e-9);
    CHECK(decades >= 8.0);
  }
}

TEST_CASE("gain cell retains orders of magnitude longer than eDRAM") {
  const TechNode t = load_tech("7nm");
  CHECK(load_cell("gc2t_dg_7nm", t).retention_s >= 100 * load_cell("edram_7nm", t).retention_s);
}

TEST_CASE("monotone in device currents") {
  const TechNode t = load_tech("7nm");
  CellModel c = load_cell("gc2t_dg_7nm", t);
  const StoredLevelPair lv = default_levels(c);
  const double ta = access_time(c, lv), tr = retention_time(c, lv);
  CellModel leaky = c;
  leaky.write_device.i_off_per_um *= 3;
  CHECK(retention_time(leaky, lv) < tr);
  CellModel strong = c;
  strong.write_device.i_on_per_um *= 1.5;
  CHECK(access_time(strong, lv) < ta);
  CellModel small = c;
  small.c_sn *= 0.5;
  CHECK(access_time(small, lv) == doctest::Approx(0.5 * ta).epsilon(1e-5));
  CHECK(retention_time(small, lv) == doctest::Approx(0.5 * tr).epsilon(1e-5));
}

TEST_CASE("deterministic and typed") {
  const TechNode t = load_tech("7nm");
  const CellModel a = load_cell("gc2t_dg_7nm", t), b = load_cell("gc2t_dg_7nm", t);
  CHECK(access_time(a, default_levels(a)) == access_time(b, default_levels(b)));
  CHECK(retention_time(a, default_levels(a)) == retention_time(b, default_levels(b)));
  CHECK_THROWS_AS(access_time(load_cell("sram_7nm", t), {0.6, 0.4}), Error);
  CHECK(cell_write_time(load_cell("sttmram_7nm", t)) == doctest::Approx(4e-9));
  CHECK_THROWS_AS(load_cell("no_such_cell", t), Error);
}
