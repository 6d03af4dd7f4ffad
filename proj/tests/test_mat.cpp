#include <doctest.h>

#include "nscache/mat.hpp"

using namespace nscache;

namespace {

struct Fixture {
  TechNode t7 = load_tech("7nm");

  MatDesign design(const char* cell, int rows, int cols) const {
    MatDesign d;
    d.cell = load_cell(cell, t7);
    d.tech = &t7;
    d.n_rows = rows;
    d.n_cols = cols;
    return d;
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "SRAM mat leakage is dominated by cells") {
  const MatPPA m = build_mat(design("sram_7nm", 256, 256));
  const double frac = m.cell_leakage_w / m.leakage_w;
  CHECK(frac >= 0.80);
  CHECK(frac <= 0.92);
}

TEST_CASE_FIXTURE(Fixture, "gain-cell mat leaks through its periphery") {
  MatDesign d = design("gc2t_dg_7nm", 128, 512);
  d.cell.write_device.i_off_per_um = 0;
  d.cell.read_device.i_off_per_um = 0;
  const MatPPA m = build_mat(d);
  CHECK(m.cell_leakage_w == 0);
  CHECK(m.leakage_w > 0);
}

TEST_CASE_FIXTURE(Fixture, "geometry limits") {
  CHECK_THROWS_AS(build_mat(design("sram_7nm", 1, 1)), Error);
  CHECK_THROWS_AS(build_mat(design("sram_7nm", 2048, 256)), Error);
  CHECK_THROWS_AS(build_mat(design("sram_7nm", 96, 256)), Error);
  MatDesign gc = design("gc2t_dg_7nm", 128, 512);
  gc.sa_mux = 2;
  CHECK_THROWS_AS(build_mat(gc), Error);
}

TEST_CASE_FIXTURE(Fixture, "refresh interval per row") {
  MatPPA m;
  m.refresh = {true, 0.315, 128};
  RefreshParams r = refresh_params(m, 1.0);
  CHECK(r.interval_per_row_s == doctest::Approx(2.4609375e-3));
  CHECK(r.rows == 128);
  CHECK(refresh_params(m, 0.5).interval_per_row_s == doctest::Approx(0.5 * r.interval_per_row_s));
  m.refresh = {true, 170e-6, 128};
  CHECK(refresh_params(m, 1.0).interval_per_row_s == doctest::Approx(1.328125e-6));
  m.refresh.needs = false;
  CHECK_THROWS_AS(refresh_params(m, 1.0), Error);
  const MatPPA gc = build_mat(design("gc2t_dg_7nm", 128, 512));
  CHECK(gc.refresh.needs);
  CHECK(gc.refresh.t_retention_s == load_cell("gc2t_dg_7nm", t7).retention_s);
  CHECK_FALSE(build_mat(design("sram_7nm", 256, 256)).refresh.needs);
}

TEST_CASE_FIXTURE(Fixture, "latency grows with line length") {
  for (const char* cell : {"sram_7nm", "edram_7nm", "gc2t_dg_7nm", "sttmram_7nm"}) {
    INFO(cell);
    for (int cols : {64, 256}) {
      double prev_r = 0, prev_w = 0;
      for (int rows : {32, 64, 128}) {
        const MatPPA m = build_mat(design(cell, rows, cols));
        CHECK(m.t_read_s >= prev_r);
        CHECK(m.t_write_s >= prev_w);
        prev_r = m.t_read_s;
        prev_w = m.t_write_s;
      }
    }
    for (int rows : {32, 128}) {
      double prev_r = 0, prev_w = 0;
      for (int cols : {32, 128, 512}) {
        const MatPPA m = build_mat(design(cell, rows, cols));
        CHECK(m.t_read_s >= prev_r);
        CHECK(m.t_write_s >= prev_w);
        prev_r = m.t_read_s;
        prev_w = m.t_write_s;
      }
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "cells never shrink below their footprint") {
  for (const char* cell : {"sram_7nm", "edram_7nm", "gc2t_dg_7nm", "sttmram_7nm"}) {
    for (int rows : {32, 256}) {
      for (int cols : {64, 512}) {
        const MatDesign d = design(cell, rows, cols);
        const MatPPA m = build_mat(d);
        CHECK(m.area_feol_um2 + m.area_beol_um2 >= d.cell.area_um2 * rows * cols);
      }
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "read energy carries a restore only for destructive reads") {
  MatDesign e = design("edram_7nm", 256, 256);
  const MatPPA destructive = build_mat(e);
  e.cell.destructive_read = false;
  const MatPPA kept = build_mat(e);
  CHECK(destructive.timing.t_restore > 0);
  CHECK(destructive.e_read_j > kept.e_read_j);
  CHECK(kept.timing.t_restore == 0);
  const MatPPA gc = build_mat(design("gc2t_dg_7nm", 128, 512));
  CHECK(gc.timing.t_restore == 0);
  for (const auto& c : gc.components)
    if (c.name == "wbl_write_driver") CHECK(c.e_read_j == 0);
}

TEST_CASE_FIXTURE(Fixture, "boost-rail energy follows C V^2") {
  MatDesign d = design("gc2t_dg_7nm", 128, 512);
  const MatPPA a = build_mat(d);
  d.cell.v_boost *= 2;
  const MatPPA b = build_mat(d);
  CHECK(a.e_write_boost_j > 0);
  CHECK(b.e_write_boost_j == doctest::Approx(4 * a.e_write_boost_j).epsilon(1e-9));
  CHECK(b.e_write_j - b.e_write_boost_j == doctest::Approx(a.e_write_j - a.e_write_boost_j).epsilon(1e-9));
}

TEST_CASE_FIXTURE(Fixture, "pure and repeatable") {
  const MatDesign d = design("gc2t_dg_7nm", 128, 512);
  const MatPPA a = build_mat(d), b = build_mat(d);
  CHECK(a.t_read_s == b.t_read_s);
  CHECK(a.e_read_j == b.e_read_j);
  CHECK(a.leakage_w == b.leakage_w);
  CHECK(physical_columns(64, 17.0 / 64) == 81);
}
