#include <doctest.h>

#include <cmath>

#include "nscache/m3d.hpp"

using namespace nscache;

TEST_CASE("folding halves the larger side") {
  const TierStack s = fold_array(100, 400, 2);
  CHECK(s.tier_w_um == doctest::Approx(100));
  CHECK(s.tier_h_um == doctest::Approx(100));
  CHECK(s.n_memory_tiers == 4);
  CHECK(s.folds_h == 2);
  const TierStack id = fold_array(30, 70, 0);
  CHECK(id.tier_w_um == 30);
  CHECK(id.tier_h_um == 70);
  CHECK(id.n_memory_tiers == 1);
  CHECK(fold_array(400, 100, 1).tier_w_um == doctest::Approx(200));
  CHECK(fold_array(100, 100, 1).tier_h_um == doctest::Approx(50));
  CHECK_THROWS_AS(fold_array(100, 400, 3), Error);
  CHECK_THROWS_AS(fold_array(0, 400, 1), Error);
}

TEST_CASE("odd cell counts are padded before a fold") {
  // 7 rows of 1 um cells: padded to 8, then 4 per tier.
  const TierStack s = fold_array(3, 7, 1, 0.2, 1, 1.0, 1.0);
  CHECK(s.tier_h_um == doctest::Approx(4));
  CHECK(s.tier_area_um2() * s.n_memory_tiers >= 3 * 7);
}

TEST_CASE("FEOL reshape") {
  FeolFrame f = reshape_feol(10000, 1.0, 80, 125);
  CHECK(f.w_um == doctest::Approx(100));
  CHECK(f.h_um == doctest::Approx(100));
  CHECK(f.xwl_extension_um == doctest::Approx(20));
  CHECK(f.xbl_extension_um == doctest::Approx(25));
  f = reshape_feol(10000, 4.0);
  CHECK(f.w_um == doctest::Approx(200));
  CHECK(f.h_um == doctest::Approx(50));
  f = reshape_feol(5000, 2.0, 100, 50);
  CHECK(f.xwl_extension_um == doctest::Approx(0).epsilon(1e-9));
  CHECK(f.xbl_extension_um == doctest::Approx(0).epsilon(1e-9));
  CHECK_THROWS_AS(reshape_feol(0, 1), Error);
}

TEST_CASE("MIV parasitics") {
  MIVParams p;
  const TierStack one = fold_array(10, 10, 0, p.tier_height_um);
  MIVParasitics m = miv_parasitics(one, p, 1);
  CHECK(m.r == doctest::Approx(p.r_per_via));
  CHECK(m.c == doctest::Approx(p.c_per_um_height * p.tier_height_um));
  CHECK(m.area_um2 == doctest::Approx(p.pitch_nm * p.pitch_nm * 1e-6));
  const TierStack four = fold_array(10, 10, 2, p.tier_height_um);
  CHECK(miv_parasitics(four, p, 1).c == doctest::Approx(4 * p.tier_height_um * p.c_per_um_height));
  m = miv_parasitics(four, p, 0);
  CHECK(m.r == 0);
  CHECK(m.c == 0);
  CHECK(m.area_um2 == 0);
}

TEST_CASE("stacking never grows the footprint") {
  const TechNode t = load_tech("7nm");
  MatDesign d;
  d.cell = load_cell("gc2t_dg_7nm", t);
  d.tech = &t;
  d.n_rows = 128;
  d.n_cols = 512;
  const MatPPA planar = build_mat(d);
  const MatPPA f0 = assemble_m3d_mat(d, 0), f1 = assemble_m3d_mat(d, 1), f2 = assemble_m3d_mat(d, 2);
  // Equal areas may differ in the last bit after the frame is reshaped.
  const double eps = 1 + 1e-12;
  CHECK(f0.footprint_um2() <= planar.footprint_um2() * eps);
  CHECK(f1.footprint_um2() <= f0.footprint_um2() * eps);
  CHECK(f2.footprint_um2() <= f1.footprint_um2() * eps);
  CHECK(f0.tiers == 1);
  CHECK(f1.tiers == 2);
  CHECK(f2.tiers == 4);
  const double a0 = f0.array_width_um * f0.array_height_um;
  const double cw = d.cell.width_um(), ch = d.cell.height_um();
  for (const MatPPA* m : {&f1, &f2}) {
    const double total = m->array_width_um * m->array_height_um * m->tiers;
    CHECK(total >= a0 * (1 - 1e-9));
    CHECK(total <= a0 + m->tiers * (m->array_width_um * ch + m->array_height_um * cw) + 1e-9);
  }
}

TEST_CASE("footprint is non-increasing in folds across mat shapes") {
  const TechNode t = load_tech("7nm");
  for (const char* cell : {"gc2t_dg_7nm"}) {
    for (int rows : {32, 64, 128, 256, 512}) {
      for (int cols : {32, 64, 128, 256, 512, 1024}) {
        MatDesign d;
        d.cell = load_cell(cell, t);
        d.tech = &t;
        d.n_rows = rows;
        d.n_cols = cols;
        double prev = build_mat(d).footprint_um2();
        double density_prev = 0;
        for (int k = 0; k <= 2; ++k) {
          const MatPPA m = assemble_m3d_mat(d, k);
          CAPTURE(rows);
          CAPTURE(cols);
          CAPTURE(k);
          CHECK(m.footprint_um2() <= prev * (1 + 1e-12));
          const double density = static_cast<double>(rows) * cols / m.footprint_um2();
          CHECK(density >= density_prev * (1 - 1e-12));
          prev = m.footprint_um2();
          density_prev = density;
        }
      }
    }
  }
}

TEST_CASE("M3D assembly needs a BEOL cell") {
  const TechNode t = load_tech("7nm");
  MatDesign d;
  d.cell = load_cell("sram_7nm", t);
  d.tech = &t;
  CHECK_THROWS_AS(assemble_m3d_mat(d, 1), Error);
}
