#include <doctest.h>

#include <algorithm>

#include "nscache/run.hpp"

using namespace nscache;

namespace {

RunConfig cfg(const char* name) { return load_run_config(data_dir() / "configs" / (std::string(name) + ".cfg")); }

double density_bits_per_mm2(const BankPPA& b) { return static_cast<double>(b.org.capacity_bytes) * 8 / b.area_mm2; }

}  // namespace

TEST_CASE("a fully pinned organization yields one candidate") {
  const RunConfig rc = cfg("sram64mb_7nm");
  SearchSpec s = search_spec(rc);
  const BankOrg& o = rc.org;
  s.bounds.mat_rows = Pow2Range::pin(o.mat_rows);
  s.bounds.mat_cols = Pow2Range::pin(o.mat_cols);
  s.bounds.bl_mux = Pow2Range::pin(o.bl_mux);
  s.bounds.folds_lo = s.bounds.folds_hi = 0;
  s.bounds.active = SearchBounds::Active::Minimal;
  const auto c = enumerate_candidates(s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].mat_rows == o.mat_rows);
  CHECK(c[0].mat_cols == o.mat_cols);
  // Every enumerated organization stores the requested capacity.
  const RunConfig wide_rc = cfg("sram64mb_7nm_search");
  const SearchSpec wide = search_spec(wide_rc);
  for (const BankOrg& x : enumerate_candidates(wide)) {
    const std::int64_t bits = std::int64_t{x.n_sr} * x.n_sc * x.mats_r * x.mats_c * x.mat_rows * x.mat_cols * x.slices;
    CHECK(bits == x.capacity_bytes * 8);
  }
}

TEST_CASE("empty bounds are an error") {
  const RunConfig rc = cfg("sram64mb_7nm_search");
  SearchSpec s = search_spec(rc);
  s.bounds.mat_rows = {2048, 4096};
  CHECK_THROWS_AS(enumerate_candidates(s), Error);
  s = search_spec(rc);
  s.max_area_mm2 = 0.01;
  CHECK_THROWS_AS(search_serial(s), Error);
}

TEST_CASE("parallel and serial search agree and rank soundly") {
  for (const char* name : {"sram64mb_7nm_search", "gc2t128mb_7nm_search"}) {
    INFO(std::string(name));
    const RunConfig rc = cfg(name);  // owns the tech the spec points at
    SearchSpec s = search_spec(rc);
    s.max_latency_s = 5e-9;
    const SearchResult p = search(s), q = search_serial(s);
    REQUIRE(p.ranked.size() == q.ranked.size());
    CHECK(p.n_candidates == q.n_candidates);
    CHECK(p.n_feasible == q.n_feasible);
    for (std::size_t i = 0; i < p.ranked.size(); ++i) {
      CHECK(p.ranked[i].org == q.ranked[i].org);
      CHECK(p.ranked[i].objective_value == q.ranked[i].objective_value);
      CHECK(p.ranked[i].rank == static_cast<int>(i) + 1);
    }
    REQUIRE(!p.ranked.empty());
    // Rank 1 beats every feasible candidate in the log.
    double best = p.ranked[0].objective_value;
    int feasible = 0;
    for (const CandidateResult& c : p.log) {
      if (!c.feasible) continue;
      ++feasible;
      CHECK(c.objective_value >= best);
      CHECK(c.ppa.t_hit_s <= 5e-9);
      CHECK(c.ppa.t_write_s <= 5e-9);
    }
    CHECK(feasible == p.n_feasible);
    for (std::size_t i = 1; i < p.ranked.size(); ++i)
      CHECK(p.ranked[i - 1].objective_value <= p.ranked[i].objective_value);
    // Rerunning gives the same answer.
    const SearchResult r = search(s);
    CHECK(r.ranked[0].org == p.ranked[0].org);
  }
}

TEST_CASE("stacking four tiers more than doubles density at equal organization") {
  RunConfig rc = cfg("gc2t256mb_7nm_4tier");
  const BankPPA four = model_design(rc);
  rc.org.folds = 0;
  const BankPPA one = model_design(rc);
  CHECK(density_bits_per_mm2(four) >= 1.5 * density_bits_per_mm2(one));
}

TEST_CASE("comparisons") {
  const BankPPA a = model_design(cfg("sram64mb_7nm"));
  const ComparisonReport same = compare_designs(a, a);
  for (const MetricDelta& d : same.rows) CHECK(d.delta_pct == 0);
  const BankPPA b = model_design(cfg("sram128mb_3nm"));
  CHECK_THROWS_AS(compare_designs(a, b), Error);
  const BankPPA gc = model_design(cfg("gc2tcaa128mb_3nm"));
  const ComparisonReport r = compare_designs(b, gc);
  CHECK(r.at("area").delta_pct == doctest::Approx((gc.area_mm2 - b.area_mm2) / b.area_mm2 * 100));
  CHECK_THROWS_AS(r.at("nonexistent"), Error);
}

TEST_CASE("objective values") {
  const BankPPA b = model_design(cfg("sram64mb_7nm"));
  CHECK(objective_value(Objective::Area, b) == b.area_mm2);
  CHECK(objective_value(Objective::RWDelayProduct, b) == doctest::Approx(b.t_hit_s * b.t_write_s));
  CHECK(objective_from("EDP") == Objective::EDP);
  CHECK_THROWS_AS(objective_from("Speed"), Error);
}
