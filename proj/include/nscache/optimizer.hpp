#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nscache/bank.hpp"

namespace nscache {

enum class Objective { ReadLatency, WriteLatency, RWDelayProduct, Area, Leakage, EDP };

std::string_view to_string(Objective o);
Objective objective_from(std::string_view s);

// Inclusive range of powers of two. lo == hi pins the variable.
struct Pow2Range {
  int lo = 1, hi = 1;
  static Pow2Range pin(int v) { return {v, v}; }
};

struct SearchBounds {
  Pow2Range n_sr{1, 32}, n_sc{1, 32};
  Pow2Range mats_r{1, 8}, mats_c{1, 8};
  Pow2Range mat_rows{32, 1024}, mat_cols{32, 1024};
  Pow2Range bl_mux{1, 8}, sa_mux{1, 1};
  Pow2Range wl_segmentation{1, 1};
  int folds_lo = 0, folds_hi = 2;  // plain integers; capped by max_tiers and the cell
  // Minimal: the fewest active mats that deliver one access (fewest active
  // subarrays on ties). All: every subarray and mat. Enumerate: the ranges.
  enum class Active { Minimal, All, Enumerate } active = Active::Minimal;
  Pow2Range n_asr{1, 32}, n_asc{1, 32}, n_amr{1, 8}, n_amc{1, 8};
};

struct SearchSpec {
  // Fields that are not enumerated (kind, associativity, block width, access
  // mode, ECC, capacity, slices, address bits, folded bitline, reference rows)
  // are taken from here. n_block is derived when left at 0.
  BankOrg base;
  CellModel cell;
  std::optional<CellModel> tag_cell;  // tag bank (Data kind) or tag mats (TAU kinds)
  const TechNode* tech = nullptr;
  Objective objective = Objective::RWDelayProduct;
  std::optional<double> max_area_mm2;
  std::optional<double> max_latency_s;  // applies to t_hit and t_write
  int max_tiers = 4;                    // memory tiers, 2^folds
  SearchBounds bounds;
  int top_k = 10;
  double sense_leakage_budget = 0.1;
  TAUOptions tau;
};

void validate(const SearchSpec& spec);

// n_block from capacity and block width when unset; tag entry width for
// every kind but Data.
BankOrg with_derived_fields(const BankOrg& org);

// Every capacity-consistent organization within bounds that also satisfies
// the bank and mat invariants, in a fixed nested-loop order. Throws when none
// remain.
std::vector<BankOrg> enumerate_candidates(const SearchSpec& spec);
// Same order without materializing the list; `fn` returning false stops early.
void for_each_candidate(const SearchSpec& spec, const std::function<bool(const BankOrg&)>& fn);

struct CandidateResult {
  BankOrg org;
  bool feasible = false;
  std::string reason;  // why the candidate was rejected
  double objective_value = 0;
  BankPPA ppa;
};

// One candidate, evaluated without shared state.
CandidateResult evaluate_candidate(const SearchSpec& spec, const BankOrg& org);
double objective_value(Objective o, const BankPPA& ppa);

struct RankedDesign {
  BankOrg org;
  int folds = 0;
  BankPPA ppa;
  double objective_value = 0;
  int rank = 0;  // 1-based
};

struct SearchResult {
  std::vector<RankedDesign> ranked;     // top K
  std::vector<CandidateResult> log;     // every candidate, enumeration order
  int n_candidates = 0;
  int n_feasible = 0;
};

// Parallel evaluation (OpenMP) followed by a canonical ranking; output is
// identical to search_serial.
SearchResult search(const SearchSpec& spec);
SearchResult search_serial(const SearchSpec& spec);

// Strict weak order used for ranking: objective, then area, then leakage,
// then the organization fields lexicographically.
bool ranks_before(const CandidateResult& a, const CandidateResult& b);

struct MetricDelta {
  std::string metric;
  std::string unit;
  double a = 0, b = 0;
  double delta_pct = 0;  // (b - a) / a * 100; 0 when both are 0
};

struct ComparisonReport {
  std::vector<MetricDelta> rows;
  const MetricDelta& at(std::string_view metric) const;
};

// Deltas of `b` relative to `a`.
ComparisonReport compare_designs(const BankPPA& a, const BankPPA& b);

}  // namespace nscache
