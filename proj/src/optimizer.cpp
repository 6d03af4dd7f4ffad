#include "nscache/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "nscache/error.hpp"

namespace nscache {

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::ReadLatency: return "ReadLatency";
    case Objective::WriteLatency: return "WriteLatency";
    case Objective::RWDelayProduct: return "RWDelayProduct";
    case Objective::Area: return "Area";
    case Objective::Leakage: return "Leakage";
    case Objective::EDP: return "EDP";
  }
  return "?";
}

Objective objective_from(std::string_view s) {
  for (Objective o : {Objective::ReadLatency, Objective::WriteLatency, Objective::RWDelayProduct, Objective::Area,
                      Objective::Leakage, Objective::EDP})
    if (s == to_string(o)) return o;
  if (s == "read" || s == "ReadEDP") return Objective::ReadLatency;
  if (s == "write") return Objective::WriteLatency;
  if (s == "rw" || s == "ReadWriteDelayProduct") return Objective::RWDelayProduct;
  if (s == "area") return Objective::Area;
  if (s == "leakage") return Objective::Leakage;
  if (s == "edp") return Objective::EDP;
  throw Error("unknown optimization objective '" + std::string(s) + "'");
}

namespace {

bool is_pow2(long long n) { return n > 0 && (n & (n - 1)) == 0; }

void check_range(const Pow2Range& r, const char* what) {
  if (!is_pow2(r.lo) || !is_pow2(r.hi) || r.lo > r.hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "search: bounds for %s must be powers of two with lo <= hi (got %d..%d)", what,
                  r.lo, r.hi);
    throw Error(buf);
  }
}

std::vector<int> values(const Pow2Range& r) {
  std::vector<int> v;
  for (long long x = r.lo; x <= r.hi; x *= 2) v.push_back(static_cast<int>(x));
  return v;
}

std::vector<int> active_values(const Pow2Range& r, int total) {
  std::vector<int> v;
  for (long long x = r.lo; x <= std::min(r.hi, total); x *= 2) v.push_back(static_cast<int>(x));
  return v;
}

auto org_key(const BankOrg& o) {
  return std::make_tuple(o.n_sr, o.n_sc, o.mats_r, o.mats_c, o.mat_rows, o.mat_cols, o.bl_mux, o.sa_mux,
                         o.wl_segmentation, o.folds, o.n_asr, o.n_asc, o.n_amr, o.n_amc);
}

int out_bits(const BankOrg& o) {
  const double ecc = o.kind == BankKind::Tag ? 0.0 : o.ecc_ratio;
  return physical_columns(o.mat_cols, ecc) / (o.bl_mux * o.sa_mux);
}

// Fewest active mats delivering one access; fewer active subarrays, then
// fewer active rows, break ties.
std::optional<std::array<int, 4>> minimal_activation(const BankOrg& o, int out) {
  const double ecc = o.kind == BankKind::Tag ? 0.0 : o.ecc_ratio;
  const auto need = static_cast<std::int64_t>(std::ceil(bits_per_access(o) * (1.0 + ecc) - 1e-9));
  std::optional<std::array<int, 4>> best;
  std::tuple<std::int64_t, int, int, int> best_key;
  for (int a1 = 1; a1 <= o.n_sr; a1 *= 2)
    for (int a2 = 1; a2 <= o.n_sc; a2 *= 2)
      for (int a3 = 1; a3 <= o.mats_r; a3 *= 2)
        for (int a4 = 1; a4 <= o.mats_c; a4 *= 2) {
          const std::int64_t mats = std::int64_t{a1} * a2 * a3 * a4;
          if (mats * out < need) continue;
          const auto key = std::make_tuple(mats, a1 * a2, a1, a3);
          if (!best || key < best_key) {
            best = std::array<int, 4>{a1, a2, a3, a4};
            best_key = key;
          }
        }
  return best;
}

}  // namespace

BankOrg with_derived_fields(const BankOrg& org) {
  BankOrg b = org;
  if (b.n_block == 0 && b.w_block_data >= 8) b.n_block = b.capacity_bytes / (b.w_block_data / 8);
  if (b.kind != BankKind::Data)
    b.w_block_tag = tag_entry_bits(b.capacity_bytes, b.associativity, b.w_block_data / 8, b.address_bits);
  else
    b.w_block_tag = 0;
  return b;
}

void validate(const SearchSpec& s) {
  if (s.tech == nullptr) throw Error("search: no technology node");
  if (s.base.capacity_bytes <= 0) throw Error("search: capacity must be positive");
  if (s.top_k < 1) throw Error("search: top K must be >= 1");
  if (s.max_tiers < 1) throw Error("search: max tiers must be >= 1");
  if (is_tau(s.base.kind) && !s.tag_cell) throw Error("search: TAU banks need a tag cell");
  const SearchBounds& b = s.bounds;
  check_range(b.n_sr, "subarray rows");
  check_range(b.n_sc, "subarray columns");
  check_range(b.mats_r, "mat rows per subarray");
  check_range(b.mats_c, "mat columns per subarray");
  check_range(b.mat_rows, "mat rows");
  check_range(b.mat_cols, "mat columns");
  check_range(b.bl_mux, "bitline mux");
  check_range(b.sa_mux, "sense-amp mux");
  check_range(b.wl_segmentation, "wordline segments");
  if (b.active == SearchBounds::Active::Enumerate) {
    check_range(b.n_asr, "active subarray rows");
    check_range(b.n_asc, "active subarray columns");
    check_range(b.n_amr, "active mat rows");
    check_range(b.n_amc, "active mat columns");
  }
  if (b.folds_lo < 0 || b.folds_hi > 2 || b.folds_lo > b.folds_hi)
    throw Error("search: fold bounds must satisfy 0 <= lo <= hi <= 2");
}

void for_each_candidate(const SearchSpec& s, const std::function<bool(const BankOrg&)>& fn) {
  validate(s);
  const BankOrg base = with_derived_fields(s.base);
  {
    // Org-independent checks surface as errors rather than an empty space.
    BankOrg probe = base;
    probe.n_sr = probe.n_sc = probe.mats_r = probe.mats_c = 1;
    probe.n_asr = probe.n_asc = probe.n_amr = probe.n_amc = 1;
    probe.mat_rows = probe.mat_cols = 1;
    try {
      validate(probe);
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.find("inconsistent capacity") == std::string::npos) throw;
    }
  }
  const SearchBounds& b = s.bounds;
  const std::int64_t need = stored_bits_per_slice(base);
  const int max_folds = s.cell.is_beol ? std::min(b.folds_hi, static_cast<int>(std::floor(std::log2(s.max_tiers))))
                                       : 0;
  const int min_folds = s.cell.is_beol ? b.folds_lo : 0;

  for (int n_sr : values(b.n_sr))
    for (int n_sc : values(b.n_sc))
      for (int mats_r : values(b.mats_r))
        for (int mats_c : values(b.mats_c))
          for (int rows : values(b.mat_rows))
            for (int cols : values(b.mat_cols)) {
              if (std::int64_t{n_sr} * n_sc * mats_r * mats_c * rows * cols != need) continue;
              for (int blm : values(b.bl_mux))
                for (int sam : values(b.sa_mux))
                  for (int seg : values(b.wl_segmentation))
                    for (int folds = min_folds; folds <= max_folds; ++folds) {
                      BankOrg o = base;
                      o.n_sr = n_sr;
                      o.n_sc = n_sc;
                      o.mats_r = mats_r;
                      o.mats_c = mats_c;
                      o.mat_rows = rows;
                      o.mat_cols = cols;
                      o.bl_mux = blm;
                      o.sa_mux = sam;
                      o.wl_segmentation = seg;
                      o.folds = folds;
                      o.n_asr = n_sr;
                      o.n_asc = n_sc;
                      o.n_amr = mats_r;
                      o.n_amc = mats_c;
                      try {
                        validate(mat_design_for(o, s.cell, *s.tech, s.sense_leakage_budget));
                      } catch (const Error&) {
                        continue;
                      }
                      std::vector<std::array<int, 4>> act;
                      if (b.active == SearchBounds::Active::All) {
                        act.push_back({n_sr, n_sc, mats_r, mats_c});
                      } else if (b.active == SearchBounds::Active::Enumerate) {
                        for (int a1 : active_values(b.n_asr, n_sr))
                          for (int a2 : active_values(b.n_asc, n_sc))
                            for (int a3 : active_values(b.n_amr, mats_r))
                              for (int a4 : active_values(b.n_amc, mats_c)) act.push_back({a1, a2, a3, a4});
                      } else {
                        const auto m = minimal_activation(o, out_bits(o));
                        if (!m) continue;
                        act.push_back(*m);
                      }
                      for (const auto& [a1, a2, a3, a4] : act) {
                        o.n_asr = a1;
                        o.n_asc = a2;
                        o.n_amr = a3;
                        o.n_amc = a4;
                        try {
                          validate(o);
                        } catch (const Error&) {
                          continue;
                        }
                        if (!fn(o)) return;
                      }
                    }
            }
}

std::vector<BankOrg> enumerate_candidates(const SearchSpec& s) {
  std::vector<BankOrg> out;
  for_each_candidate(s, [&](const BankOrg& o) {
    out.push_back(o);
    return true;
  });
  if (out.empty()) throw Error("search: no capacity-consistent organization within the enumeration bounds");
  return out;
}

double objective_value(Objective o, const BankPPA& p) {
  switch (o) {
    case Objective::ReadLatency: return p.t_hit_s;
    case Objective::WriteLatency: return p.t_write_s;
    case Objective::RWDelayProduct: return p.t_hit_s * p.t_write_s;
    case Objective::Area: return p.area_mm2;
    case Objective::Leakage: return p.leakage_w;
    case Objective::EDP: return p.t_hit_s * p.e_hit_j;
  }
  return 0;
}

CandidateResult evaluate_candidate(const SearchSpec& s, const BankOrg& org) {
  CandidateResult r;
  r.org = org;
  const TechNode& tech = *s.tech;
  try {
    switch (org.kind) {
      case BankKind::Data:
        r.ppa = s.tag_cell ? build_cache_bank(org, s.cell, *s.tag_cell, tech, s.sense_leakage_budget)
                           : build_bank(org, mat_for(org, s.cell, tech, s.sense_leakage_budget), tech);
        break;
      case BankKind::Tag:
        r.ppa = build_bank(org, mat_for(org, s.cell, tech, s.sense_leakage_budget), tech);
        break;
      case BankKind::TAU_HM:
      case BankKind::TAU_HT: {
        BankOrg d = org;
        d.kind = BankKind::Data;
        const BankOrg tag = matching_tag_org(d);
        TAUOptions opts = s.tau;
        opts.sense_leakage_budget = s.sense_leakage_budget;
        r.ppa = build_tau_bank(org, s.cell, tag, *s.tag_cell, tech,
                               org.kind == BankKind::TAU_HM ? TAUVariant::HM : TAUVariant::HT, opts);
        break;
      }
    }
  } catch (const std::exception& e) {
    r.reason = e.what();
    return r;
  }
  char buf[160];
  if (s.max_area_mm2 && r.ppa.area_mm2 > *s.max_area_mm2) {
    std::snprintf(buf, sizeof buf, "area %.6g mm2 exceeds %.6g mm2", r.ppa.area_mm2, *s.max_area_mm2);
    r.reason = buf;
    return r;
  }
  if (s.max_latency_s && std::max(r.ppa.t_hit_s, r.ppa.t_write_s) > *s.max_latency_s) {
    std::snprintf(buf, sizeof buf, "latency %.6g s exceeds %.6g s", std::max(r.ppa.t_hit_s, r.ppa.t_write_s),
                  *s.max_latency_s);
    r.reason = buf;
    return r;
  }
  if ((1 << org.folds) > s.max_tiers) {
    r.reason = "too many memory tiers";
    return r;
  }
  r.feasible = true;
  r.objective_value = objective_value(s.objective, r.ppa);
  return r;
}

bool ranks_before(const CandidateResult& a, const CandidateResult& b) {
  if (a.objective_value != b.objective_value) return a.objective_value < b.objective_value;
  if (a.ppa.area_mm2 != b.ppa.area_mm2) return a.ppa.area_mm2 < b.ppa.area_mm2;
  if (a.ppa.leakage_w != b.ppa.leakage_w) return a.ppa.leakage_w < b.ppa.leakage_w;
  return org_key(a.org) < org_key(b.org);
}

namespace {

SearchResult rank(const SearchSpec& s, std::vector<CandidateResult> log) {
  SearchResult out;
  out.n_candidates = static_cast<int>(log.size());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < log.size(); ++i)
    if (log[i].feasible) idx.push_back(i);
  out.n_feasible = static_cast<int>(idx.size());
  if (idx.empty()) throw Error("search: no feasible design under the given constraints");
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ranks_before(log[a], log[b]); });
  const std::size_t k = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(s.top_k));
  for (std::size_t i = 0; i < k; ++i) {
    const CandidateResult& c = log[idx[i]];
    out.ranked.push_back({c.org, c.org.folds, c.ppa, c.objective_value, static_cast<int>(i) + 1});
  }
  out.log = std::move(log);
  return out;
}

}  // namespace

SearchResult search(const SearchSpec& s) {
  const std::vector<BankOrg> cands = enumerate_candidates(s);
  std::vector<CandidateResult> log(cands.size());
  const long n = static_cast<long>(cands.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) log[i] = evaluate_candidate(s, cands[i]);
  return rank(s, std::move(log));
}

SearchResult search_serial(const SearchSpec& s) {
  const std::vector<BankOrg> cands = enumerate_candidates(s);
  std::vector<CandidateResult> log;
  log.reserve(cands.size());
  for (const BankOrg& o : cands) log.push_back(evaluate_candidate(s, o));
  return rank(s, std::move(log));
}

const MetricDelta& ComparisonReport::at(std::string_view metric) const {
  for (const auto& r : rows)
    if (r.metric == metric) return r;
  throw Error("comparison: no metric '" + std::string(metric) + "'");
}

ComparisonReport compare_designs(const BankPPA& a, const BankPPA& b) {
  if (a.org.capacity_bytes != b.org.capacity_bytes) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "compare: capacity mismatch (%lld vs %lld bytes)",
                  static_cast<long long>(a.org.capacity_bytes), static_cast<long long>(b.org.capacity_bytes));
    throw Error(buf);
  }
  ComparisonReport r;
  auto add = [&](const char* name, const char* unit, double x, double y) {
    MetricDelta d{name, unit, x, y, 0};
    if (x != 0) d.delta_pct = (y - x) / x * 100.0;
    else if (y != 0) d.delta_pct = y > 0 ? INFINITY : -INFINITY;
    r.rows.push_back(d);
  };
  add("area", "mm2", a.area_mm2, b.area_mm2);
  add("read_latency", "s", a.t_hit_s, b.t_hit_s);
  add("write_latency", "s", a.t_write_s, b.t_write_s);
  add("read_energy", "J", a.e_hit_j, b.e_hit_j);
  add("write_energy", "J", a.e_write_j, b.e_write_j);
  add("leakage", "W", a.leakage_w, b.leakage_w);
  return r;
}

}  // namespace nscache
