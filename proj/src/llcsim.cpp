#include "nscache/llcsim.hpp"

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

namespace nscache {

namespace {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(std::int64_t n) {
  int k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

// True (with the integer in `r`) when `x` sits within a few ulps of an integer.
bool near_integer(double x, double& r) {
  r = std::nearbyint(x);
  return std::fabs(x - r) <= 4 * DBL_EPSILON * std::max(1.0, std::fabs(x));
}

}  // namespace

std::int64_t quantize_cycles(double latency_s, double f_clk_hz) {
  if (!(f_clk_hz > 0) || !std::isfinite(f_clk_hz)) throw Error("quantize_cycles: clock frequency must be positive");
  if (!(latency_s >= 0) || !std::isfinite(latency_s)) throw Error("quantize_cycles: latency must be non-negative");
  const double x = latency_s * f_clk_hz;
  double r = 0;
  if (near_integer(x, r)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

std::string_view to_string(BlockingScope s) { return s == BlockingScope::Mat ? "Mat" : "Subarray"; }

BlockingScope blocking_scope_from(std::string_view s) {
  if (s == "Mat" || s == "mat") return BlockingScope::Mat;
  if (s == "Subarray" || s == "subarray") return BlockingScope::Subarray;
  throw Error("unknown refresh blocking scope '" + std::string(s) + "'");
}

std::int64_t TimingParams::row_period_cycles() const {
  const double x = refresh.row_period_s * f_clk_hz;
  double r = 0;
  if (near_integer(x, r)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(x));
}

int TimingParams::refresh_units() const {
  return blocking_scope == BlockingScope::Mat ? subarrays * mats_per_subarray : subarrays;
}

void validate(const TimingParams& t) {
  if (!(t.f_clk_hz > 0) || !std::isfinite(t.f_clk_hz)) throw Error("timing: clock frequency must be positive");
  const auto& c = t.cycles;
  for (std::int64_t v : {c.hit, c.miss_detect, c.write, c.tag_access, c.tag_broadcast, c.refresh_row})
    if (v < 0) throw Error("timing: cycle counts must be non-negative");
  if (t.offchip_fill_cycles < 0 || t.slice_hop_cycles < 0)
    throw Error("timing: off-chip fill and slice hop cycles must be non-negative");
  if (t.subarrays < 1 || t.mats_per_subarray < 1) throw Error("timing: subarrays and mats per subarray must be >= 1");
  if (t.refresh.enabled) {
    if (!(t.refresh.row_period_s > 0)) throw Error("timing: refresh enabled with a non-positive row period");
    if (t.refresh.n_rows < 1) throw Error("timing: refresh enabled with no rows");
    if (t.row_period_cycles() < t.refresh.n_rows)
      throw Error("timing: row period shorter than one cycle per row at this clock");
  }
}

TimingParams timing_from_bank(const BankPPA& bank, double f_clk_hz, double retention_derate) {
  if (!(retention_derate > 0) || retention_derate > 1) throw Error("timing_from_bank: derate must be in (0, 1]");
  TimingParams t;
  t.f_clk_hz = f_clk_hz;
  t.mode = bank.org.mode;
  auto q = [&](double s) { return quantize_cycles(std::max(0.0, s), f_clk_hz); };
  auto& c = t.cycles;
  c.tag_access = q(bank.t_tag_s);
  c.tag_broadcast = q(bank.t_broadcast_s);
  switch (bank.org.mode) {
    case AccessMode::Sequential:
      c.hit = q(bank.t_hit_s - bank.t_tag_s);
      c.miss_detect = q(bank.t_miss_detect_s - bank.t_tag_s);
      break;
    case AccessMode::Normal:
      c.hit = q(bank.t_read_s);
      c.miss_detect = q(bank.t_miss_detect_s);
      break;
    case AccessMode::Fast:
      c.hit = q(bank.t_hit_s);
      c.miss_detect = q(bank.t_miss_detect_s);
      break;
  }
  c.write = q(bank.t_write_s) + bank.write_penalty_cycles;
  // A gain-cell refresh is a read followed by a write of the row; eDRAM
  // restores within its read cycle.
  const MatPPA& m = bank.mat;
  c.refresh_row = q(m.t_cycle_s + (m.timing.t_restore > 0 ? 0.0 : m.t_write_s));
  t.subarrays = std::max(1, bank.subarrays) * std::max(1, bank.org.slices);
  t.mats_per_subarray = bank.org.mats_r * bank.org.mats_c;
  if (m.refresh.needs) {
    t.refresh.enabled = true;
    t.refresh.row_period_s = retention_derate * m.refresh.t_retention_s;
    t.refresh.n_rows = m.refresh.n_rows;
  }
  validate(t);
  return t;
}

std::int64_t CacheConfig::sets() const {
  const std::int64_t per_set = static_cast<std::int64_t>(line_bytes) * ways;
  return per_set > 0 ? capacity_bytes / per_set : 0;
}

void validate(const CacheConfig& c) {
  if (c.capacity_bytes <= 0) throw Error("cache: capacity must be positive");
  if (!is_pow2(c.line_bytes)) throw Error("cache: line size must be a power of two");
  if (c.ways < 1) throw Error("cache: associativity must be >= 1");
  if (c.address_bits < 8 || c.address_bits > 64) throw Error("cache: address bits must be in [8, 64]");
  const std::int64_t sets = c.sets();
  if (!is_pow2(sets) || sets * c.line_bytes * c.ways != c.capacity_bytes)
    throw Error("cache: capacity / (line * ways) must be a power of two");
  if (log2i(sets) + log2i(c.line_bytes) > c.address_bits) throw Error("cache: address bits too few for the index");
}

// ---------------------------------------------------------------------------
// Trace text

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view next_token(std::string_view& s) {
  s = trim(s);
  const auto e = s.find_first_of(" \t");
  std::string_view tok = s.substr(0, e);
  s = e == std::string_view::npos ? std::string_view{} : s.substr(e);
  return tok;
}

}  // namespace

std::vector<TraceEvent> parse_trace(std::string_view text, const std::string& source) {
  std::vector<TraceEvent> out;
  int line_no = 0;
  std::int64_t last_tick = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw Error(source + ":" + std::to_string(line_no) + ": " + what, source, line_no);
    };
    std::string_view rest = line;
    const std::string_view t_tok = next_token(rest);
    const std::string_view o_tok = next_token(rest);
    std::string_view a_tok = next_token(rest);
    if (a_tok.empty()) fail("expected '<tick> <R|W> <hex address>'");
    if (!trim(rest).empty()) fail("unexpected text after the address");
    TraceEvent ev;
    auto [tp, tec] = std::from_chars(t_tok.data(), t_tok.data() + t_tok.size(), ev.tick);
    if (tec != std::errc{} || tp != t_tok.data() + t_tok.size() || ev.tick < 0)
      fail("bad tick '" + std::string(t_tok) + "'");
    if (o_tok == "R" || o_tok == "r") ev.op = Op::Read;
    else if (o_tok == "W" || o_tok == "w") ev.op = Op::Write;
    else fail("bad op '" + std::string(o_tok) + "' (expected R or W)");
    if (a_tok.size() > 2 && a_tok[0] == '0' && (a_tok[1] == 'x' || a_tok[1] == 'X')) a_tok.remove_prefix(2);
    auto [ap, aec] = std::from_chars(a_tok.data(), a_tok.data() + a_tok.size(), ev.address, 16);
    if (aec != std::errc{} || ap != a_tok.data() + a_tok.size()) fail("bad hex address '" + std::string(a_tok) + "'");
    if (!out.empty() && ev.tick < last_tick)
      fail("tick " + std::to_string(ev.tick) + " decreases (previous " + std::to_string(last_tick) + ")");
    last_tick = ev.tick;
    out.push_back(ev);
  }
  return out;
}

std::vector<TraceEvent> load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), path);
}

std::string format_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  out.reserve(trace.size() * 24);
  char buf[64];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%lld %c 0x%llx\n", static_cast<long long>(e.tick), e.op == Op::Read ? 'R' : 'W',
                  static_cast<unsigned long long>(e.address));
    out += buf;
  }
  return out;
}

void validate_trace(const std::vector<TraceEvent>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].tick < 0) throw Error("trace event " + std::to_string(i) + ": negative tick");
    if (i > 0 && trace[i].tick < trace[i - 1].tick)
      throw Error("trace event " + std::to_string(i) + ": tick decreases");
  }
}

// ---------------------------------------------------------------------------
// Synthetic traces

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::UniformRandom: return "uniform_random";
    case TraceKind::Strided: return "strided";
    case TraceKind::Zipf: return "zipf";
    case TraceKind::ReadWriteMix: return "read_write_mix";
  }
  return "?";
}

TraceKind trace_kind_from(std::string_view s) {
  for (auto k : {TraceKind::UniformRandom, TraceKind::Strided, TraceKind::Zipf, TraceKind::ReadWriteMix})
    if (s == to_string(k)) return k;
  throw Error("unknown trace kind '" + std::string(s) + "'");
}

void validate(const TraceGenParams& p) {
  if (p.n_events < 0) throw Error("gen-trace: event count must be non-negative");
  if (!is_pow2(p.line_bytes)) throw Error("gen-trace: line size must be a power of two");
  if (p.footprint_bytes < p.line_bytes) throw Error("gen-trace: footprint must hold at least one line");
  if (p.stride_bytes <= 0) throw Error("gen-trace: stride must be positive");
  if (!(p.zipf_alpha >= 0) || !std::isfinite(p.zipf_alpha)) throw Error("gen-trace: zipf alpha must be >= 0");
  if (p.write_fraction > 1 || std::isnan(p.write_fraction)) throw Error("gen-trace: write fraction must be <= 1");
  if (p.tick_gap < 0) throw Error("gen-trace: tick gap must be non-negative");
}

namespace {

// The engine's output sequence is fixed by the standard; the mappings below
// avoid the implementation-defined standard distributions.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * n) >> 64);
  }
};

class ZipfSampler {
 public:
  ZipfSampler(std::int64_t n, double alpha) : cdf_(static_cast<std::size_t>(n)) {
    double acc = 0;
    for (std::int64_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), alpha);
      cdf_[static_cast<std::size_t>(r)] = acc;
    }
    for (auto& v : cdf_) v /= acc;
  }
  std::int64_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::int64_t>(it - cdf_.begin(), static_cast<std::int64_t>(cdf_.size()) - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

std::vector<TraceEvent> generate_trace(const TraceGenParams& p) {
  validate(p);
  Rng rng(p.seed);
  const std::int64_t lines = p.footprint_bytes / p.line_bytes;
  const double wf = p.write_fraction >= 0 ? p.write_fraction : (p.kind == TraceKind::ReadWriteMix ? 0.3 : 0.0);
  std::unique_ptr<ZipfSampler> zipf;
  if (p.kind == TraceKind::Zipf || p.kind == TraceKind::ReadWriteMix) zipf = std::make_unique<ZipfSampler>(lines, p.zipf_alpha);
  std::vector<TraceEvent> out;
  out.reserve(static_cast<std::size_t>(p.n_events));
  std::int64_t tick = 0;
  for (std::int64_t i = 0; i < p.n_events; ++i) {
    std::uint64_t offset = 0;
    switch (p.kind) {
      case TraceKind::UniformRandom:
        offset = rng.below(static_cast<std::uint64_t>(lines)) * p.line_bytes;
        break;
      case TraceKind::Strided:
        offset = static_cast<std::uint64_t>((static_cast<unsigned __int128>(i) * p.stride_bytes) %
                                            static_cast<std::uint64_t>(p.footprint_bytes));
        break;
      case TraceKind::Zipf:
        offset = static_cast<std::uint64_t>((*zipf)(rng)) * p.line_bytes;
        break;
      case TraceKind::ReadWriteMix:
        // Half the accesses follow the zipf hot set, half are uniform.
        offset = (rng.uniform() < 0.5 ? static_cast<std::uint64_t>((*zipf)(rng))
                                      : rng.below(static_cast<std::uint64_t>(lines))) *
                 p.line_bytes;
        break;
    }
    const bool write = wf > 0 && rng.uniform() < wf;
    out.push_back({tick, write ? Op::Write : Op::Read, p.base_address + offset});
    tick += static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * p.tick_gap + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refresh windows
//
// Unit u refreshes row i for the k-th time at k*P + floor(off_u + i*s), with
// P the row period in whole cycles, s = P / rows and off_u = u*s/units. Every
// row therefore recurs exactly every P cycles. Each window holds the unit for
// refresh_row cycles; windows are never delayed.

namespace {

class RefreshWindows {
 public:
  RefreshWindows(const TimingParams& t)
      : period_(t.row_period_cycles()),
        rows_(t.refresh.n_rows),
        units_(t.refresh_units()),
        len_(t.cycles.refresh_row),
        stagger_(static_cast<double>(period_) / rows_) {}

  std::int64_t start(int unit, std::int64_t j) const {
    const std::int64_t k = j / rows_;
    const std::int64_t i = j % rows_;
    return k * period_ + static_cast<std::int64_t>(std::floor(offset(unit) + i * stagger_));
  }
  int row(std::int64_t j) const { return static_cast<int>(j % rows_); }

  // Smallest window index whose start is >= t.
  std::int64_t first_at_or_after(int unit, std::int64_t t) const {
    if (t <= start(unit, 0)) return 0;
    const std::int64_t k = t / period_;
    const double rem = static_cast<double>(t - k * period_) - offset(unit);
    std::int64_t i = static_cast<std::int64_t>(std::ceil(rem / stagger_));
    i = std::clamp<std::int64_t>(i, 0, rows_);
    std::int64_t j = k * rows_ + i;
    while (j > 0 && start(unit, j - 1) >= t) --j;
    while (start(unit, j) < t) ++j;
    return j;
  }

  // Earliest t >= ready at which [t, t + occ) avoids every window of `unit`.
  std::int64_t fit(int unit, std::int64_t ready, std::int64_t occ) const {
    if (len_ == 0) return ready;
    std::int64_t t = ready;
    for (;;) {
      const std::int64_t j = first_at_or_after(unit, t - len_ + 1);  // first window ending after t
      const std::int64_t w = start(unit, j);
      if (w >= t + occ) return t;
      t = w + len_;
    }
  }

  // Minimum spacing between consecutive windows of one unit.
  std::int64_t min_gap() const { return static_cast<std::int64_t>(std::floor(stagger_)); }
  std::int64_t length() const { return len_; }
  int units() const { return units_; }

 private:
  double offset(int unit) const { return unit * stagger_ / units_; }

  std::int64_t period_;
  std::int64_t rows_;
  int units_;
  std::int64_t len_;
  double stagger_;
};

}  // namespace

std::vector<RefreshEvent> refresh_schedule(const TimingParams& timing, std::int64_t horizon_cycles, int unit) {
  validate(timing);
  if (!timing.refresh.enabled) throw Error("refresh_schedule: refresh is disabled");
  if (unit < 0 || unit >= timing.refresh_units()) throw Error("refresh_schedule: unit out of range");
  const RefreshWindows w(timing);
  std::vector<RefreshEvent> out;
  for (std::int64_t j = 0;; ++j) {
    const std::int64_t t = w.start(unit, j);
    if (t >= horizon_cycles) break;
    out.push_back({t, unit, w.row(j)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

class LruCache {
 public:
  explicit LruCache(const CacheConfig& c)
      : ways_(c.ways),
        set_mask_(static_cast<std::uint64_t>(c.sets() - 1)),
        set_bits_(log2i(c.sets())),
        line_bits_(log2i(c.line_bytes)),
        addr_mask_(c.address_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << c.address_bits) - 1),
        tag_(static_cast<std::size_t>(c.sets()) * ways_),
        stamp_(tag_.size(), 0),
        state_(tag_.size(), 0) {}

  std::uint64_t set_of(std::uint64_t addr) const { return ((addr & addr_mask_) >> line_bits_) & set_mask_; }

  // Returns hit; sets `writeback` when a dirty victim is evicted.
  bool access(std::uint64_t addr, bool write, bool& writeback) {
    const std::uint64_t line = (addr & addr_mask_) >> line_bits_;
    const std::uint64_t set = line & set_mask_;
    const std::uint64_t tag = line >> set_bits_;
    const std::size_t base = static_cast<std::size_t>(set) * ways_;
    ++clock_;
    writeback = false;
    for (int w = 0; w < ways_; ++w) {
      const std::size_t i = base + w;
      if ((state_[i] & kValid) && tag_[i] == tag) {
        stamp_[i] = clock_;
        if (write) state_[i] |= kDirty;
        return true;
      }
    }
    std::size_t victim = base;
    for (int w = 0; w < ways_; ++w) {
      const std::size_t i = base + w;
      if (!(state_[i] & kValid)) {
        victim = i;
        break;
      }
      if (stamp_[i] < stamp_[victim]) victim = i;
    }
    writeback = (state_[victim] & kValid) && (state_[victim] & kDirty);
    tag_[victim] = tag;
    stamp_[victim] = clock_;
    state_[victim] = static_cast<std::uint8_t>(kValid | (write ? kDirty : 0));
    return false;
  }

 private:
  static constexpr std::uint8_t kValid = 1, kDirty = 2;
  int ways_;
  std::uint64_t set_mask_;
  int set_bits_, line_bits_;
  std::uint64_t addr_mask_;
  std::uint64_t clock_ = 0;
  std::vector<std::uint64_t> tag_, stamp_;
  std::vector<std::uint8_t> state_;
};

std::int64_t read_latency(const TimingParams& t, bool hit) {
  const auto& c = t.cycles;
  switch (t.mode) {
    case AccessMode::Sequential: return c.tag_access + (hit ? c.hit : c.miss_detect);
    case AccessMode::Normal: return hit ? std::max(c.tag_access, c.hit) + c.tag_broadcast : c.miss_detect;
    case AccessMode::Fast: return hit ? c.hit : c.miss_detect;
  }
  return 0;
}

}  // namespace

SimStats simulate(const std::vector<TraceEvent>& trace, const CacheConfig& cache, const TimingParams& timing,
                  const SimOptions& options) {
  validate(cache);
  validate(timing);
  validate_trace(trace);
  SimStats s;
  if (trace.empty()) return s;

  const bool refresh = timing.refresh.enabled;
  std::optional<RefreshWindows> windows;
  if (refresh) {
    windows.emplace(timing);
    const std::int64_t occ_max =
        std::max({read_latency(timing, true), read_latency(timing, false), timing.cycles.write});
    if (windows->length() > 0 && windows->length() + occ_max > windows->min_gap())
      throw Error("simulate: refresh windows of " + std::to_string(windows->length()) + " cycles every " +
                  std::to_string(windows->min_gap()) + " leave no room for a " + std::to_string(occ_max) +
                  "-cycle access");
  }

  LruCache lru(cache);
  std::vector<std::int64_t> port_free(static_cast<std::size_t>(timing.subarrays), 0);
  if (options.record_events) s.events.reserve(trace.size());

  for (const TraceEvent& ev : trace) {
    const bool write = ev.op == Op::Write;
    bool writeback = false;
    const bool hit = lru.access(ev.address, write, writeback);
    const std::uint64_t set = lru.set_of(ev.address);
    const int sub = static_cast<int>(set % static_cast<std::uint64_t>(timing.subarrays));
    const int mat = static_cast<int>((set / timing.subarrays) % static_cast<std::uint64_t>(timing.mats_per_subarray));
    const int unit = timing.blocking_scope == BlockingScope::Mat ? sub * timing.mats_per_subarray + mat : sub;

    const std::int64_t occ = write ? timing.cycles.write : read_latency(timing, hit);
    const std::int64_t ready = std::max(ev.tick, port_free[static_cast<std::size_t>(sub)]);
    const std::int64_t start = refresh ? windows->fit(unit, ready, occ) : ready;
    s.refresh_stall_cycles += start - ready;
    port_free[static_cast<std::size_t>(sub)] = start + occ;
    std::int64_t done = start + occ + timing.slice_hop_cycles;

    if (write) {
      ++s.n_writes;
      if (hit) ++s.n_write_hits;
    } else {
      ++s.n_reads;
      if (hit) {
        ++s.n_hits;
      } else {
        ++s.n_misses;
        done += timing.offchip_fill_cycles;
      }
      ++s.load_to_use[done - ev.tick];
    }
    if (writeback) ++s.n_writebacks;
    s.runtime_cycles = std::max(s.runtime_cycles, done);
    if (options.record_events) s.events.push_back({ev.tick, ev.op, ev.address, hit, writeback, start, done});
  }

  if (refresh) {
    for (int u = 0; u < windows->units(); ++u) {
      const std::int64_t n = windows->first_at_or_after(u, s.runtime_cycles);
      s.n_refresh_windows += n;
      if (options.record_refresh)
        for (std::int64_t j = 0; j < n; ++j) s.refreshes.push_back({windows->start(u, j), u, windows->row(j)});
    }
    if (options.record_refresh)
      std::sort(s.refreshes.begin(), s.refreshes.end(), [](const RefreshEvent& a, const RefreshEvent& b) {
        return a.tick != b.tick ? a.tick < b.tick : a.unit < b.unit;
      });
  }
  return s;
}

std::vector<SimStats> simulate_many(const std::vector<std::vector<TraceEvent>>& traces, const CacheConfig& cache,
                                    const TimingParams& timing, const SimOptions& options) {
  validate(cache);
  validate(timing);
  const auto n = static_cast<std::int64_t>(traces.size());
  std::vector<SimStats> out(traces.size());
  std::vector<std::string> errors(traces.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = simulate(traces[static_cast<std::size_t>(i)], cache, timing, options);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw Error("trace " + std::to_string(i) + ": " + errors[i]);
  return out;
}

std::vector<SimStats> simulate_many_serial(const std::vector<std::vector<TraceEvent>>& traces,
                                           const CacheConfig& cache, const TimingParams& timing,
                                           const SimOptions& options) {
  std::vector<SimStats> out;
  out.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    try {
      out.push_back(simulate(traces[i], cache, timing, options));
    } catch (const std::exception& e) {
      throw Error("trace " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> load_to_use_cdf(const SimStats& s) {
  std::vector<std::pair<std::int64_t, double>> out;
  if (s.n_reads == 0) return out;
  std::int64_t acc = 0;
  for (const auto& [cycles, count] : s.load_to_use) {
    acc += count;
    out.emplace_back(cycles, static_cast<double>(acc) / static_cast<double>(s.n_reads));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy

void validate(const EnergyParams& ep) {
  for (double v : {ep.e_hit, ep.e_miss, ep.e_write, ep.e_refresh_row, ep.p_static, ep.t_retention})
    if (!(v >= 0) || !std::isfinite(v)) throw Error("energy: parameters must be non-negative and finite");
  if (ep.n_row < 0) throw Error("energy: row count must be non-negative");
  if (!(ep.miss_offchip_multiplier >= 1)) throw Error("energy: off-chip miss multiplier must be >= 1");
  if (ep.n_row > 0 && ep.e_refresh_row > 0 && !(ep.t_retention > 0))
    throw Error("energy: refresh energy given without a retention period");
}

EnergyParams energy_from_bank(const BankPPA& bank, double retention_derate) {
  if (!(retention_derate > 0) || retention_derate > 1) throw Error("energy_from_bank: derate must be in (0, 1]");
  EnergyParams ep;
  ep.e_hit = bank.e_hit_j;
  ep.e_miss = bank.e_miss_j;
  ep.e_write = bank.e_write_j;
  ep.p_static = bank.leakage_w;
  if (bank.mat.refresh.needs) {
    // Every refresh unit refreshes one row per row index.
    ep.e_refresh_row = bank.e_refresh_row_j * bank.refresh_units * std::max(1, bank.org.slices);
    ep.t_retention = retention_derate * bank.mat.refresh.t_retention_s;
    ep.n_row = bank.mat.refresh.n_rows;
  }
  return ep;
}

std::vector<EnergyTerm> EnergyReport::breakdown() const {
  std::vector<EnergyTerm> t = {
      {"hit", hit_j, 0}, {"miss", miss_j, 0}, {"write", write_j, 0}, {"refresh", refresh_j, 0}, {"static", static_j, 0}};
  for (auto& e : t) e.share = total_j > 0 ? e.joules / total_j : 0;
  return t;
}

namespace {

double refresh_energy(const EnergyParams& ep, double t_run_s) {
  if (ep.n_row == 0 || ep.e_refresh_row == 0) return 0;
  return t_run_s * ep.n_row * ep.e_refresh_row / ep.t_retention;
}

}  // namespace

EnergyReport energy_program(const SimStats& stats, const EnergyParams& ep, double t_run_s) {
  validate(ep);
  if (!(t_run_s >= 0) || !std::isfinite(t_run_s)) throw Error("energy: run time must be non-negative");
  if (stats.n_hits < 0 || stats.n_misses < 0 || stats.n_writes < 0 || stats.n_writebacks < 0)
    throw Error("energy: negative event counts");
  EnergyReport r;
  r.n_hits = stats.n_hits;
  r.n_misses = stats.n_misses;
  r.n_array_writes = stats.n_array_writes();
  r.t_run_s = t_run_s;
  r.hit_j = static_cast<double>(r.n_hits) * ep.e_hit;
  r.miss_j = static_cast<double>(r.n_misses) * ep.e_miss;
  r.write_j = static_cast<double>(r.n_array_writes) * ep.e_write;
  r.refresh_j = refresh_energy(ep, t_run_s);
  r.static_j = ep.p_static * t_run_s;
  r.total_j = r.hit_j + r.miss_j + r.write_j + r.refresh_j + r.static_j;
  r.offchip_miss_j = static_cast<double>(r.n_misses) * ep.e_hit * ep.miss_offchip_multiplier;
  return r;
}

std::vector<EnergyLogEntry> energy_log(const SimStats& stats, const EnergyParams& ep, double t_run_s) {
  validate(ep);
  if (static_cast<std::int64_t>(stats.events.size()) != stats.n_reads + stats.n_writes)
    throw Error("energy_log: the event log was not recorded");
  std::vector<EnergyLogEntry> out;
  out.reserve(stats.events.size() + static_cast<std::size_t>(stats.n_writebacks) + 2);
  for (std::size_t i = 0; i < stats.events.size(); ++i) {
    const auto& e = stats.events[i];
    const auto idx = static_cast<std::int64_t>(i);
    if (e.op == Op::Write) out.push_back({idx, EnergyKind::Write, ep.e_write});
    else if (e.hit) out.push_back({idx, EnergyKind::Hit, ep.e_hit});
    else out.push_back({idx, EnergyKind::Miss, ep.e_miss});
    if (e.writeback) out.push_back({idx, EnergyKind::Writeback, ep.e_write});
  }
  out.push_back({-1, EnergyKind::Refresh, refresh_energy(ep, t_run_s)});
  out.push_back({-1, EnergyKind::Static, ep.p_static * t_run_s});
  return out;
}

}  // namespace nscache
