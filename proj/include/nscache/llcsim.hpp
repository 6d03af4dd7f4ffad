#pragma once

// Trace-driven set-associative LLC simulator. Latencies are whole CPU cycles;
// the cache is LRU, write-allocate and write-back, single-ported per subarray,
// and rolling refresh windows block the mat (or subarray) being refreshed.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nscache/bank.hpp"

namespace nscache {

// ceil(latency * f_clk) with a few-ulp tolerance at integer boundaries.
std::int64_t quantize_cycles(double latency_s, double f_clk_hz);

enum class BlockingScope { Mat, Subarray };
std::string_view to_string(BlockingScope s);
BlockingScope blocking_scope_from(std::string_view s);

struct CycleCounts {
  std::int64_t hit = 0;          // data access (Sequential: after the tag)
  std::int64_t miss_detect = 0;  // Sequential: after the tag
  std::int64_t write = 0;
  std::int64_t tag_access = 0;
  std::int64_t tag_broadcast = 0;
  std::int64_t refresh_row = 0;
  bool operator==(const CycleCounts&) const = default;
};

struct RefreshTiming {
  bool enabled = false;
  double row_period_s = 0;  // every row is refreshed at least this often
  int n_rows = 0;
  bool operator==(const RefreshTiming&) const = default;
};

struct TimingParams {
  double f_clk_hz = 3e9;
  CycleCounts cycles;
  AccessMode mode = AccessMode::Normal;
  RefreshTiming refresh;
  BlockingScope blocking_scope = BlockingScope::Mat;
  int subarrays = 1;  // ports; accesses map by low-order set bits
  int mats_per_subarray = 1;
  std::int64_t offchip_fill_cycles = 100;
  std::int64_t slice_hop_cycles = 0;  // ring hop to the slice, paid by every access

  std::int64_t row_period_cycles() const;
  int refresh_units() const;
  bool operator==(const TimingParams&) const = default;
};

void validate(const TimingParams& t);

// Cycle counts, refresh and geometry of a modeled bank at `f_clk_hz`.
// `retention_derate` scales the cell retention into the row period.
TimingParams timing_from_bank(const BankPPA& bank, double f_clk_hz, double retention_derate = 1.0);

struct CacheConfig {
  std::int64_t capacity_bytes = 0;
  int line_bytes = 64;
  int ways = 16;
  int address_bits = 48;

  std::int64_t sets() const;
};

void validate(const CacheConfig& c);

enum class Op { Read, Write };

struct TraceEvent {
  std::int64_t tick = 0;
  Op op = Op::Read;
  std::uint64_t address = 0;
  bool operator==(const TraceEvent&) const = default;
};

// `<tick> <R|W> <hex address>` per line; `#` starts a comment. Errors carry
// the offending line.
std::vector<TraceEvent> parse_trace(std::string_view text, const std::string& source = "<trace>");
std::vector<TraceEvent> load_trace(const std::string& path);
std::string format_trace(const std::vector<TraceEvent>& trace);
void validate_trace(const std::vector<TraceEvent>& trace);

enum class TraceKind { UniformRandom, Strided, Zipf, ReadWriteMix };
std::string_view to_string(TraceKind k);
TraceKind trace_kind_from(std::string_view s);

struct TraceGenParams {
  TraceKind kind = TraceKind::UniformRandom;
  std::int64_t n_events = 1000;
  std::uint64_t base_address = 0;
  std::int64_t footprint_bytes = 1 << 24;
  int line_bytes = 64;
  std::int64_t stride_bytes = 64;  // Strided
  double zipf_alpha = 0.9;         // Zipf and ReadWriteMix
  double write_fraction = -1;      // < 0: 0.3 for ReadWriteMix, 0 otherwise
  std::int64_t tick_gap = 4;       // mean cycles between events
  std::uint64_t seed = 1;
};

void validate(const TraceGenParams& p);
// Deterministic for a given seed on every platform.
std::vector<TraceEvent> generate_trace(const TraceGenParams& p);

struct EventRecord {
  std::int64_t tick = 0;
  Op op = Op::Read;
  std::uint64_t address = 0;
  bool hit = false;
  bool writeback = false;  // a dirty line was evicted
  std::int64_t start = 0;  // port acquired
  std::int64_t done = 0;
  bool operator==(const EventRecord&) const = default;
};

struct RefreshEvent {
  std::int64_t tick = 0;
  int unit = 0;
  int row = 0;
  bool operator==(const RefreshEvent&) const = default;
};

struct SimOptions {
  bool record_events = false;
  bool record_refresh = false;
};

struct SimStats {
  std::int64_t n_reads = 0;
  std::int64_t n_hits = 0;    // reads
  std::int64_t n_misses = 0;  // reads
  std::int64_t n_writes = 0;  // write events
  std::int64_t n_write_hits = 0;
  std::int64_t n_writebacks = 0;
  std::int64_t runtime_cycles = 0;
  std::int64_t refresh_stall_cycles = 0;
  std::int64_t n_refresh_windows = 0;  // windows started before the end of the run
  std::map<std::int64_t, std::int64_t> load_to_use;  // cycles -> reads
  std::vector<EventRecord> events;
  std::vector<RefreshEvent> refreshes;

  std::int64_t n_array_writes() const { return n_writes + n_writebacks; }
  bool operator==(const SimStats&) const = default;
};

SimStats simulate(const std::vector<TraceEvent>& trace, const CacheConfig& cache, const TimingParams& timing,
                  const SimOptions& options = {});
// Independent traces in parallel (OpenMP); identical to the serial version.
std::vector<SimStats> simulate_many(const std::vector<std::vector<TraceEvent>>& traces, const CacheConfig& cache,
                                    const TimingParams& timing, const SimOptions& options = {});
std::vector<SimStats> simulate_many_serial(const std::vector<std::vector<TraceEvent>>& traces,
                                           const CacheConfig& cache, const TimingParams& timing,
                                           const SimOptions& options = {});

// Refresh windows of one unit that start before `horizon_cycles`, in time order.
std::vector<RefreshEvent> refresh_schedule(const TimingParams& timing, std::int64_t horizon_cycles, int unit = 0);

// (cycles, cumulative fraction of reads) at every populated bucket.
std::vector<std::pair<std::int64_t, double>> load_to_use_cdf(const SimStats& s);

struct EnergyParams {
  double e_hit = 0, e_miss = 0, e_write = 0;
  double e_refresh_row = 0;  // one row index refreshed across the whole cache
  double p_static = 0;
  double t_retention = 0;  // refresh period of a row
  int n_row = 0;
  double miss_offchip_multiplier = 92;
};

void validate(const EnergyParams& ep);
EnergyParams energy_from_bank(const BankPPA& bank, double retention_derate = 1.0);

struct EnergyTerm {
  std::string name;
  double joules = 0;
  double share = 0;  // of the on-chip total
};

struct EnergyReport {
  std::int64_t n_hits = 0, n_misses = 0, n_array_writes = 0;
  double t_run_s = 0;
  double hit_j = 0, miss_j = 0, write_j = 0, refresh_j = 0, static_j = 0;
  double total_j = 0;
  double offchip_miss_j = 0;  // not part of total_j

  std::vector<EnergyTerm> breakdown() const;
};

EnergyReport energy_program(const SimStats& stats, const EnergyParams& ep, double t_run_s);

enum class EnergyKind { Hit, Miss, Write, Writeback, Refresh, Static };

struct EnergyLogEntry {
  std::int64_t event = -1;  // index into SimStats::events; -1 for lumped terms
  EnergyKind kind = EnergyKind::Hit;
  double joules = 0;
};

// Per-event energies from the recorded event log plus the refresh and static
// terms over t_run. Requires SimOptions::record_events.
std::vector<EnergyLogEntry> energy_log(const SimStats& stats, const EnergyParams& ep, double t_run_s);

}  // namespace nscache
