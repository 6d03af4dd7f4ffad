// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "nscache/run.hpp"

using namespace nscache;

namespace {

const RunConfig& search_config() {
  static const RunConfig rc = load_run_config(data_dir() / "configs" / "gc2t128mb_7nm_search.cfg");
  return rc;
}

template <SearchResult (*Fn)(const SearchSpec&)>
void BM_Search(benchmark::State& state) {
  const SearchSpec spec = search_spec(search_config());
  for (auto _ : state) {
    const SearchResult r = Fn(spec);
    benchmark::DoNotOptimize(r.ranked.data());
    state.counters["candidates"] = static_cast<double>(r.n_candidates);
  }
}

struct SimInputs {
  std::vector<std::vector<TraceEvent>> traces;
  CacheConfig cache;
  TimingParams timing;
};

const SimInputs& sim_inputs() {
  static const SimInputs in = [] {
    SimInputs s;
    s.cache.capacity_bytes = 8 << 20;
    s.timing.cycles = {4, 4, 5, 2, 1, 2};
    s.timing.subarrays = 16;
    s.timing.mats_per_subarray = 4;
    s.timing.refresh = {true, 170e-6, 128};
    for (std::uint64_t seed = 1; seed <= 16; ++seed) {
      TraceGenParams g;
      g.kind = TraceKind::ReadWriteMix;
      g.n_events = 50000;
      g.footprint_bytes = 16 << 20;
      g.seed = seed;
      s.traces.push_back(generate_trace(g));
    }
    return s;
  }();
  return in;
}

using SimManyFn = std::vector<SimStats> (*)(const std::vector<std::vector<TraceEvent>>&, const CacheConfig&,
                                            const TimingParams&, const SimOptions&);

template <SimManyFn Fn>
void BM_SimulateMany(benchmark::State& state) {
  const SimInputs& in = sim_inputs();
  for (auto _ : state) {
    const auto stats = Fn(in.traces, in.cache, in.timing, {});
    benchmark::DoNotOptimize(stats.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.traces.size()) * 50000);
}

}  // namespace

BENCHMARK(BM_Search<search>)->Name("search")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Search<search_serial>)->Name("search_serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateMany<simulate_many>)->Name("simulate_many")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateMany<simulate_many_serial>)->Name("simulate_many_serial")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
