// nscache: model, optimize, simulate, compare and gen-trace front end.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nscache/llcsim.hpp"
#include "nscache/optimizer.hpp"
#include "nscache/report.hpp"
#include "nscache/run.hpp"

using namespace nscache;

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'", path);
  out << text;
  if (!out) throw Error("error writing '" + path + "'", path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'", path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": " + e.what(), path);
  }
}

RunConfig load(const std::string& path) {
  const ConfigDocument doc = load_config(path);
  for (const auto& w : doc.warnings) std::cerr << "warning: " << w << "\n";
  return run_config_from(doc);
}

struct ModelArgs {
  std::string config, out, audit;
};
struct OptimizeArgs {
  std::string config, out, csv;
  bool serial = false;
};
struct SimulateArgs {
  std::string config, trace, out, cdf;
  bool no_refresh = false;
};
struct CompareArgs {
  std::string a, b, out, text;
};
struct GenArgs {
  std::string kind = "uniform_random", out;
  TraceGenParams p;
  double footprint_mb = 16;
};

int run_model(const ModelArgs& a) {
  const RunConfig rc = load(a.config);
  const BankPPA bank = model_design(rc);
  write_output(a.out, dump(model_report(rc, bank)));
  if (!a.audit.empty()) write_output(a.audit, audit_csv(bank));
  return 0;
}

int run_optimize(const OptimizeArgs& a) {
  const RunConfig rc = load(a.config);
  const SearchSpec spec = search_spec(rc);
  const SearchResult r = a.serial ? search_serial(spec) : search(spec);
  write_output(a.out, dump(search_report(spec, r)));
  if (!a.csv.empty()) write_output(a.csv, ranked_csv(r));
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  const RunConfig rc = load(a.config);
  std::optional<BankPPA> bank;
  if (rc.has_design()) bank = model_design(rc);
  const CacheConfig cache = cache_config(rc);
  TimingParams timing = sim_timing(rc, bank ? &*bank : nullptr);
  EnergyParams energy = sim_energy(rc, bank ? &*bank : nullptr);
  if (a.no_refresh) {
    timing.refresh.enabled = false;
    energy.e_refresh_row = 0;
  }
  const std::vector<TraceEvent> trace = load_trace(a.trace);
  const SimStats stats = simulate(trace, cache, timing);
  const EnergyReport report =
      energy_program(stats, energy, static_cast<double>(stats.runtime_cycles) / timing.f_clk_hz);
  write_output(a.out, dump(simulate_report(cache, timing, stats, report)));
  if (!a.cdf.empty()) write_output(a.cdf, cdf_csv(stats));
  return 0;
}

int run_compare(const CompareArgs& a) {
  const BankPPA x = bank_from_report(read_json(a.a));
  const BankPPA y = bank_from_report(read_json(a.b));
  const ComparisonReport r = compare_designs(x, y);
  write_output(a.text.empty() ? "-" : a.text, compare_text(r, a.a, a.b));
  if (!a.out.empty()) write_output(a.out, dump(compare_report(r, a.a, a.b)));
  return 0;
}

int run_gen(GenArgs a) {
  a.p.kind = trace_kind_from(a.kind);
  a.p.footprint_bytes = static_cast<std::int64_t>(a.footprint_mb * 1024 * 1024);
  write_output(a.out, format_trace(generate_trace(a.p)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nscache: cache macro modeling, design search and trace simulation"};
  app.require_subcommand(1);

  ModelArgs ma;
  auto* model = app.add_subcommand("model", "Model one configured design (BankPPA JSON + component audit CSV)");
  model->add_option("-c,--config", ma.config, "Run config")->required()->check(CLI::ExistingFile);
  model->add_option("-o,--out", ma.out, "Report JSON (stdout when omitted)");
  model->add_option("--audit", ma.audit, "Component audit CSV");

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "Search organizations and rank them by the configured objective");
  opt->add_option("-c,--config", oa.config, "Run config")->required()->check(CLI::ExistingFile);
  opt->add_option("-o,--out", oa.out, "Ranked designs JSON (stdout when omitted)");
  opt->add_option("--csv", oa.csv, "Ranked designs CSV");
  opt->add_flag("--serial", oa.serial, "Evaluate candidates without threads");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run a trace through the configured cache");
  sim->add_option("-c,--config", sa.config, "Run config")->required()->check(CLI::ExistingFile);
  sim->add_option("-t,--trace", sa.trace, "Trace file")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--out", sa.out, "Stats and energy JSON (stdout when omitted)");
  sim->add_option("--cdf", sa.cdf, "Load-to-use CDF CSV");
  sim->add_flag("--no-refresh", sa.no_refresh, "Disable refresh");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Percent change of a candidate model report against a baseline");
  cmp->add_option("baseline", ca.a, "Baseline model report")->required()->check(CLI::ExistingFile);
  cmp->add_option("candidate", ca.b, "Candidate model report")->required()->check(CLI::ExistingFile);
  cmp->add_option("-o,--out", ca.out, "Delta table JSON");
  cmp->add_option("--text", ca.text, "Delta table text (stdout when omitted)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic trace");
  gen->add_option("-k,--kind", ga.kind, "uniform_random | strided | zipf | read_write_mix");
  gen->add_option("-n,--events", ga.p.n_events, "Event count");
  gen->add_option("-s,--seed", ga.p.seed, "Seed");
  gen->add_option("--footprint-mb", ga.footprint_mb, "Address footprint (MB)");
  gen->add_option("--line", ga.p.line_bytes, "Line size (bytes)");
  gen->add_option("--stride", ga.p.stride_bytes, "Stride (bytes)");
  gen->add_option("--alpha", ga.p.zipf_alpha, "Zipf exponent");
  gen->add_option("--write-fraction", ga.p.write_fraction, "Fraction of writes");
  gen->add_option("--gap", ga.p.tick_gap, "Mean cycles between events");
  gen->add_option("--base", ga.p.base_address, "Base address");
  gen->add_option("-o,--out", ga.out, "Trace file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*model) return run_model(ma);
    if (*opt) return run_optimize(oa);
    if (*sim) return run_simulate(sa);
    if (*cmp) return run_compare(ca);
    if (*gen) return run_gen(ga);
  } catch (const std::exception& e) {
    std::cerr << dump(error_report(e));
    return 1;
  }
  return 2;
}
