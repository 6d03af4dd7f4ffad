#pragma once

// Run configurations: one config file describes a design (tech, cell,
// organization), optional optimizer bounds and optional simulator overrides.

#include <filesystem>
#include <optional>
#include <string>

#include "nscache/bank.hpp"
#include "nscache/cells.hpp"
#include "nscache/config.hpp"
#include "nscache/llcsim.hpp"
#include "nscache/optimizer.hpp"
#include "nscache/tech.hpp"

namespace nscache {

struct RunConfig {
  std::string source;
  std::optional<TechNode> tech;
  std::optional<CellModel> cell;
  std::optional<CellModel> tag_cell;
  BankOrg org;  // fields not given keep their defaults
  double f_clk_hz = 3e9;
  double sense_leakage_budget = 0.1;
  TAUOptions tau;
  SearchSpec search;  // bounds and objective; tech/cell pointers unset
  TimingParams timing_overrides;
  EnergyParams energy_overrides;
  // Which organization, timing and energy keys the file gave explicitly.
  std::vector<std::string> given;

  bool has(std::string_view key) const;
  bool has_design() const { return tech && cell; }
};

RunConfig run_config_from(const ConfigDocument& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Build the configured organization. TAU kinds derive their tag organization
// from the data organization.
BankPPA model_design(const RunConfig& rc);

// Optimizer input for the configured design. Organization keys that are
// given pin the matching search variable.
SearchSpec search_spec(const RunConfig& rc);

// Simulator inputs: from the modeled bank when the config describes a design,
// overridden by any explicit timing or energy key.
CacheConfig cache_config(const RunConfig& rc);
TimingParams sim_timing(const RunConfig& rc, const BankPPA* bank);
EnergyParams sim_energy(const RunConfig& rc, const BankPPA* bank);

}  // namespace nscache
