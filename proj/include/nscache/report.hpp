#pragma once

// Report serialization. JSON keys keep insertion order and floats carry six
// significant digits, so equal inputs give byte-identical files.

#include <exception>
#include <string>

#include <json.hpp>

#include "nscache/llcsim.hpp"
#include "nscache/optimizer.hpp"
#include "nscache/run.hpp"

namespace nscache {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Value rounded to six significant digits ("%.6g").
double sig6(double v);
std::string fmt6(double v);
// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

Json org_json(const BankOrg& org);
Json bank_json(const BankPPA& bank);
Json model_report(const RunConfig& rc, const BankPPA& bank);
// One row per bank component and per mat component.
std::string audit_csv(const BankPPA& bank);

Json search_report(const SearchSpec& spec, const SearchResult& result);
std::string ranked_csv(const SearchResult& result);

Json timing_json(const TimingParams& t);
Json sim_stats_json(const SimStats& s);
Json energy_json(const EnergyReport& r);
Json simulate_report(const CacheConfig& cache, const TimingParams& timing, const SimStats& stats,
                     const EnergyReport& energy);
std::string cdf_csv(const SimStats& s);

// The metrics compare_designs reads, recovered from a model report.
BankPPA bank_from_report(const Json& report);
Json compare_report(const ComparisonReport& r, const std::string& a_name, const std::string& b_name);
std::string compare_text(const ComparisonReport& r, const std::string& a_name, const std::string& b_name);

Json error_report(const std::exception& e);

}  // namespace nscache
