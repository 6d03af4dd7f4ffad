#pragma once

// Configuration grammar shared by tech files, cell files and run configs.
//
//   // comment
//   -Key (unit): value
//   -Key: value
//   -MemoryCellInputFile: cells/gc2t_dg_7nm.cell
//
// Keys are checked against a table of known keys (name, canonical unit, value
// type). A unit given on a line must equal the canonical unit of the key.
// Include keys (`-MemoryCellInputFile`, `-TagMemoryCellInputFile`, `-TechFile`)
// are parsed into nested documents rather than spliced into the parent.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nscache/error.hpp"

namespace nscache {

enum class ValueType { Number, Integer, Bool, String, Path };

struct KeySpec {
  std::string name;
  std::string unit;  // empty when the key is dimensionless
  ValueType type = ValueType::Number;
};

// The full table of recognized keys, in documentation order.
std::span<const KeySpec> key_table();
const KeySpec* find_key(std::string_view name);

struct ConfigEntry {
  std::string key;
  std::string unit;   // as written (may be empty)
  std::string value;  // raw text after the colon, trimmed
  std::string file;
  int line = 0;
};

class ConfigDocument {
 public:
  std::vector<ConfigEntry> entries;
  std::vector<std::string> warnings;
  std::string source;  // file name or "<text>"
  std::map<std::string, std::shared_ptr<ConfigDocument>> includes;

  bool empty() const { return entries.empty(); }
  bool has(std::string_view key) const { return find(key) != nullptr; }
  const ConfigEntry* find(std::string_view key) const;

  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  long long integer(std::string_view key) const;
  long long integer_or(std::string_view key, long long fallback) const;
  bool boolean_or(std::string_view key, bool fallback) const;
  std::string string(std::string_view key) const;
  std::string string_or(std::string_view key, std::string fallback) const;

  // Nested document for an include key; throws if the key is absent.
  const ConfigDocument& include(std::string_view key) const;
  const ConfigDocument* include_if(std::string_view key) const;

  // Re-emit the document in the same grammar. Parsing the output yields an
  // equal entry list (keys, units, values).
  std::string emit() const;

  // Raise an Error located at the entry for `key` (or at the document when the
  // key is absent).
  [[noreturn]] void fail(std::string_view key, const std::string& message) const;
};

struct ParseOptions {
  std::string source_name = "<text>";
  std::filesystem::path base_dir;  // for relative include paths
  bool follow_includes = true;
};

ConfigDocument parse_config(std::string_view text, const ParseOptions& options = {});
ConfigDocument load_config(const std::filesystem::path& path);

// Directory holding the shipped tech/cell data; NSCACHE_DATA_DIR overrides.
std::filesystem::path data_dir();

}  // namespace nscache
