#include "nscache/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#ifndef NSCACHE_DEFAULT_DATA_DIR
#define NSCACHE_DEFAULT_DATA_DIR "data"
#endif

namespace nscache {

namespace {

std::vector<KeySpec> build_key_table() {
  using T = ValueType;
  std::vector<KeySpec> k = {
      // general / DESTINY-style
      {"AllowUnknown", "", T::Bool},
      {"DesignTarget", "", T::String},
      {"ProcessNode", "", T::String},
      {"TechFile", "", T::Path},
      {"MemoryCellInputFile", "", T::Path},
      {"TagMemoryCellInputFile", "", T::Path},
      {"Temperature", "K", T::Number},

      // technology
      {"TechnologyNode", "nm", T::Integer},
      {"DeviceClass", "", T::String},
      {"AOSDeviceClass", "", T::String},
      {"Vdd", "V", T::Number},
      {"ReferenceTemperature", "K", T::Number},
      {"LeakageActivationEnergy", "eV", T::Number},
      {"FinPitch", "nm", T::Number},
      {"GatePitch", "nm", T::Number},
      {"TrackPitch", "nm", T::Number},
      {"StdCellHeightTracks", "", T::Integer},
      {"MinNmosWidth", "um", T::Number},
      {"MinPmosWidth", "um", T::Number},
      {"MaxFingerWidth", "um", T::Number},
      {"InputSlew", "s", T::Number},
      {"SelfLoadingRatio", "", T::Number},
      {"SenseVoltage", "V", T::Number},
      {"SenseAmpDevices", "", T::Number},
      {"CurrentSenseAmpAreaFactor", "", T::Number},
      {"CurrentSenseAmpLeakageFactor", "", T::Number},
      {"CurrentSenseAmpTimeFactor", "", T::Number},
      {"LevelShifterWidthFactor", "", T::Number},
      {"LevelShifterAreaFactor", "", T::Number},
      {"TristateAreaFactor", "", T::Number},
      {"WriteDriverStrength", "", T::Number},
      {"SRAMCellLeakDevices", "", T::Number},
      {"DriverFinalFanout", "", T::Number},
      {"DIBL", "V/V", T::Number},
      {"MIVResistance", "ohm", T::Number},
      {"MIVCapacitancePerUm", "F/um", T::Number},
      {"MIVDiameter", "nm", T::Number},
      {"MIVPitch", "nm", T::Number},
      {"TierHeight", "um", T::Number},

      // memory cell
      {"MemoryCellType", "", T::String},
      {"CellArea", "um^2", T::Number},
      {"CellAspectRatio", "", T::Number},
      {"IsBEOL", "", T::Bool},
      {"TiersPerCell", "", T::Integer},
      {"VBoost", "V", T::Number},
      {"VHold", "V", T::Number},
      {"ReadVoltage", "V", T::Number},
      {"SNCapacitance", "F", T::Number},
      {"Retention", "s", T::Number},
      {"RetentionDerate", "", T::Number},
      {"WritePulseWidth", "ns", T::Number},
      {"WriteCurrent", "A", T::Number},
      {"ResistanceOn", "ohm", T::Number},
      {"ResistanceOff", "ohm", T::Number},
      {"WriteDeviceWidth", "um", T::Number},
      {"ReadDeviceWidth", "um", T::Number},
      {"SenseMarginFraction", "", T::Number},
      {"WriteLevelFraction", "", T::Number},
      {"SRAMFinsPU", "", T::Integer},
      {"SRAMFinsPD", "", T::Integer},
      {"SRAMFinsPG", "", T::Integer},

      // organization
      {"Capacity", "MB", T::Number},
      {"CacheLineSize", "B", T::Integer},
      {"Associativity", "", T::Integer},
      {"AddressBits", "", T::Integer},
      {"CacheAccessMode", "", T::String},
      {"BankKind", "", T::String},
      {"SubarrayRows", "", T::Integer},
      {"SubarrayCols", "", T::Integer},
      {"ActiveSubarrayRows", "", T::Integer},
      {"ActiveSubarrayCols", "", T::Integer},
      {"MatsPerSubarrayRows", "", T::Integer},
      {"MatsPerSubarrayCols", "", T::Integer},
      {"ActiveMatRows", "", T::Integer},
      {"ActiveMatCols", "", T::Integer},
      {"MatRows", "", T::Integer},
      {"MatCols", "", T::Integer},
      {"BitlineMux", "", T::Integer},
      {"SenseAmpMux", "", T::Integer},
      {"WordlineSegments", "", T::Integer},
      {"FoldedBitline", "", T::Bool},
      {"ReferenceRows", "", T::Integer},
      {"Folds", "", T::Integer},
      {"ECCBits", "", T::Integer},
      {"ECCDataBits", "", T::Integer},
      {"SenseLeakageBudget", "", T::Number},
      {"TAUCentralFraction", "", T::Number},
      {"HTTAUWritePenaltyCycles", "", T::Integer},
      {"SliceCount", "", T::Integer},
      {"SliceHopCycles", "", T::Integer},
      {"ClockFrequency", "GHz", T::Number},

      // optimizer
      {"OptimizationTarget", "", T::String},
      {"MaxArea", "mm^2", T::Number},
      {"MaxLatency", "ns", T::Number},
      {"MaxTiers", "", T::Integer},
      {"TopK", "", T::Integer},
      {"MatRowsMin", "", T::Integer},
      {"MatRowsMax", "", T::Integer},
      {"MatColsMin", "", T::Integer},
      {"MatColsMax", "", T::Integer},
      {"MuxMax", "", T::Integer},
      {"GridMax", "", T::Integer},
      {"MatGridMax", "", T::Integer},

      // simulator
      {"HitCycles", "", T::Integer},
      {"MissDetectCycles", "", T::Integer},
      {"WriteCycles", "", T::Integer},
      {"TagAccessCycles", "", T::Integer},
      {"TagBroadcastCycles", "", T::Integer},
      {"RefreshRowCycles", "", T::Integer},
      {"RefreshEnabled", "", T::Bool},
      {"RefreshRowPeriod", "s", T::Number},
      {"RefreshRows", "", T::Integer},
      {"RefreshBlockingScope", "", T::String},
      {"OffchipFillCycles", "", T::Integer},
      {"Subarrays", "", T::Integer},
      {"MatsPerSubarray", "", T::Integer},
      {"HitEnergy", "J", T::Number},
      {"MissEnergy", "J", T::Number},
      {"WriteEnergy", "J", T::Number},
      {"RefreshRowEnergy", "J", T::Number},
      {"StaticPower", "W", T::Number},
      {"MissOffchipMultiplier", "", T::Number},
  };

  // Per-role device parameters.
  for (const char* role : {"LogicN", "LogicP", "AOSWrite", "AOSRead"}) {
    const std::string r = role;
    k.push_back({r + "_IonPerUm", "A/um", T::Number});
    k.push_back({r + "_IoffPerUm", "A/um", T::Number});
    k.push_back({r + "_SS", "mV/dec", T::Number});
    k.push_back({r + "_Vth", "V", T::Number});
    k.push_back({r + "_CgatePerUm", "F/um", T::Number});
    k.push_back({r + "_CgsPerUm", "F/um", T::Number});
    k.push_back({r + "_CgdPerUm", "F/um", T::Number});
    k.push_back({r + "_RonPerUm", "ohm*um", T::Number});
    k.push_back({r + "_AlphaPower", "", T::Number});
    k.push_back({r + "_OverdriveHalf", "V", T::Number});
  }
  // Three-layer interconnect catalog.
  for (const char* layer : {"M1", "M4", "M7"}) {
    const std::string l = layer;
    k.push_back({"WireResistancePerUm_" + l, "ohm/um", T::Number});
    k.push_back({"WireCapacitancePerUm_" + l, "F/um", T::Number});
    k.push_back({"WirePitch_" + l, "nm", T::Number});
  }
  return k;
}

const std::vector<KeySpec>& table() {
  static const std::vector<KeySpec> t = build_key_table();
  return t;
}

const std::unordered_map<std::string, const KeySpec*>& index() {
  static const auto idx = [] {
    std::unordered_map<std::string, const KeySpec*> m;
    for (const auto& spec : table()) m.emplace(spec.name, &spec);
    return m;
  }();
  return idx;
}

bool is_include_key(std::string_view key) {
  return key == "MemoryCellInputFile" || key == "TagMemoryCellInputFile" || key == "TechFile";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool parse_double(std::string_view text, double& out) {
  const std::string s(text);
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_integer(std::string_view text, long long& out) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_bool(std::string_view text, bool& out) {
  const auto s = lower(text);
  if (s == "true" || s == "1" || s == "yes") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    out = false;
    return true;
  }
  return false;
}

std::string type_name(ValueType t) {
  switch (t) {
    case ValueType::Number: return "number";
    case ValueType::Integer: return "integer";
    case ValueType::Bool: return "boolean";
    case ValueType::String: return "string";
    case ValueType::Path: return "path";
  }
  return "value";
}

}  // namespace

std::span<const KeySpec> key_table() { return table(); }

const KeySpec* find_key(std::string_view name) {
  auto it = index().find(std::string(name));
  return it == index().end() ? nullptr : it->second;
}

const ConfigEntry* ConfigDocument::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

void ConfigDocument::fail(std::string_view key, const std::string& message) const {
  if (const auto* e = find(key)) throw Error("-" + e->key + ": " + message, e->file, e->line);
  throw Error("-" + std::string(key) + ": " + message, source, 0);
}

double ConfigDocument::number(std::string_view key) const {
  const auto* e = find(key);
  if (!e) fail(key, "missing required key");
  double v = 0;
  if (!parse_double(e->value, v)) fail(key, "expected a number, got '" + e->value + "'");
  return v;
}

double ConfigDocument::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long ConfigDocument::integer(std::string_view key) const {
  const auto* e = find(key);
  if (!e) fail(key, "missing required key");
  long long v = 0;
  if (!parse_integer(e->value, v)) fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

long long ConfigDocument::integer_or(std::string_view key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ConfigDocument::boolean_or(std::string_view key, bool fallback) const {
  const auto* e = find(key);
  if (!e) return fallback;
  bool v = false;
  if (!parse_bool(e->value, v)) fail(key, "expected true/false, got '" + e->value + "'");
  return v;
}

std::string ConfigDocument::string(std::string_view key) const {
  const auto* e = find(key);
  if (!e) fail(key, "missing required key");
  return e->value;
}

std::string ConfigDocument::string_or(std::string_view key, std::string fallback) const {
  const auto* e = find(key);
  return e ? e->value : std::move(fallback);
}

const ConfigDocument& ConfigDocument::include(std::string_view key) const {
  const auto* doc = include_if(key);
  if (!doc) fail(key, "include file not loaded");
  return *doc;
}

const ConfigDocument* ConfigDocument::include_if(std::string_view key) const {
  auto it = includes.find(std::string(key));
  return it == includes.end() ? nullptr : it->second.get();
}

std::string ConfigDocument::emit() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << '-' << e.key;
    if (!e.unit.empty()) out << " (" << e.unit << ')';
    out << ": " << e.value << '\n';
  }
  return out.str();
}

ConfigDocument parse_config(std::string_view text, const ParseOptions& options) {
  ConfigDocument doc;
  doc.source = options.source_name;
  std::unordered_map<std::string, int> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto c = line.find("//"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    auto syntax = [&](const std::string& why) -> Error {
      return Error("syntax error: " + why, options.source_name, line_no);
    };
    if (line.front() != '-') throw syntax("expected '-Key: value'");
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw syntax("missing ':'");
    std::string_view head = trim(line.substr(1, colon - 1));
    std::string_view value = trim(line.substr(colon + 1));

    std::string unit;
    if (auto open = head.find('('); open != std::string_view::npos) {
      const auto close = head.find(')', open);
      if (close == std::string_view::npos || !trim(head.substr(close + 1)).empty())
        throw syntax("malformed unit");
      unit = std::string(trim(head.substr(open + 1, close - open - 1)));
      head = trim(head.substr(0, open));
    }
    if (head.empty()) throw syntax("empty key");
    if (head.find_first_of(" \t") != std::string_view::npos) throw syntax("key contains whitespace");

    ConfigEntry entry{std::string(head), unit, std::string(value), options.source_name, line_no};
    if (auto [it, fresh] = seen.emplace(entry.key, line_no); !fresh) {
      throw Error("duplicate key -" + entry.key + " (first at line " + std::to_string(it->second) + ")",
                  options.source_name, line_no);
    }
    doc.entries.push_back(std::move(entry));
    if (eol == text.size()) break;
  }

  bool allow_unknown = false;
  if (const auto* e = doc.find("AllowUnknown")) {
    if (!parse_bool(e->value, allow_unknown))
      throw Error("-AllowUnknown: expected true/false", e->file, e->line);
  }

  for (const auto& e : doc.entries) {
    const KeySpec* spec = find_key(e.key);
    if (!spec) {
      if (!allow_unknown) throw Error("unknown key -" + e.key, e.file, e.line);
      doc.warnings.push_back(e.file + ":" + std::to_string(e.line) + ": ignoring unsupported key -" + e.key);
      continue;
    }
    if (!e.unit.empty() && e.unit != spec->unit) {
      const std::string want = spec->unit.empty() ? "no unit" : "(" + spec->unit + ")";
      throw Error("unit mismatch for -" + e.key + ": got (" + e.unit + "), expected " + want, e.file, e.line);
    }
    bool ok = true;
    switch (spec->type) {
      case ValueType::Number: {
        double v;
        ok = parse_double(e.value, v);
        break;
      }
      case ValueType::Integer: {
        long long v;
        ok = parse_integer(e.value, v);
        break;
      }
      case ValueType::Bool: {
        bool v;
        ok = parse_bool(e.value, v);
        break;
      }
      case ValueType::String:
      case ValueType::Path: ok = !e.value.empty(); break;
    }
    if (!ok)
      throw Error("-" + e.key + ": expected " + type_name(spec->type) + ", got '" + e.value + "'", e.file, e.line);
  }

  if (options.follow_includes) {
    for (const auto& e : doc.entries) {
      if (!is_include_key(e.key)) continue;
      std::filesystem::path p = e.value;
      if (p.is_relative()) {
        const auto local = options.base_dir / p;
        p = std::filesystem::exists(local) ? local : data_dir() / p;
      }
      try {
        doc.includes[e.key] = std::make_shared<ConfigDocument>(load_config(p));
      } catch (const Error& inner) {
        if (!inner.file().empty()) throw;
        throw Error(inner.what(), e.file, e.line);
      }
    }
  }
  return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseOptions opts;
  opts.source_name = path.string();
  opts.base_dir = path.parent_path();
  return parse_config(buf.str(), opts);
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("NSCACHE_DATA_DIR"); env && *env) return env;
  return NSCACHE_DEFAULT_DATA_DIR;
}

}  // namespace nscache
