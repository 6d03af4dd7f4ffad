#include <doctest.h>

#include "nscache/config.hpp"

using namespace nscache;

TEST_CASE("a key with no unit parses to its value") {
  const ConfigDocument d = parse_config("-Associativity: 16\n");
  REQUIRE(d.entries.size() == 1);
  CHECK(d.integer("Associativity") == 16);
}

TEST_CASE("empty text is an empty document") {
  CHECK(parse_config("").empty());
  CHECK(parse_config("// only a comment\n\n").empty());
}

TEST_CASE("malformed number is a typed error at its line") {
  try {
    parse_config("-Vdd (V): banana\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("unit mismatch, unknown key and duplicates are errors") {
  CHECK_THROWS_AS(parse_config("-Vdd (mV): 0.7\n"), Error);
  CHECK_THROWS_AS(parse_config("-NotAKey: 1\n"), Error);
  try {
    parse_config("-Associativity: 16\n// x\n-Associativity: 8\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("unknown keys become warnings under AllowUnknown") {
  const ConfigDocument d = parse_config("-AllowUnknown: true\n-DestinyOnlyKey: 3\n-Associativity: 4\n");
  CHECK(d.warnings.size() == 1);
  CHECK(d.integer("Associativity") == 4);
}

TEST_CASE("emit then parse reproduces the document") {
  const char* text =
      "// header\n-Capacity (MB): 64\n-CacheAccessMode: Sequential\n-Vdd (V): 0.7\n-FoldedBitline: true\n"
      "-Associativity: 16\n";
  const ConfigDocument a = parse_config(text);
  const ConfigDocument b = parse_config(a.emit());
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].key == b.entries[i].key);
    CHECK(a.entries[i].unit == b.entries[i].unit);
    CHECK(a.entries[i].value == b.entries[i].value);
  }
  CHECK(b.emit() == a.emit());
}

TEST_CASE("every key in the table has a unique name") {
  const auto keys = key_table();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    CHECK(find_key(keys[i].name) == &keys[i]);
  }
}
