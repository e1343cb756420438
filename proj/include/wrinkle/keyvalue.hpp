#pragma once

#include <istream>
#include <string>
#include <vector>

namespace wrinkle {

/// One `key = value` line of a plain-text settings file.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Keys may repeat (callers decide whether that is allowed).
std::vector<KeyValue> parse_key_values(std::istream& in);

/// Whitespace-separated numbers of a value; throws ConfigError naming the key.
std::vector<double> parse_numbers(const KeyValue& kv);
double parse_number(const KeyValue& kv);
long long parse_integer(const KeyValue& kv);
bool parse_bool(const KeyValue& kv);

}  // namespace wrinkle
