#include "wrinkle/keyvalue.hpp"

#include <cmath>
#include <sstream>

#include "wrinkle/error.hpp"

namespace wrinkle {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const KeyValue& kv, const std::string& why) {
  throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' " + why);
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (kv.key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<double> parse_numbers(const KeyValue& kv) {
  std::istringstream is(kv.value);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      bad(kv, "has non-numeric value '" + tok + "'");
    }
  }
  return out;
}

double parse_number(const KeyValue& kv) {
  const auto v = parse_numbers(kv);
  if (v.size() != 1) bad(kv, "expects exactly one number");
  return v[0];
}

long long parse_integer(const KeyValue& kv) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(kv.value, &pos, 0);
    if (pos != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    bad(kv, "expects an integer");
  }
}

bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
  bad(kv, "expects true/false");
}

}  // namespace wrinkle
