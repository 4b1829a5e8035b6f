#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Line-oriented `key = value` config format shared by experiment configs and
// scene description files: one pair per line, `#` starts a comment, blank
// lines ignored, keys are dot-paths. Errors carry 1-based line numbers.
namespace nujam::kvconfig {

struct Entry {
  int line = 0;
  std::string key;
  std::string value;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Entry> parse(const std::string& text);

// Converters that reject trailing junk and report the offending line.
double to_double(const Entry& e);
long long to_int(const Entry& e);
std::uint64_t to_uint64(const Entry& e);
bool to_bool(const Entry& e);  // on/off/true/false
std::vector<double> to_double_list(const Entry& e);    // comma-separated
std::vector<std::string> to_string_list(const Entry& e);

[[noreturn]] void fail(const Entry& e, const std::string& message);

}  // namespace nujam::kvconfig
