#include "nujam/kvconfig.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace nujam::kvconfig {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

void fail(const Entry& e, const std::string& message) {
  std::ostringstream os;
  os << "line " << e.line << ": " << message;
  throw ParseError(os.str());
}

std::vector<Entry> parse(const std::string& text) {
  std::vector<Entry> out;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected 'key = value'";
      throw ParseError(os.str());
    }
    Entry e;
    e.line = line_no;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    if (e.key.empty()) fail(e, "empty key");
    out.push_back(std::move(e));
  }
  return out;
}

double to_double(const Entry& e) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    fail(e, "expected a number for '" + e.key + "', got '" + e.value + "'");
  return v;
}

long long to_int(const Entry& e) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    fail(e, "expected an integer for '" + e.key + "', got '" + e.value + "'");
  return v;
}

std::uint64_t to_uint64(const Entry& e) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE || e.value.find('-') != std::string::npos)
    fail(e, "expected an unsigned integer for '" + e.key + "', got '" + e.value + "'");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.value == "on" || e.value == "true") return true;
  if (e.value == "off" || e.value == "false") return false;
  fail(e, "expected on/off for '" + e.key + "', got '" + e.value + "'");
}

std::vector<std::string> to_string_list(const Entry& e) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(e.value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(e, "empty list item in '" + e.key + "'");
    out.push_back(item);
  }
  if (out.empty()) fail(e, "empty list for '" + e.key + "'");
  return out;
}

std::vector<double> to_double_list(const Entry& e) {
  std::vector<double> out;
  for (const std::string& s : to_string_list(e)) {
    Entry item{e.line, e.key, s};
    out.push_back(to_double(item));
  }
  return out;
}

}  // namespace nujam::kvconfig
