#include "seqtrace/numfmt.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace seqtrace::numfmt {

namespace {

std::string to_chars_string(double value, std::chars_format fmt, int precision) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt, precision);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string exact(double value) { return to_chars_string(value, std::chars_format::general, 17); }

std::string fixed(double value, int digits) {
  std::string s = to_chars_string(value, std::chars_format::fixed, digits);
  // "-0.00" reads badly in tables
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string general(double value, int digits) {
  return to_chars_string(value, std::chars_format::general, digits);
}

std::optional<double> parse(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const std::string up = upper(token);
  if (up == "INF" || up == "+INF" || up == "INFINITY") return HUGE_VAL;
  if (up == "-INF" || up == "-INFINITY") return -HUGE_VAL;
  std::string_view body = token;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(body.data(), body.data() + body.size(), value);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace seqtrace::numfmt
