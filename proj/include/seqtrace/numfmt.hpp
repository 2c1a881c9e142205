#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent number formatting shared by every text emitter.
namespace seqtrace::numfmt {

// Shortest-safe round-trip form: 17 significant digits, `inf`/`-inf` for infinities.
std::string exact(double value);

// Fixed notation with `digits` decimals.
std::string fixed(double value, int digits);

// General notation with `digits` significant digits.
std::string general(double value, int digits);

// Accepts decimal/scientific notation and `inf`/`-inf` (case-insensitive).
std::optional<double> parse(std::string_view token);

std::vector<std::string_view> split_ws(std::string_view line);

std::string upper(std::string_view s);

}  // namespace seqtrace::numfmt
