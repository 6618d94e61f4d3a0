#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace blockcalc::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Shortest round-trippable form (std::to_chars); `precision` selects %g-style digits.
std::string fmt(double v);
std::string fmt(double v, int precision);

// Strict parsers; throw std::invalid_argument on trailing garbage.
double parse_double(std::string_view s);
std::uint64_t parse_uint(std::string_view s);

// Writes `content` to `path` with LF newlines; throws ConfigError if the file
// can not be opened.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace blockcalc::text
