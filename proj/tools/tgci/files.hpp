#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tgci::cli {

/// Whole file as text; throws UsageError naming the path when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, creating
/// parent directories as needed.
void write_atomic(const std::filesystem::path& path, std::string_view text);

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Flat `key = value` lines; `#` starts a comment line. Keys may be written
/// with or without a leading "--". Throws ParseError on malformed lines and
/// repeated keys.
std::vector<ConfigEntry> parse_config(std::string_view text);

}  // namespace tgci::cli
