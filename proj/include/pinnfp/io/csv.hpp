#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pinnfp::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Whole-field parse; throws ParseError tagged with `line` on junk.
double parse_double(std::string_view text, std::size_t line);

std::vector<std::string_view> split_csv_line(std::string_view line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  int column(std::string_view name) const;  // -1 if absent
};

/// Reads a header plus rows; rows must have as many cells as the header. Blank lines are skipped.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

/// Joins cells with commas and terminates with '\n'.
std::string csv_row(const std::vector<std::string>& cells);

/// Writes `content` to `path`. If the file exists with different bytes and `force` is false, throws
/// ConfigError instead of overwriting; identical content is left untouched.
void write_file_guarded(const std::filesystem::path& path, std::string_view content, bool force);

std::string read_file(const std::filesystem::path& path);

}  // namespace pinnfp::io
