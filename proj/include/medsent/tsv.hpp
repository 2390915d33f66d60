#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medsent {

// Tab-separated tables. Backslash, tab, CR and LF inside a field are
// escaped as \\, \t, \r, \n so every record stays on one line.
std::string tsv_escape(std::string_view field);
std::string tsv_unescape(std::string_view field);
std::vector<std::string> split_tsv_line(std::string_view line);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ParseError when absent.
  std::size_t column(std::string_view name) const;
};

// The first line is the header. Blank lines are skipped; rows whose width
// differs from the header raise ParseError.
Table read_tsv(std::istream& in, std::string name = {});
void write_tsv(std::ostream& out, const Table& table);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Lines of a config-style text file with '#' comments and blanks dropped.
std::vector<std::string> config_lines(std::string_view content);

std::string format_fixed(double value, int decimals);
// Scientific notation with `significant` digits, e.g. 1.25e-18.
std::string format_sci(double value, int significant = 3);
// share in [0,1] rendered as a percentage with one decimal.
std::string format_percent(double share);

// Rounds each value to `decimals` places so the rounded values add up to the
// rounded total (largest remainder; earlier index wins ties). Each result is
// the value rounded down or up.
std::vector<double> round_preserving_total(std::span<const double> values, int decimals);

}  // namespace medsent
