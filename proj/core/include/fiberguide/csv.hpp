#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fiberguide {

/// Plain comma-separated table: mandatory header, no quoting, '.' decimal.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws IoError if absent.
    std::size_t column(std::string_view name) const;
};

/// Shortest representation that parses back to the same double. NaN is
/// written as an empty cell.
std::string format_number(double value);
std::string format_count(std::uint64_t value);

/// Strict parse of a whole cell; an empty cell reads as NaN.
double parse_number(std::string_view cell);
std::uint64_t parse_count(std::string_view cell);

/// Serialises with '\n' line endings and a trailing newline.
std::string to_csv_text(const CsvTable& table);
/// Parses text produced by to_csv_text (also tolerates '\r\n'). Every row
/// must have as many cells as the header.
CsvTable parse_csv_text(std::string_view text, const std::string& origin = "<memory>");

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace fiberguide
