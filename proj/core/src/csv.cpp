#include "fiberguide/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fiberguide/errors.hpp"

namespace fiberguide {

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IoError("<csv>", "missing column '" + std::string(name) + "'");
}

std::string format_number(double value)
{
    if (std::isnan(value)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_count(std::uint64_t value)
{
    return std::to_string(value);
}

double parse_number(std::string_view cell)
{
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParameterError("not a number: '" + std::string(cell) + "'");
    }
    return v;
}

std::uint64_t parse_count(std::string_view cell)
{
    std::uint64_t v = 0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (cell.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw ParameterError("not a count: '" + std::string(cell) + "'");
    }
    return v;
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\"\r\n") != std::string::npos) {
            throw ParameterError("csv cell needs quoting, which is unsupported: '" + cells[i] + "'");
        }
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

std::vector<std::string> split_row(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            return cells;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

std::string to_csv_text(const CsvTable& table)
{
    std::string out;
    append_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw ParameterError("csv row width differs from header");
        append_row(out, row);
    }
    return out;
}

CsvTable parse_csv_text(std::string_view text, const std::string& origin)
{
    CsvTable table;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw IoError(origin, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                      " cells, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw IoError(origin, "missing header row");
    return table;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path.string(), "read failed");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

CsvTable read_csv(const std::filesystem::path& path)
{
    return parse_csv_text(read_text_file(path), path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    write_text_file(path, to_csv_text(table));
}

} // namespace fiberguide
