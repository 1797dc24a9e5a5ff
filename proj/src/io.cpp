#include "regpot/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "regpot/error.hpp"

namespace regpot {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double out = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError("io", "not a number: '" + std::string(text) + "'");
    return out;
}

long long parse_integer(std::string_view text) {
    long long out = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError("io", "not an integer: '" + std::string(text) + "'");
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("io", "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ValidationError("io", "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ValidationError("io", "rename to " + path.string() + " failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("io", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw ValidationError("io", "csv row width does not match header");
    cells_.push_back(std::move(row));
}

void CsvTable::add_row(std::span<const double> row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double x : row) cells.push_back(format_double(x));
    add_row(std::move(cells));
}

int CsvTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::column(std::string_view name) const {
    const int c = column_index(name);
    if (c < 0) throw ValidationError("io", "csv has no column '" + std::string(name) + "'");
    std::vector<double> out;
    out.reserve(cells_.size());
    for (const auto& row : cells_) out.push_back(parse_double(row[static_cast<std::size_t>(c)]));
    return out;
}

std::vector<double> CsvTable::row_values(std::size_t row) const {
    std::vector<double> out;
    for (const auto& s : cells_.at(row)) out.push_back(parse_double(s));
    return out;
}

namespace {

void append_field(std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        append_field(out, row[i]);
    }
    out += '\n';
}

}  // namespace

std::string CsvTable::to_string() const {
    std::string out;
    append_row(out, header_);
    for (const auto& row : cells_) append_row(out, row);
    return out;
}

CsvTable CsvTable::parse(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                record.push_back(std::move(field));
                records.push_back(std::move(record));
            }
            record.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ValidationError("io", "unterminated quoted csv field");
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) throw ValidationError("io", "csv has no header row");

    CsvTable table(std::move(records.front()));
    for (std::size_t r = 1; r < records.size(); ++r) table.add_row(std::move(records[r]));
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_file_atomic(path, table.to_string()); }

CsvTable read_csv(const std::filesystem::path& path) { return CsvTable::parse(read_file(path)); }

CsvTable columns_table(std::vector<std::string> names, const std::vector<std::span<const double>>& columns) {
    if (names.size() != columns.size()) throw ValidationError("io", "column names and data differ in count");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw ValidationError("io", "columns differ in length");
    CsvTable table(std::move(names));
    std::vector<double> row(columns.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) row[j] = columns[j][i];
        table.add_row(row);
    }
    return table;
}

}  // namespace regpot
