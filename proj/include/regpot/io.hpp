#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regpot {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Strict parse of a full field; ValidationError on trailing garbage.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

class CsvTable {
public:
    CsvTable() = default;
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return cells_.size(); }
    std::size_t columns() const noexcept { return header_.size(); }

    void add_row(std::vector<std::string> row);
    void add_row(std::span<const double> row);

    const std::string& cell(std::size_t row, std::size_t col) const { return cells_.at(row).at(col); }
    int column_index(std::string_view name) const;  // -1 when absent
    std::vector<double> column(std::string_view name) const;
    std::vector<double> row_values(std::size_t row) const;

    /// RFC-4180 subset: header row, LF line ends, fields quoted only when needed.
    std::string to_string() const;
    static CsvTable parse(std::string_view text);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> cells_;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Table from equal-length numeric columns.
CsvTable columns_table(std::vector<std::string> names, const std::vector<std::span<const double>>& columns);

}  // namespace regpot
