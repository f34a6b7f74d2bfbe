#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aicarbon::report {

enum class Format
{
    Csv,
    Json,
    Markdown,
};

/// "csv", "json" or "md".
Format parse_format(std::string_view text);

struct Column
{
    std::string name;
    /// Digits after the decimal point for floating-point cells; negative
    /// means shortest round-trip representation.
    int precision = -1;
};

using Cell = std::variant<std::string, double, std::int64_t>;

/// Tabular output. Cells are converted to text once, so every format shows
/// the same digits.
class Table
{
public:
    Table(std::string name, std::vector<Column> columns);

    void add_row(const std::vector<Cell>& cells);

    const std::string& name() const noexcept { return _name; }
    const std::vector<Column>& columns() const noexcept { return _columns; }
    std::size_t row_count() const noexcept { return _rows.size(); }

    /// Rendered text of a cell.
    const std::string& text(std::size_t row, std::size_t column) const { return _rows.at(row).at(column).text; }
    const std::string& text(std::size_t row, std::string_view column) const;
    bool is_numeric(std::size_t row, std::size_t column) const { return _rows.at(row).at(column).numeric; }

private:
    struct Rendered
    {
        std::string text;
        bool numeric = false;
    };

    std::string _name;
    std::vector<Column> _columns;
    std::vector<std::vector<Rendered>> _rows;
};

void render(std::ostream& out, const Table& table, Format format);

/// Several tables in one stream: CSV blocks separated by "# name" lines, one
/// JSON object keyed by table name, or Markdown sections.
void render(std::ostream& out, const std::vector<Table>& tables, Format format);

std::string_view extension(Format format) noexcept;

}
