#include "aicarbon/table.h"

#include "aicarbon/error.h"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace aicarbon::report {

Format parse_format(std::string_view text)
{
    if (text == "csv") {
        return Format::Csv;
    }
    if (text == "json") {
        return Format::Json;
    }
    if (text == "md" || text == "markdown") {
        return Format::Markdown;
    }
    throw ConfigError("unknown output format '{}' (expected csv, json or md)", text);
}

std::string_view extension(Format format) noexcept
{
    switch (format) {
    case Format::Csv:
        return ".csv";
    case Format::Json:
        return ".json";
    case Format::Markdown:
        return ".md";
    }
    return ".txt";
}

Table::Table(std::string name, std::vector<Column> columns)
: _name(std::move(name))
, _columns(std::move(columns))
{
}

void Table::add_row(const std::vector<Cell>& cells)
{
    if (cells.size() != _columns.size()) {
        throw ComputationError("table '{}': row has {} cells, expected {}", _name, cells.size(), _columns.size());
    }
    std::vector<Rendered> row;
    row.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        if (const auto* s = std::get_if<std::string>(&cell)) {
            row.push_back({*s, false});
        } else if (const auto* n = std::get_if<std::int64_t>(&cell)) {
            row.push_back({fmt::format("{}", *n), true});
        } else {
            const double v = std::get<double>(cell);
            if (!std::isfinite(v)) {
                throw ComputationError("table '{}': non-finite value in column '{}'", _name, _columns[i].name);
            }
            const int p = _columns[i].precision;
            auto text = p < 0 ? fmt::format("{}", v) : fmt::format("{:.{}f}", v, p);
            if (text.starts_with("-") && text.find_first_not_of("-0.") == std::string::npos) {
                text.erase(0, 1);
            }
            row.push_back({std::move(text), true});
        }
    }
    _rows.push_back(std::move(row));
}

const std::string& Table::text(std::size_t row, std::string_view column) const
{
    for (std::size_t i = 0; i < _columns.size(); ++i) {
        if (_columns[i].name == column) {
            return text(row, i);
        }
    }
    throw ComputationError("table '{}' has no column '{}'", _name, column);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    return quoted + '"';
}

std::string json_string(const std::string& s)
{
    return nlohmann::json(s).dump();
}

void render_csv(std::ostream& out, const Table& t)
{
    for (std::size_t c = 0; c < t.columns().size(); ++c) {
        out << (c ? "," : "") << csv_field(t.columns()[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        for (std::size_t c = 0; c < t.columns().size(); ++c) {
            out << (c ? "," : "") << csv_field(t.text(r, c));
        }
        out << '\n';
    }
}

void render_json_rows(std::ostream& out, const Table& t, const char* indent)
{
    out << "[";
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        out << (r ? ",\n" : "\n") << indent << "  {";
        for (std::size_t c = 0; c < t.columns().size(); ++c) {
            out << (c ? ", " : "") << json_string(t.columns()[c].name) << ": ";
            out << (t.is_numeric(r, c) ? t.text(r, c) : json_string(t.text(r, c)));
        }
        out << "}";
    }
    out << (t.row_count() ? "\n" : "") << (t.row_count() ? indent : "") << "]";
}

std::string md_cell(const std::string& s)
{
    std::string escaped;
    for (char c : s) {
        if (c == '|') {
            escaped += '\\';
        }
        escaped += c;
    }
    return escaped;
}

void render_md(std::ostream& out, const Table& t)
{
    out << "|";
    for (const auto& col : t.columns()) {
        out << " " << md_cell(col.name) << " |";
    }
    out << "\n|";
    for (std::size_t c = 0; c < t.columns().size(); ++c) {
        out << " --- |";
    }
    out << "\n";
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        out << "|";
        for (std::size_t c = 0; c < t.columns().size(); ++c) {
            out << " " << md_cell(t.text(r, c)) << " |";
        }
        out << "\n";
    }
}

}

void render(std::ostream& out, const Table& table, Format format)
{
    switch (format) {
    case Format::Csv:
        render_csv(out, table);
        break;
    case Format::Json:
        render_json_rows(out, table, "");
        out << "\n";
        break;
    case Format::Markdown:
        render_md(out, table);
        break;
    }
}

void render(std::ostream& out, const std::vector<Table>& tables, Format format)
{
    if (format == Format::Json) {
        out << "{";
        for (std::size_t i = 0; i < tables.size(); ++i) {
            out << (i ? ",\n" : "\n") << "  " << json_string(tables[i].name()) << ": ";
            render_json_rows(out, tables[i], "  ");
        }
        out << "\n}\n";
        return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) {
            out << "\n";
        }
        out << (format == Format::Csv ? "# " : "### ") << tables[i].name() << "\n";
        if (format == Format::Markdown) {
            out << "\n";
        }
        render(out, tables[i], format);
    }
}

}
