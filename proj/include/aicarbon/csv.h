#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aicarbon::csv {

/// Splits one CSV line. Supports double-quoted fields with "" escapes;
/// no embedded newlines.
std::vector<std::string> split_line(std::string_view line);

std::string trim(std::string_view text);

/// Strict numeric parse of the whole (trimmed) field.
std::optional<double> parse_double(std::string_view text);

/// Reads a header line and maps column name to index.
class Reader
{
public:
    explicit Reader(std::istream& input);

    const std::vector<std::string>& header() const noexcept { return _header; }
    std::optional<std::size_t> column(std::string_view name) const;

    /// Next non-blank data row; false at end of input. lineNumber() is the
    /// 1-based line of the row just returned (header is line 1).
    bool next(std::vector<std::string>& fields);
    std::size_t line_number() const noexcept { return _lineNumber; }

private:
    std::istream& _input;
    std::vector<std::string> _header;
    std::size_t _lineNumber = 0;
};

}
