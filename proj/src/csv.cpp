#include "aicarbon/csv.h"

#include <cerrno>
#include <cmath>
#include <cstdlib>

namespace aicarbon::csv {

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;

    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view text)
{
    const auto s = trim(text);
    if (s.empty()) {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

Reader::Reader(std::istream& input)
: _input(input)
{
    std::string line;
    while (std::getline(_input, line)) {
        ++_lineNumber;
        if (!trim(line).empty()) {
            for (auto& name : split_line(line)) {
                _header.push_back(trim(name));
            }
            break;
        }
    }
}

std::optional<std::size_t> Reader::column(std::string_view name) const
{
    for (std::size_t i = 0; i < _header.size(); ++i) {
        if (_header[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

bool Reader::next(std::vector<std::string>& fields)
{
    std::string line;
    while (std::getline(_input, line)) {
        ++_lineNumber;
        if (trim(line).empty()) {
            continue;
        }
        fields = split_line(line);
        return true;
    }
    return false;
}

}
