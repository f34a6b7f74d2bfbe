#pragma once

#include <fmt/format.h>

#include <stdexcept>
#include <string>

namespace aicarbon {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass to a process exit code.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;

    template <typename... Args>
    explicit Error(fmt::format_string<Args...> format, Args&&... args)
    : std::runtime_error(fmt::format(format, std::forward<Args>(args)...))
    {
    }
};

/// Malformed or inconsistent configuration (missing keys, bad values, unknown names).
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Input files that cannot be read or parsed as a whole.
class IngestError : public Error
{
public:
    using Error::Error;
};

/// A computation whose preconditions do not hold (empty window, zero FLOPs, ...).
class ComputationError : public Error
{
public:
    using Error::Error;
};

enum class ExitCode : int
{
    Success = 0,
    Usage = 1,
    Config = 2,
    Ingest = 3,
    Computation = 4,
};

ExitCode exit_code_for(const std::exception& e) noexcept;

}
