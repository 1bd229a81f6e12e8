#pragma once

#include <stdexcept>
#include <string>

namespace kinephen {

// Input-side failures (bad files, bad schema, bad values). CLI exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingColumn : InputError {
    explicit MissingColumn(const std::string& column)
        : InputError("missing required column: " + column), column(column) {}
    std::string column;
};

struct MalformedRow : InputError {
    MalformedRow(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

struct NonMonotonicTime : InputError {
    NonMonotonicTime(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

// Data exists but cannot support the requested computation. CLI exit code 3.
struct DegenerateDataset : std::runtime_error {
    explicit DegenerateDataset(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooFewSubjects : DegenerateDataset {
    explicit TooFewSubjects(const std::string& msg) : DegenerateDataset(msg) {}
};

// Everything else. CLI exit code 4.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kinephen
