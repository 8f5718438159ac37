#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crokage {

/// Bad user input: flags, request fields, empty queries.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing, corrupt or mutually incompatible artifact files.
class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unrecoverable input stream problem, located by byte offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace crokage
