#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tnr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or incompatible inputs (e.g. descriptor dimension mismatch).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A frame whose features cannot produce a usable descriptor.
class UnusableFrameError : public Error {
public:
    using Error::Error;
};

/// A taught path that cannot be navigated (fewer than two keyframes, broken ordering).
class UnusablePathError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents. Carries the byte offset where parsing failed.
class ParseError : public Error {
public:
    ParseError(std::string source, std::uint64_t offset, const std::string& what)
        : Error(source + " @ byte " + std::to_string(offset) + ": " + what),
          source_(std::move(source)), offset_(offset) {}

    const std::string& source() const { return source_; }
    std::uint64_t offset() const { return offset_; }

private:
    std::string source_;
    std::uint64_t offset_;
};

}  // namespace tnr
