#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hexmeter {

// Base for every error the toolkit raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or insufficient input data (malformed files, ranges, too few lines).
class DataError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not produce a trustworthy answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

class XmlError : public DataError {
public:
    XmlError(const std::string& what, std::size_t offset)
        : DataError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace hexmeter
