#pragma once

#include <stdexcept>
#include <string>

namespace fusemap {

// Base for all toolkit errors so the CLI can classify them on one stream.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

class RangeError : public Error {
public:
    explicit RangeError(const std::string& msg) : Error("range", msg) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line = 0)
        : Error("parse", line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ConflictError : public Error {
public:
    explicit ConflictError(const std::string& msg) : Error("conflict", msg) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error("parameter", msg) {}
};

class MitigationConflictError : public Error {
public:
    MitigationConflictError(int row_a, int row_b, int bit)
        : Error("mitigation-conflict",
                "pair (" + std::to_string(row_a) + ", " + std::to_string(row_b) +
                    ") bit " + std::to_string(bit) + " cannot be complement-programmed"),
          row_a_(row_a), row_b_(row_b), bit_(bit) {}
    int row_a() const { return row_a_; }
    int row_b() const { return row_b_; }
    int bit() const { return bit_; }

private:
    int row_a_, row_b_, bit_;
};

class InconsistencyError : public Error {
public:
    explicit InconsistencyError(const std::string& msg) : Error("inconsistency", msg) {}
};

class GridNotFoundError : public Error {
public:
    explicit GridNotFoundError(const std::string& msg) : Error("grid-not-found", msg) {}
};

class NoContrastError : public Error {
public:
    explicit NoContrastError(const std::string& msg) : Error("no-contrast", msg) {}
};

class ImageFormatError : public Error {
public:
    explicit ImageFormatError(const std::string& msg) : Error("image-format", msg) {}
};

class LayoutError : public Error {
public:
    explicit LayoutError(const std::string& msg) : Error("layout", msg) {}
};

class PlacementError : public Error {
public:
    explicit PlacementError(const std::string& msg) : Error("placement", msg) {}
};

class OtpViolationError : public Error {
public:
    explicit OtpViolationError(const std::string& msg) : Error("otp-violation", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

}  // namespace fusemap
