#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace direx {

// Every failure the library can signal carries a stable machine-readable code
// next to the human-readable message.  The CLI maps codes straight into its
// JSON error envelope, so changing a code string is a breaking change.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ZeroComponentError : public Error {
public:
    explicit ZeroComponentError(const std::string& m) : Error("ZERO_COMPONENT", m) {}
};

class NotUnitError : public Error {
public:
    explicit NotUnitError(const std::string& m) : Error("NOT_UNIT", m) {}
};

class DimensionMismatchError : public Error {
public:
    explicit DimensionMismatchError(const std::string& m) : Error("DIMENSION_MISMATCH", m) {}
};

class DimensionTooLargeError : public Error {
public:
    explicit DimensionTooLargeError(const std::string& m) : Error("DIMENSION_TOO_LARGE", m) {}
};

class ConfigInvalidError : public Error {
public:
    explicit ConfigInvalidError(const std::string& m) : Error("CONFIG_INVALID", m) {}
};

class DegenerateCovarianceError : public Error {
public:
    explicit DegenerateCovarianceError(const std::string& m) : Error("DEGENERATE_COVARIANCE", m) {}
};

class AdmissibilityError : public Error {
public:
    explicit AdmissibilityError(const std::string& m) : Error("ADMISSIBILITY", m) {}
};

class QOutOfRangeError : public Error {
public:
    explicit QOutOfRangeError(const std::string& m) : Error("Q_OUT_OF_RANGE", m) {}
};

class NonFiniteMomentError : public Error {
public:
    explicit NonFiniteMomentError(const std::string& m) : Error("NON_FINITE_MOMENT", m) {}
};

class OutOfUnitSquareError : public Error {
public:
    explicit OutOfUnitSquareError(const std::string& m) : Error("OUT_OF_UNIT_SQUARE", m) {}
};

class BisectionFailureError : public Error {
public:
    explicit BisectionFailureError(const std::string& m) : Error("BISECTION_FAILURE", m) {}
};

class TreeInvalidError : public Error {
public:
    explicit TreeInvalidError(const std::string& m) : Error("TREE_INVALID", m) {}
};

class ResolutionTooCoarseError : public Error {
public:
    explicit ResolutionTooCoarseError(const std::string& m) : Error("RESOLUTION_TOO_COARSE", m) {}
};

class SpecInvalidError : public Error {
public:
    explicit SpecInvalidError(const std::string& m) : Error("SPEC_INVALID", m) {}
};

class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& m) : Error("LENGTH_MISMATCH", m) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& m) : Error("PARSE_ERROR", m) {}
};

class NonFiniteValueError : public Error {
public:
    explicit NonFiniteValueError(const std::string& m) : Error("NON_FINITE_VALUE", m) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error("IO_ERROR", m) {}
};

}  // namespace direx
