#pragma once

// Error types thrown by the library. Every failure mode that a caller can
// meaningfully react to gets its own type; all of them derive from glv::Error
// so a CLI can map the whole family onto exit codes.

#include <stdexcept>
#include <string>

namespace glv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction of a system from coefficients.
struct EmptyDimension : Error {
    EmptyDimension() : Error("coefficient vector is empty") {}
};

struct ZeroCoefficients : Error {
    ZeroCoefficients() : Error("all coefficients are zero; the system is undefined") {}
};

struct DimensionMismatch : Error {
    DimensionMismatch(int expected, int got)
        : Error("state has dimension " + std::to_string(got) +
                ", system expects " + std::to_string(expected)) {}
};

struct ZeroScale : Error {
    explicit ZeroScale(int index)
        : Error("rescale factor c_" + std::to_string(index) + " is zero"), index(index) {}
    int index;
};

struct IndexOutOfRange : Error {
    IndexOutOfRange(const std::string& what_index, int value, int lo, int hi)
        : Error(what_index + " = " + std::to_string(value) + " outside [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

// Evaluation of rational first integrals.
struct PoleError : Error {
    PoleError(const std::string& fn, const std::string& factor, int index)
        : Error(fn + ": factor " + factor + " vanishes"), index(index) {}
    int index;  // 1-based index of the vanishing coordinate or cumulative sum
};

struct EvenDimension : Error {
    explicit EvenDimension(int n)
        : Error("operation requires odd dimension, got n = " + std::to_string(n)) {}
};

struct NotApplicable : Error {
    using Error::Error;
};

struct EmptySet : Error {
    EmptySet() : Error("integral set is empty") {}
};

// Dynamics.
struct BlowupError : Error {
    BlowupError(int index, double critical_time)
        : Error("solution blows up before the requested time: denominator " +
                std::to_string(index) + " vanishes at t = " + std::to_string(critical_time)),
          index(index), critical_time(critical_time) {}
    int index;            // 1-based index of the cumulative sum whose denominator vanishes
    double critical_time; // nearest pole crossing in the direction of integration
};

struct MapPoleError : Error {
    explicit MapPoleError(int index)
        : Error("map denominator " + std::to_string(index) + " vanishes at this state"),
          index(index) {}
    int index;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    explicit SingularSystem(double pivot_ratio)
        : Error("linear system is singular to working precision (pivot ratio " +
                std::to_string(pivot_ratio) + ")") {}
};

struct NumericalJacobianFailure : Error {
    using Error::Error;
};

struct IllegalOverride : Error {
    IllegalOverride(int i, int j)
        : Error("bracket override at pair (" + std::to_string(i) + ", " + std::to_string(j) +
                ") would change the equations of motion") {}
};

// Harness.
struct BadRange : Error {
    BadRange(double lo, double hi)
        : Error("empty sampling range [" + std::to_string(lo) + ", " + std::to_string(hi) + ")") {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& field, const std::string& why)
        : Error("config field '" + field + "': " + why), field(field) {}
    std::string field;
};

struct IoError : Error {
    explicit IoError(const std::string& path, const std::string& why)
        : Error(path + ": " + why) {}
};

} // namespace glv
