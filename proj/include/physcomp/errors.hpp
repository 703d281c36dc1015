#pragma once

#include <stdexcept>
#include <string>

namespace physcomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rational power with no real root, a division by zero, or a map
/// evaluated outside the set where its formula makes sense.
class UndefinedValue : public Error {
public:
    explicit UndefinedValue(const std::string& what) : Error("undefined value: " + what) {}
};

/// A comparison stayed undecided at the configured refinement depth.
class PrecisionExhausted : public Error {
public:
    explicit PrecisionExhausted(const std::string& what) : Error("precision exhausted: " + what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

class OutsideDomain : public Error {
public:
    explicit OutsideDomain(const std::string& what) : Error("outside domain: " + what) {}
};

class UnsupportedPartitionClass : public Error {
public:
    explicit UnsupportedPartitionClass(const std::string& what)
        : Error("unsupported partition class: " + what) {}
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what) : Error("invalid parameter: " + what) {}
};

class SymbolOutsideAlphabet : public Error {
public:
    explicit SymbolOutsideAlphabet(const std::string& what)
        : Error("symbol outside alphabet: " + what) {}
};

class SymbolOutsideScheme : public Error {
public:
    explicit SymbolOutsideScheme(const std::string& what)
        : Error("symbol outside encoding scheme: " + what) {}
};

}  // namespace physcomp
