#pragma once

#include <stdexcept>
#include <string>

namespace maxprod {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: bad argument shapes, out-of-domain points, invalid parameters.
class ContractError : public Error {
public:
    using Error::Error;
};

// Malformed or unusable input data (files, series, images, non-finite samples).
class DataError : public Error {
public:
    using Error::Error;
};

// No valid lattice index exists on some axis: n is too small for the domain.
class EmptyIndexSetError : public DataError {
public:
    using DataError::DataError;
};

// The evaluation denominator collapsed; signals a kernel that violates the
// admissibility conditions. Unreachable for the built-in kernels.
class DegenerateDenominatorError : public Error {
public:
    using Error::Error;
};

}  // namespace maxprod
