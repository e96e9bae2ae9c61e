#pragma once

#include <stdexcept>
#include <string>

namespace aiskit {

/// Raised when a caller breaks a documented precondition (unsorted input,
/// non-positive tolerance, ...). Distinct from malformed-data errors.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed external input: files, query parameters, text fields.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aiskit
