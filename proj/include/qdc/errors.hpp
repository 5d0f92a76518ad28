#pragma once

#include <stdexcept>
#include <string>

namespace qdc {

// Malformed input: bad dimensions, invalid parameters, unknown config keys.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A documented precondition on a numerical routine was violated
// (non-Hermitian input to herm_expm, non-physical state, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// The model left its range of validity, e.g. undefined steady state.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdc
