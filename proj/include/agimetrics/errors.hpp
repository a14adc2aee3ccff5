#pragma once

#include <stdexcept>
#include <string>

namespace agimetrics {

// Bad input data or configuration: malformed files, schema violations,
// samples too short to work with. CLI exit code 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Math-domain violations and convergence failures. CLI exit code 2.
class numeric_error : public std::domain_error {
public:
    explicit numeric_error(const std::string& what) : std::domain_error(what) {}
};

}  // namespace agimetrics
