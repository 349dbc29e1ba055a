#pragma once

#include <stdexcept>
#include <string>

namespace qgbasin {

class DomainMismatch : public std::invalid_argument {
public:
    explicit DomainMismatch(const std::string& what)
        : std::invalid_argument("domain mismatch: " + what)
    {
    }
};

/// Raised for geometry a closed-form result is not defined on.
class UnsupportedDomain : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace qgbasin
