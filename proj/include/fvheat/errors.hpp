// errors.hpp: Exception types that map onto distinct CLI exit codes

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fvheat {

// A run would exceed a configured resource limit (path-pair budget, Hilbert-space cap).
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, double required, double limit)
        : std::runtime_error(what), required_(required), limit_(limit) {}

    double required() const { return required_; }
    double limit() const { return limit_; }

private:
    double required_;
    double limit_;
};

// A truncated Fock space keeps too much thermal weight in its top level.
class LeakageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fvheat
