#pragma once

#include <stdexcept>
#include <string>

namespace curvespec {

// Bad arguments, malformed input files, out-of-range parameters (CLI exit code 2).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A mathematical precondition of the construction does not hold for this input:
// non-normal matrix, non-cyclic vector, resolution too coarse (CLI exit code 3).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Runs f, prefixing any ValidationError/PreconditionError message with "[stage] ".
template <class F>
decltype(auto) with_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const PreconditionError& e) {
        throw PreconditionError(std::string("[") + stage + "] " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("[") + stage + "] " + e.what());
    }
}

}  // namespace curvespec
