#pragma once

#include <stdexcept>
#include <string>

namespace mixbound {

// Process exit codes used by the command-line tool. Every library error maps
// onto one of these.
enum class ExitCode : int {
    ok = 0,
    internal = 1,
    parse = 2,
    limits = 3,
    domain = 4,
    precondition = 5,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

#define MIXBOUND_DEFINE_ERROR(Name, Code)                                                   \
    class Name : public Error {                                                             \
    public:                                                                                 \
        explicit Name(const std::string& what) : Error(ExitCode::Code, #Name ": " + what) {} \
    }

MIXBOUND_DEFINE_ERROR(ParseError, parse);
MIXBOUND_DEFINE_ERROR(EnumerationLimitExceeded, limits);
MIXBOUND_DEFINE_ERROR(OptimizationLimitExceeded, limits);
MIXBOUND_DEFINE_ERROR(DomainError, domain);
MIXBOUND_DEFINE_ERROR(InvalidDistribution, domain);
MIXBOUND_DEFINE_ERROR(SpaceMismatch, domain);
MIXBOUND_DEFINE_ERROR(LengthMismatch, domain);
MIXBOUND_DEFINE_ERROR(IndexOutOfRange, domain);
MIXBOUND_DEFINE_ERROR(SupportMismatch, domain);
MIXBOUND_DEFINE_ERROR(ZeroProbabilityPrefix, precondition);
MIXBOUND_DEFINE_ERROR(PreconditionFailed, precondition);
MIXBOUND_DEFINE_ERROR(QuadratureFailure, internal);
MIXBOUND_DEFINE_ERROR(NonConvergence, internal);

#undef MIXBOUND_DEFINE_ERROR

}  // namespace mixbound
