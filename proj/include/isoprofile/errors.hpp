#pragma once

#include <stdexcept>
#include <string>

namespace isoprofile {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ISOPROFILE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

ISOPROFILE_ERROR(ParseError);
ISOPROFILE_ERROR(MalformedGraph);
ISOPROFILE_ERROR(TrivalenceViolation);
ISOPROFILE_ERROR(DuplicateCriticalValue);
ISOPROFILE_ERROR(ValueGap);
ISOPROFILE_ERROR(EmptyLevel);
ISOPROFILE_ERROR(NuTooSmall);
ISOPROFILE_ERROR(BadParameters);
ISOPROFILE_ERROR(GluingMismatch);
ISOPROFILE_ERROR(OutOfChart);
ISOPROFILE_ERROR(NoSpareComponent);
ISOPROFILE_ERROR(NotSublevel);
ISOPROFILE_ERROR(NonPositiveProfile);
ISOPROFILE_ERROR(BadOrigin);
ISOPROFILE_ERROR(ConstraintViolation);
ISOPROFILE_ERROR(HypothesisFailure);
ISOPROFILE_ERROR(DomainError);
ISOPROFILE_ERROR(NonConvexProfile);
ISOPROFILE_ERROR(NoBlowup);
ISOPROFILE_ERROR(TargetUnreachable);

#undef ISOPROFILE_ERROR

}  // namespace isoprofile
