#ifndef HYPERMATCH_ERRORS_HPP
#define HYPERMATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hypermatch {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooLargeError : Error { using Error::Error; };
struct NonIntegerCopyCountError : Error { using Error::Error; };
struct InfeasibleParamsError : Error { using Error::Error; };
struct InvalidPerturbationError : Error { using Error::Error; };
struct NotProperError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct EstimatorAuditError : Error { using Error::Error; };
struct A1ViolationError : EstimatorAuditError { using EstimatorAuditError::EstimatorAuditError; };
struct A2ViolationError : EstimatorAuditError { using EstimatorAuditError::EstimatorAuditError; };
struct DegenerateParamsError : Error { using Error::Error; };
struct ClassMismatchError : Error { using Error::Error; };
struct EnumerationOverflowError : Error { using Error::Error; };
struct NotDisjointError : Error { using Error::Error; };
struct NotValidAugmentationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

}  // namespace hypermatch

#endif
