#ifndef REGPROB_ERRORS_HPP
#define REGPROB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace regprob {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// exactmath
struct SingularMatrixError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};

// grammar / automata parsing
struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};
struct UndeclaredSymbolError : ParseError {
    using ParseError::ParseError;
};
struct NonpositiveWeightError : ParseError {
    using ParseError::ParseError;
};
struct DuplicateTransitionError : ParseError {
    using ParseError::ParseError;
};
struct PartialDeltaError : Error {
    using Error::Error;
};
struct UnknownSymbolError : Error {
    using Error::Error;
};
struct UnknownNonterminalError : Error {
    using Error::Error;
};
struct AlphabetMismatchError : Error {
    using Error::Error;
};

// analysis / solver
struct NotPpsError : Error {
    using Error::Error;
};
struct NotScfgError : Error {
    using Error::Error;
};
struct NotProperError : Error {
    using Error::Error;
};
struct NoInternalLRuleError : Error {
    using Error::Error;
};
struct SingularJacobianError : Error {
    using Error::Error;
};
struct IterationBudgetExceededError : Error {
    using Error::Error;
};

// balance
struct NotBalancedError : Error {
    using Error::Error;
};

// estimation
struct UnusedRuleError : Error {
    using Error::Error;
};
struct UnusedNonterminalError : Error {
    using Error::Error;
};
struct ZeroDenominatorError : Error {
    using Error::Error;
};
struct InvalidDerivationError : Error {
    using Error::Error;
};

}  // namespace regprob

#endif
