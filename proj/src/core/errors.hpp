#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace prf {

// Failure taxonomy shared by the core modules and mapped 1:1 onto the C API
// status codes.
enum class ErrorCode {
    InvalidArgument = 1,
    NonPositiveWarping,
    InsufficientSnapshots,
    BoundaryMismatch,
    InvalidBoundary,
    ResonanceUnsolvable,
    SingularDenominator,
    MissingSolution,
    NonVanishingEndpoints,
    DivergentAtZero,
    SupercriticalM2,
    NotResonant,
    NonIntegrableBoundary,
    BoundHypothesisViolated,
    BlowUp,
    NonNegativeRate,
    TooShort,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string message, double detail = 0.0, long index = -1)
        : std::runtime_error(std::move(message)), code_(code), detail_(detail), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    // Numeric payload: blow-up time, boundary gap, hypothesis-violation time, ...
    double detail() const noexcept { return detail_; }
    // Grid index payload where applicable (NonPositiveWarping, envelope violations).
    long index() const noexcept { return index_; }

  private:
    ErrorCode code_;
    double detail_;
    long index_;
};

const char* error_code_name(ErrorCode code);

[[noreturn]] inline void raise(ErrorCode code, const std::string& message, double detail = 0.0,
                               long index = -1) {
    throw Error(code, message, detail, index);
}

} // namespace prf
