#ifndef VASSFORGE_ERRORS_HPP
#define VASSFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vassforge {

enum class ErrorCode {
    StateMismatch,
    NegativeCounter,
    BadMap,
    DimensionMismatch,
    SyntaxError,
    UndeclaredCounter,
    ContainsForMacro,
    ExplosionGuard,
    MagnitudeCap,
    BadPlan,
    BadSchedule,
    SizeGuard,
    DimensionTooSmall,
    TooManyTests,
    ZeroTestFailed,
    SchemaError,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// All library failures throw this; `code` identifies the contract that was
/// violated and `index` carries the offending position where one exists
/// (replay step, counter index, source line).
class VfError : public std::runtime_error {
  public:
    VfError(ErrorCode code, std::string message, long long index = -1)
        : std::runtime_error(std::move(message)), code_(code), index_(index) {}

    ErrorCode code() const { return code_; }
    long long index() const { return index_; }

  private:
    ErrorCode code_;
    long long index_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message, long long index = -1) {
    throw VfError(code, std::string(error_code_name(code)) + ": " + message, index);
}

} // namespace vassforge

#endif
