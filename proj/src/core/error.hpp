#pragma once

#include <stdexcept>
#include <string>

namespace adrceq {

enum class Errc {
    invalid_argument,
    domain_mismatch,
    algebraic_loop,
    zero_numerator,
    has_delay,
    nyquist_exceeded,
    indeterminate,
    unsupported_order,
    improper_result,
    wrong_filter_kind,
    overflow,
    unstable_evaluation,
    nonfinite_state,
    empty_trace,
    duplicate_label,
    config_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace adrceq
