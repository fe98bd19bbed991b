#pragma once

#include <stdexcept>
#include <string>

namespace rmwg {

enum class ErrorCode {
    invalid_parameter,
    invalid_input,
    parse,
    io,
    numerical,
    singular,
    not_found,
    insufficient_modes,
    usage,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the C
// layer and the CLI can translate it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace rmwg
