#pragma once

#include <stdexcept>
#include <string>

namespace umbra {

// Stable error identifiers, mirrored one-to-one by the C API status codes.
enum class ErrorCode {
    ok = 0,
    file_not_found,
    unsupported_format,
    decode_error,
    io_error,
    invalid_argument,
    dimension_mismatch,
    image_too_small,
    degenerate_input,
    missing_class,
    no_images,
    partial_failure,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace umbra
