#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stratkit {

// Raised for malformed or inadmissible inputs. `code` is a stable
// machine-readable tag surfaced by the CLI error object.
class input_error : public std::runtime_error {
public:
    input_error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Raised when an internal invariant fails; maps to CLI exit code 2.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& message) : std::logic_error(message) {}
};

inline void require_input(bool ok, const std::string& code, const std::string& message) {
    if (!ok) throw input_error(code, message);
}

inline void require_internal(bool ok, const std::string& message) {
    if (!ok) throw internal_error(message);
}

}  // namespace stratkit
