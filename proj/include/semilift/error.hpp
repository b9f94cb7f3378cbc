#pragma once

#include <stdexcept>
#include <string>

namespace semilift {

// Every failure carries a stable machine code plus human-readable text.
// The CLI maps PARSE_ERROR to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
    throw Error(code, what);
}

// Internal invariants; these fire on engine bugs, never on bad user input.
inline void check(bool ok, const std::string& what) {
    if (!ok) throw Error("INTERNAL", what);
}

} // namespace semilift
