#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace conewalk {

// Error codes are stable strings (e.g. "OutsideCone", "WindowOverflow") so
// callers and the CLI can match on them without a shared enum.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& detail)
        : std::runtime_error(module + "/" + code + ": " + detail),
          module_(std::move(module)),
          code_(std::move(code)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& code() const noexcept { return code_; }

private:
    std::string module_;
    std::string code_;
};

[[noreturn]] inline void fail(const char* module, const char* code, const std::string& detail) {
    throw Error(module, code, detail);
}

}  // namespace conewalk
