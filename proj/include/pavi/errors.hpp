#pragma once

#include <stdexcept>
#include <string>

namespace pavi {

/// Structured error with a machine-parsable code.
/// Rendered by the CLI as "code: message: context".
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message, std::string context = "")
        : std::runtime_error(format(code, message, context)),
          code_(std::move(code)),
          message_(std::move(message)),
          context_(std::move(context)) {}

    const std::string& code() const { return code_; }
    const std::string& message() const { return message_; }
    const std::string& context() const { return context_; }

private:
    static std::string format(const std::string& code, const std::string& message,
                              const std::string& context) {
        std::string out = code + ": " + message;
        if (!context.empty()) out += ": " + context;
        return out;
    }

    std::string code_;
    std::string message_;
    std::string context_;
};

}  // namespace pavi
