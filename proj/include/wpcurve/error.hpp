#pragma once

#include <stdexcept>
#include <string>

namespace wpc {

// Broad failure categories. They map 1:1 onto the C API status codes and
// the CLI exit-code contract (config=2, data=3, numeric=4).
enum class ErrorCategory {
    Config,
    Data,
    Numeric,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(std::string message) : Error(ErrorCategory::Config, std::move(message)) {}
};

struct DataError : Error {
    explicit DataError(std::string message) : Error(ErrorCategory::Data, std::move(message)) {}
};

struct NumericError : Error {
    explicit NumericError(std::string message) : Error(ErrorCategory::Numeric, std::move(message)) {}
};

} // namespace wpc
