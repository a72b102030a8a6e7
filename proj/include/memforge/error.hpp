#pragma once
// Error taxonomy shared by every memforge module.
//
// Each error carries a category (mapped 1:1 onto CLI exit codes) and a stable
// machine-readable code string, so callers can branch on either.

#include <stdexcept>
#include <string>
#include <utility>

namespace memforge {

enum class ErrorCategory {
    Config = 2,
    Data = 3,
    Network = 4,
    Internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string code, const std::string& message)
        : std::runtime_error(message), category_(category), code_(std::move(code)) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
    std::string code_;
};

struct ConfigError : Error {
    ConfigError(std::string code, const std::string& message)
        : Error(ErrorCategory::Config, std::move(code), message) {}
};

struct DataError : Error {
    DataError(std::string code, const std::string& message)
        : Error(ErrorCategory::Data, std::move(code), message) {}
};

struct NetworkError : Error {
    NetworkError(std::string code, const std::string& message)
        : Error(ErrorCategory::Network, std::move(code), message) {}
};

struct InternalError : Error {
    InternalError(std::string code, const std::string& message)
        : Error(ErrorCategory::Internal, std::move(code), message) {}
};

// Snapshot-specific failures need to be told apart by callers.
struct CorruptSnapshotError : DataError {
    explicit CorruptSnapshotError(const std::string& message)
        : DataError("corrupt_snapshot", message) {}
};

struct VersionMismatchError : DataError {
    explicit VersionMismatchError(const std::string& message)
        : DataError("version_mismatch", message) {}
};

}  // namespace memforge
