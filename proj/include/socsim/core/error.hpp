#pragma once

#include <stdexcept>
#include <string>

namespace socsim::core {

// Error taxonomy shared by all modules. Codes are part of the public
// contract: callers match on code(), not on message text.
enum class Errc {
    PastTimestamp,
    EmptyQueue,
    MixedTick,
    InvalidSeedData,
    UnknownAttribute,
    InvalidConfig,
    InvalidParams,
    OutOfRange,
    InvalidFraction,
    Io,
    BadMagic,
    VersionMismatch,
    TruncatedFile,
    HashMismatch,
    NoBackendAvailable,
    SchemaViolation,
    BackendFailure,
    TemplateError,
    TeacherFailure,
    DegenerateData,
    InvalidFeature,
    FeatureDecodeError,
};

const char* errc_name(Errc c) noexcept;

class SimError : public std::runtime_error {
public:
    SimError(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
    throw SimError(code, msg);
}

} // namespace socsim::core
