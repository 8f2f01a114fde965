#include "socsim/core/error.hpp"

namespace socsim::core {

const char* errc_name(Errc c) noexcept {
    switch (c) {
    case Errc::PastTimestamp: return "PastTimestamp";
    case Errc::EmptyQueue: return "EmptyQueue";
    case Errc::MixedTick: return "MixedTick";
    case Errc::InvalidSeedData: return "InvalidSeedData";
    case Errc::UnknownAttribute: return "UnknownAttribute";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidFraction: return "InvalidFraction";
    case Errc::Io: return "Io";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::HashMismatch: return "HashMismatch";
    case Errc::NoBackendAvailable: return "NoBackendAvailable";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::BackendFailure: return "BackendFailure";
    case Errc::TemplateError: return "TemplateError";
    case Errc::TeacherFailure: return "TeacherFailure";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::InvalidFeature: return "InvalidFeature";
    case Errc::FeatureDecodeError: return "FeatureDecodeError";
    }
    return "Unknown";
}

} // namespace socsim::core
