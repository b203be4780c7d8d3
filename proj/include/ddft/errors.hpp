#pragma once

#include <stdexcept>

namespace ddft {

// Base type for all harness errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// compression
struct InvalidReference : Error { using Error::Error; };

// protocol
struct InterviewerUnavailable : Error { using Error::Error; };
struct ProtocolViolation : Error { using Error::Error; };
struct SessionAborted : Error { using Error::Error; };

// jury
struct JudgeParseFailure : Error { using Error::Error; };

// metrics
struct IncompleteGrid : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };

// stats
struct InsufficientData : Error { using Error::Error; };
struct UndefinedCorrelation : Error { using Error::Error; };
struct UnstableBootstrap : Error { using Error::Error; };

// clients
struct EndpointUnavailable : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };

// harness
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ChecksumMismatch : Error { using Error::Error; };
struct TemplateError : Error { using Error::Error; };

}  // namespace ddft
