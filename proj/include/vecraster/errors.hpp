// Exception types shared across the vecraster library.
#pragma once

#include <stdexcept>
#include <string>

namespace vecraster {

/// I/O failure (unreadable/unwritable file).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unsupported or malformed input format (bad magic, alpha channel, ...).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Image dimensions outside the supported range.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid pipeline configuration (target region count, durations, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Region boundary walk could not be closed into loops.
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vecraster
