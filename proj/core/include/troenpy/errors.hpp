#pragma once

#include <stdexcept>

namespace troenpy {

// Bad user-supplied configuration: unknown feature block, inconsistent flags,
// malformed experiment settings.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data; the message names the offending record.
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input parsed but a required field is missing or has the wrong type.
struct SchemaError : IngestError {
  using IngestError::IngestError;
};

// Operand dimensions or lengths do not line up.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The optimizer produced a non-finite objective value.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem write failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace troenpy
