#pragma once

#include <stdexcept>

namespace wsn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run parameters (grid dimensions, process counts, key material).
struct ConfigError : Error {
  using Error::Error;
};

// Valid configuration, invalid argument (rank out of range, bad frame length).
struct DomainError : Error {
  using Error::Error;
};

// Payload does not fit the fixed frame size.
struct EncodingError : Error {
  using Error::Error;
};

// Malformed or unexpected frame on the wire.
struct ProtocolError : Error {
  using Error::Error;
};

// Unknown destination, closed backend, socket failure.
struct TransportError : Error {
  using Error::Error;
};

// Unusable analysis input (empty selection, malformed CSV).
struct AnalysisError : Error {
  using Error::Error;
};

}  // namespace wsn
