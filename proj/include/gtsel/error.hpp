#pragma once

#include <stdexcept>
#include <string>

namespace gtsel {

// Bad arguments: out-of-range ids, parameters outside their domain, or an
// "ERR" reply from an external oracle.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures talking to an out-of-process oracle.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpawnError : public OracleError {
 public:
  using OracleError::OracleError;
};

class MalformedReply : public OracleError {
 public:
  using OracleError::OracleError;
};

class OracleTimeout : public OracleError {
 public:
  using OracleError::OracleError;
};

// The child closed its end of the channel mid-conversation.
class OracleDisconnected : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace gtsel
