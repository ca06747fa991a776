#pragma once

#include <stdexcept>
#include <string>

namespace pcap {

// Error hierarchy. The CLI maps ConfigError/ParameterError to exit code 2
// and StateError/ArtifactError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class ArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcap
