#pragma once

#include <stdexcept>
#include <string>

namespace tteda {

/// Raised for arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The score model can no longer produce a valid distribution
/// (zero partition function, all-zero conditional weights, zero-norm core).
class DegenerateModel : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An elite configuration has zero score under the current model.
class DegenerateElite : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fixed-step integration lost too much accuracy (trace drift).
class IntegrationAccuracy : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed run specification.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tteda
