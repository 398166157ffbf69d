// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace psrsched {

/// Arguments violate an operation's contract (wrong sizes, bad values).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation exceeds a configured size limit.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration data is missing or inconsistent (unknown MCS, bad table).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario document failed schema validation.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// An object was queried in a state that has no defined answer.
class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace psrsched
