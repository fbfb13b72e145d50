// Copyright 2026 The opgrowth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace opgrowth {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested mode exists in principle but is not provided (e.g. corrections for mixtures).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Any failure of a numerical procedure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double t_reached)
      : NumericalError(what + " (reached t=" + std::to_string(t_reached) + ")"), t_reached_(t_reached) {}
  double t_reached() const noexcept { return t_reached_; }

 private:
  double t_reached_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An internal identity that must hold exactly (up to rounding) was violated.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace opgrowth
