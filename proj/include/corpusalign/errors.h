// Copyright 2026 The corpusalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORPUSALIGN_ERRORS_H_
#define CORPUSALIGN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace corpusalign {

// Base of every error the library raises. The CLI maps the three families
// below onto exit codes 1 (config/validation) and 2 (data).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rule set, parameter block or run config is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates a documented precondition (unsorted regions, empty
// reference, invalid UTF-8, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The inputs are well-formed but the requested result does not exist.
class DataError : public Error {
 public:
  using Error::Error;
};

class NoCandidateError : public DataError {
 public:
  using DataError::DataError;
};

class IncomparableError : public DataError {
 public:
  using DataError::DataError;
};

class InconclusiveError : public DataError {
 public:
  using DataError::DataError;
};

class SplitInfeasibleError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace corpusalign

#endif  // CORPUSALIGN_ERRORS_H_
