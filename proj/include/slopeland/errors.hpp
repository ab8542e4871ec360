// Copyright 2026 The slopeland Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace slopeland {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FrameMismatchError : public Error {
 public:
  using Error::Error;
};

class GimbalLockError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Jacobian too close to singular for a stable solve.
class NearSingularError : public Error {
 public:
  NearSingularError(const std::string& what, double det)
      : Error(what), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

class NonFiniteInputError : public Error {
 public:
  using Error::Error;
};

class StationaryArmError : public Error {
 public:
  using Error::Error;
};

class DegenerateTorqueError : public Error {
 public:
  using Error::Error;
};

class NoCandidateArmError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class InclineTooSteepError : public Error {
 public:
  using Error::Error;
};

// Config or telemetry parse failure; line is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace slopeland
