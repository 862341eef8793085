// Copyright (c) 2026 The synthdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHDETECT_ERRORS_H_
#define SYNTHDETECT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthdetect {

// Root of every error thrown by the library. Callers that only need a
// message can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

// An operation produced nothing usable (e.g. a clip too short to trim).
class EmptyResult : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : Error("manifest line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FeatureError : public Error {
 public:
  using Error::Error;
};

class TrainError : public Error {
 public:
  using Error::Error;
};

class PredictError : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace synthdetect

#endif  // SYNTHDETECT_ERRORS_H_
