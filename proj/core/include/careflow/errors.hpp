// Copyright 2026 The Careflow Authors
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

#ifndef CAREFLOW_ERRORS_HPP
#define CAREFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace careflow {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Missing or unreadable files and streams (CLI exit code 3).
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Rejected input data: bad dimensions, malformed records, degenerate
/// datasets (CLI exit code 4).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

/// Out-of-order or otherwise inconsistent sample streams.
class StreamError : public DataError {
 public:
  explicit StreamError(const std::string& what) : DataError(what) {}
};

}  // namespace careflow

#endif  // CAREFLOW_ERRORS_HPP
