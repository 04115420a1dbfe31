// Copyright 2026 The judgekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace judgekit {

// Base of everything the toolkit throws on purpose. The CLI maps each
// subclass onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or malformed instance (e.g. empty ground truth).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller passed arguments that violate an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// A JSONL file that does not follow its declared schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure after retries were exhausted.
class EndpointError : public Error {
 public:
  EndpointError(const std::string& what, std::vector<std::string> attempts)
      : Error(what), attempts_(std::move(attempts)) {}
  explicit EndpointError(const std::string& what) : Error(what) {}

  const std::vector<std::string>& attempts() const { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

// Non-retryable 4xx response (bad key, bad request).
class RequestError : public EndpointError {
 public:
  RequestError(const std::string& what, int status)
      : EndpointError(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Scalar scorer returned something that is not a finite number.
class ScorerError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

}  // namespace judgekit
