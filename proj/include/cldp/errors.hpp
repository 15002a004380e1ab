//
// Copyright 2026 The cldp Authors
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
//

#pragma once

#include <stdexcept>
#include <string>

namespace cldp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mutation does not match the state it is applied to, or a changelog is
// not sorted / not chain-consistent.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& message, std::size_t offending_index)
      : Error(message), offending_index_(offending_index) {}
  std::size_t offending_index() const { return offending_index_; }

 private:
  std::size_t offending_index_;
};

class DuplicateEntryError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class HeterogeneousAdvancedError : public Error {
 public:
  using Error::Error;
};

class InvalidNoiseError : public Error {
 public:
  using Error::Error;
};

class RangeTooWideError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConstraintError : public Error {
 public:
  using Error::Error;
};

class InvalidEpsilonError : public Error {
 public:
  using Error::Error;
};

class UnknownLabelError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Bad configuration; `field` is the dotted path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// The data does not satisfy the mutation constraint it was declared with.
class ConstraintViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cldp
