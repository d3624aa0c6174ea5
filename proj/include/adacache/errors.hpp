// Copyright (c) 2026 The adacache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace adacache {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (trace line, catalog JSON, path syntax).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Trace events out of timestamp order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// A path does not resolve against the namespace catalog.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or workload setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples to run a statistical procedure.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace adacache
