// Copyright 2026 The Treesearch Authors.
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
#include <utility>

namespace treesearch {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the operation's domain (bad token id, k out of
// range, positive log-probability, ...).
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// A NodeId that does not belong to the tree.
class HandleError : public Error {
 public:
  using Error::Error;
};

// An illegal node status transition, e.g. extending a terminal node.
class LifecycleError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied function broke its contract (evaluator hook out of range).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A language model query failed during search.
class ModelQueryError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A document (tree, model file, manifest) is malformed. `location` is a JSON
// pointer or a byte offset, whichever pinpoints the problem.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

}  // namespace treesearch
