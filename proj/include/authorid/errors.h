// Copyright 2026 The Authorid Authors.
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

#ifndef AUTHORID_ERRORS_H_
#define AUTHORID_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace authorid {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain: dimension mismatch, empty input,
// out-of-range parameter.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input bytes are not valid UTF-8.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Malformed line in a text file format. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Two records disagree, e.g. a word mapped to two different groups.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Linear algebra failed to produce a finite answer.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A model snapshot does not fit the lexicon or data it is applied to.
class SnapshotIncompatibleError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

// A state transition that is not allowed (re-judging an item, feedback on an
// output of the current step).
class StateError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace authorid

#endif  // AUTHORID_ERRORS_H_
