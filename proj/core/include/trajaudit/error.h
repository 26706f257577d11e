//
// Copyright 2026 The trajaudit Authors
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

#ifndef TRAJAUDIT_ERROR_H_
#define TRAJAUDIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajaudit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (bad shape, out-of-range
// parameter, empty input).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file or artifact that should exist does not.
class NotFound : public Error {
 public:
  using Error::Error;
};

// Malformed input text. The message always carries the source and line.
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

}  // namespace trajaudit

#endif  // TRAJAUDIT_ERROR_H_
