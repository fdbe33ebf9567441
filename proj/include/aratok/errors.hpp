// Copyright 2026 The aratok Authors
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

#ifndef ARATOK_ERRORS_HPP_
#define ARATOK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace aratok {

// Base of everything the library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid options or parameters (vocab size too small, coverage out of
// range, unknown config key). The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data (bad model file, out-of-range id, I/O
// failure). The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace aratok

#endif  // ARATOK_ERRORS_HPP_
