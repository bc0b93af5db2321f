// Copyright 2026 The rirpinn Authors
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

namespace rirpinn {

// Base for every error raised by the library. The CLI maps the subclasses
// onto exit codes (usage 1, data 2, numerical 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed inputs, shape mismatches, unreadable files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediates, diverged training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace rirpinn
