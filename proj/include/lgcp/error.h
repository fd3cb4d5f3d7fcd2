// Copyright 2026 The LGCP Authors.
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

#ifndef LGCP_ERROR_H_
#define LGCP_ERROR_H_

#include <stdexcept>
#include <string>

namespace lgcp {

// Base of every error raised by the library. Each subclass is a distinct
// error kind so callers can map them to exit codes or retry policy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A document was syntactically malformed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A well-formed document or value broke a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The packet set cannot be scheduled (e.g. an undeliverable link).
class SchedulingError : public Error {
 public:
  using Error::Error;
};

// An exhaustive oracle refused an instance above its tractability guard.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgcp

#endif  // LGCP_ERROR_H_
