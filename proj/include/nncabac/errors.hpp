// Copyright 2026 The nncabac Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef NNCABAC_ERRORS_HPP_
#define NNCABAC_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nncabac {

// Base class for every error the codec reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: invalid parameters, mismatched tensors, unreadable files.
class InputError : public Error {
 public:
  using Error::Error;
};

// Arithmetic coder misuse or a payload that cannot be decoded.
class CodingError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Always a bug.
class InvariantError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kPayloadLength,
  kInvalidHeader,
  kDuplicateName,
  kNonFinite,
};

inline const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kBadMagic: return "bad magic";
    case FormatErrorKind::kVersionMismatch: return "version mismatch";
    case FormatErrorKind::kTruncated: return "truncated";
    case FormatErrorKind::kPayloadLength: return "payload length mismatch";
    case FormatErrorKind::kInvalidHeader: return "invalid header";
    case FormatErrorKind::kDuplicateName: return "duplicate name";
    case FormatErrorKind::kNonFinite: return "non-finite value";
  }
  return "unknown";
}

// Malformed .dcnb or .dcnw container. Carries the byte offset at which the
// problem was detected.
class FormatError : public InputError {
 public:
  FormatError(FormatErrorKind kind, std::size_t offset, const std::string& detail)
      : InputError(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                   (detail.empty() ? std::string() : ": " + detail)),
        kind_(kind),
        offset_(offset) {}

  FormatErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  FormatErrorKind kind_;
  std::size_t offset_;
};

}  // namespace nncabac

#endif  // NNCABAC_ERRORS_HPP_
