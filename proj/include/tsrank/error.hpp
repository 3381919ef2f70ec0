// Copyright 2026 The tsrank Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsrank {

enum class ErrorCode {
  invalid_argument,    // caller passed a value outside the operation's domain
  contract,            // internal pre/post-condition violated
  template_error,      // prompt template missing a slot or malformed
  readout_incomplete,  // first-step readout lacks a requested token id
  degenerate_readout,  // zero pooled mass on the yes or no side
  backend_unavailable, // transport failure or deadline breach
  protocol,            // backend answered with a malformed payload
  data,                // unreadable or invalid input file / record
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised once the remote client has exhausted its retries.
class BackendUnavailable : public Error {
 public:
  BackendUnavailable(const std::string& message, int attempts)
      : Error(ErrorCode::backend_unavailable, message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

}  // namespace tsrank
