//
// Copyright 2026 The tabverify Authors
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

namespace tabverify {

// Failure categories. The CLI maps them to exit codes 2, 3 and 4.
enum class ErrorKind { Config, Data, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  const char* category() const noexcept {
    switch (kind_) {
      case ErrorKind::Config: return "config";
      case ErrorKind::Data: return "data";
      case ErrorKind::Io: return "io";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) {
  return Error(ErrorKind::Config, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::Data, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorKind::Io, what);
}

}  // namespace tabverify
