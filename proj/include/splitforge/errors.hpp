// Copyright 2026 The SplitForge Authors
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

#ifndef SPLITFORGE_ERRORS_HPP_
#define SPLITFORGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace splitforge {

// Bad input data or configuration. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No assignment satisfies the hard constraints. Maps to CLI exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string stage, const std::string& what)
      : std::runtime_error(stage.empty() ? what : stage + ": " + what),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// File system failures. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace splitforge

#endif  // SPLITFORGE_ERRORS_HPP_
