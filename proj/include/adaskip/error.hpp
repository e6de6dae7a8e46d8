/*
 * Copyright (C) 2026 The adaskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace adaskip {

/// Invalid input: bad shapes, out-of-range parameters, malformed files.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string code, const std::string &what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string &code() const noexcept { return code_; }

private:
  std::string code_;
};

/// Failure while doing valid work (non-finite loss, IO). Exit code 3.
class RuntimeError : public std::runtime_error {
public:
  RuntimeError(std::string code, const std::string &what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string &code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace adaskip
