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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adaskip {

/// Skip array over the B_s skippable blocks: 1 executes the block, 0 bypasses
/// it. Textual form is one '0'/'1' character per block, shallowest first.
struct SkipConfig {
  std::vector<std::uint8_t> bits;

  static SkipConfig all_ones(std::size_t n) {
    return SkipConfig{std::vector<std::uint8_t>(n, 1)};
  }
  static SkipConfig all_zeros(std::size_t n) {
    return SkipConfig{std::vector<std::uint8_t>(n, 0)};
  }
  /// Throws ValidationError on characters other than '0' and '1'.
  static SkipConfig parse(std::string_view text);

  std::size_t size() const noexcept { return bits.size(); }
  /// N, the number of skipped blocks.
  std::size_t n_skipped() const noexcept;
  std::string to_string() const;

  auto operator<=>(const SkipConfig &) const = default;
};

} // namespace adaskip
