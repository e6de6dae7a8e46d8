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

#include "adaskip/skip_config.hpp"

#include <algorithm>

#include "adaskip/error.hpp"

namespace adaskip {

SkipConfig SkipConfig::parse(std::string_view text) {
  SkipConfig out;
  out.bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ValidationError("skip_config_format",
                            "skip configuration must be a string of 0/1, got '" +
                                std::string(text) + "'");
    }
    out.bits.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

std::size_t SkipConfig::n_skipped() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 0));
}

std::string SkipConfig::to_string() const {
  std::string s(bits.size(), '1');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 0) {
      s[i] = '0';
    }
  }
  return s;
}

} // namespace adaskip
