// Copyright 2026 The Careflow Authors
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

#ifndef CAREFLOW_LABEL_HPP
#define CAREFLOW_LABEL_HPP

#include <string>
#include <string_view>

#include "careflow/errors.hpp"

namespace careflow {

/// Motion class: careful (C) or not careful (NC).
enum class Label { C, NC };

inline std::string to_string(Label label) { return label == Label::C ? "C" : "NC"; }

inline Label parse_label(std::string_view text) {
  if (text == "C") return Label::C;
  if (text == "NC") return Label::NC;
  throw DataError("unknown label '" + std::string(text) + "' (expected C or NC)");
}

}  // namespace careflow

#endif  // CAREFLOW_LABEL_HPP
