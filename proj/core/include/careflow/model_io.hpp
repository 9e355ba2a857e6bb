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

#ifndef CAREFLOW_MODEL_IO_HPP
#define CAREFLOW_MODEL_IO_HPP

#include <string>

#include "careflow/lstm.hpp"

namespace careflow {

/// Flat text model format:
///
///   CFMODEL 1
///   hidden_units <H>
///   input_dim <D>
///   feature_mean <value>
///   feature_std <value>
///   matrix <name> <rows> <cols>
///   <row-major values, one whitespace-separated row per line>
///   ...
///
/// with the eight matrices fwd.wx, fwd.wh, fwd.b, bwd.wx, bwd.wh, bwd.b,
/// out.w, out.b in that order (vectors stored as n x 1). Values carry 17
/// significant digits, so loading a saved file and saving it again
/// reproduces it byte for byte.
void save_model(const ModelParams& params, const std::string& path);

/// Throws IoError when the file cannot be opened and DataError (with a line
/// number) on any malformed content.
ModelParams load_model(const std::string& path);

/// String-level versions used by the file functions and by tests.
std::string serialize_model(const ModelParams& params);
ModelParams parse_model(const std::string& text);

}  // namespace careflow

#endif  // CAREFLOW_MODEL_IO_HPP
