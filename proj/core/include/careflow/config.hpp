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

#ifndef CAREFLOW_CONFIG_HPP
#define CAREFLOW_CONFIG_HPP

#include <cstddef>
#include <map>
#include <string>

#include "careflow/feature.hpp"
#include "careflow/flow.hpp"
#include "careflow/segmenter.hpp"

namespace careflow {

/// Flat configuration: one `section.key = value` per line, `#` comments,
/// blank lines ignored.
using ConfigMap = std::map<std::string, std::string>;

/// Throws ConfigError with the offending line number.
ConfigMap parse_config_text(const std::string& text);

/// Throws IoError when unreadable, then parses as parse_config_text.
ConfigMap load_config_file(const std::string& path);

/// All tunables of the streaming chain in one place.
struct PipelineSettings {
  FlowConfig flow;
  FeatureConfig feature;
  SegmenterConfig segmenter;
  bool realtime = false;
  std::size_t queue_capacity = 64;  // realtime frame queue bound

  void validate() const;
};

/// Applies every entry of the map onto the defaults. Unknown keys and
/// malformed values raise ConfigError.
PipelineSettings settings_from_config(const ConfigMap& map);

/// The recognized keys with their defaults, one `key = value` per line
/// (the text shown by `--help` and accepted back as a config file).
std::string default_config_text();

}  // namespace careflow

#endif  // CAREFLOW_CONFIG_HPP
