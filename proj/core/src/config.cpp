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

#include "careflow/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "careflow/errors.hpp"

namespace careflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (value.empty() || end != begin + value.size() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw ConfigError("config: key '" + key + "': expected a number, got '" +
                      value + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || v < -2147483648.0 || v > 2147483647.0) {
    throw ConfigError("config: key '" + key + "': expected an integer, got '" +
                      value + "'");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw ConfigError("config: key '" + key + "': expected a boolean, got '" +
                    value + "'");
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": empty key or value");
    }
    if (map.count(key)) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    map[key] = value;
  }
  return map;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void PipelineSettings::validate() const {
  flow.validate();
  feature.validate();
  segmenter.validate();
  if (queue_capacity < 1) {
    throw ConfigError("pipeline: queue_capacity must be >= 1");
  }
}

PipelineSettings settings_from_config(const ConfigMap& map) {
  PipelineSettings s;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"flow.pyramid_levels",
       [&s](const std::string& k, const std::string& v) {
         s.flow.pyramid_levels = to_int(k, v);
       }},
      {"flow.pyramid_scale",
       [&s](const std::string& k, const std::string& v) {
         s.flow.pyramid_scale = to_double(k, v);
       }},
      {"flow.window_size",
       [&s](const std::string& k, const std::string& v) {
         s.flow.window_size = to_int(k, v);
       }},
      {"flow.polynomial_neighborhood",
       [&s](const std::string& k, const std::string& v) {
         s.flow.polynomial_neighborhood = to_int(k, v);
       }},
      {"flow.polynomial_sigma",
       [&s](const std::string& k, const std::string& v) {
         s.flow.polynomial_sigma = to_double(k, v);
       }},
      {"flow.iterations",
       [&s](const std::string& k, const std::string& v) {
         s.flow.iterations = to_int(k, v);
       }},
      {"flow.magnitude_threshold",
       [&s](const std::string& k, const std::string& v) {
         s.flow.magnitude_threshold = to_double(k, v);
       }},
      {"feature.output_rate",
       [&s](const std::string& k, const std::string& v) {
         s.feature.output_rate = to_double(k, v);
       }},
      {"feature.delta_t",
       [&s](const std::string& k, const std::string& v) {
         s.feature.delta_t = to_double(k, v);
       }},
      {"segmenter.tau",
       [&s](const std::string& k, const std::string& v) {
         s.segmenter.tau = to_double(k, v);
       }},
      {"segmenter.min_duration",
       [&s](const std::string& k, const std::string& v) {
         s.segmenter.min_duration = to_double(k, v);
       }},
      {"segmenter.max_duration",
       [&s](const std::string& k, const std::string& v) {
         s.segmenter.max_duration = to_double(k, v);
       }},
      {"segmenter.bridge_gap",
       [&s](const std::string& k, const std::string& v) {
         s.segmenter.bridge_gap = to_int(k, v);
       }},
      {"pipeline.realtime",
       [&s](const std::string& k, const std::string& v) {
         s.realtime = to_bool(k, v);
       }},
      {"pipeline.queue_capacity",
       [&s](const std::string& k, const std::string& v) {
         const int cap = to_int(k, v);
         if (cap < 1) throw ConfigError("config: key '" + k + "': must be >= 1");
         s.queue_capacity = static_cast<std::size_t>(cap);
       }},
  };
  for (const auto& [key, value] : map) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    it->second(key, value);
  }
  s.validate();
  return s;
}

std::string default_config_text() {
  const PipelineSettings s;
  std::ostringstream os;
  char buf[96];
  auto put_d = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.9g\n", key, v);
    os << buf;
  };
  auto put_i = [&](const char* key, long long v) {
    std::snprintf(buf, sizeof(buf), "%s = %lld\n", key, v);
    os << buf;
  };
  put_i("flow.pyramid_levels", s.flow.pyramid_levels);
  put_d("flow.pyramid_scale", s.flow.pyramid_scale);
  put_i("flow.window_size", s.flow.window_size);
  put_i("flow.polynomial_neighborhood", s.flow.polynomial_neighborhood);
  put_d("flow.polynomial_sigma", s.flow.polynomial_sigma);
  put_i("flow.iterations", s.flow.iterations);
  put_d("flow.magnitude_threshold", s.flow.magnitude_threshold);
  put_d("feature.output_rate", s.feature.output_rate);
  put_d("feature.delta_t", s.feature.delta_t);
  put_d("segmenter.tau", s.segmenter.tau);
  put_d("segmenter.min_duration", s.segmenter.min_duration);
  put_d("segmenter.max_duration", s.segmenter.max_duration);
  put_i("segmenter.bridge_gap", s.segmenter.bridge_gap);
  os << "pipeline.realtime = false\n";
  put_i("pipeline.queue_capacity",
        static_cast<long long>(s.queue_capacity));
  return os.str();
}

}  // namespace careflow
