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

#include "careflow/feature.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "careflow/errors.hpp"

namespace careflow {

void FeatureConfig::validate() const {
  if (!(output_rate > 0.0)) throw ConfigError("feature: output_rate must be > 0");
  // delta_t = 0 is allowed for experiments that drop the regularizing floor.
  if (!(delta_t >= 0.0)) throw ConfigError("feature: delta_t must be >= 0");
}

double tangential_velocity(double u_mean, double v_mean, const FeatureConfig& cfg) {
  if (!std::isfinite(u_mean) || !std::isfinite(v_mean))
    throw DataError("tangential_velocity: non-finite motion component");
  const double u = u_mean * cfg.output_rate;  // px/frame -> px/s on the feature clock
  const double v = v_mean * cfg.output_rate;
  return std::sqrt(u * u + v * v + cfg.delta_t * cfg.delta_t);
}

Resampler::Resampler(double frames_rate, const FeatureConfig& cfg)
    : cfg_(cfg), frames_rate_(frames_rate) {
  cfg_.validate();
  if (!(frames_rate > 0.0) || frames_rate < cfg_.output_rate)
    throw ConfigError("resample: frames_rate must be >= output_rate");
}

VelocitySample Resampler::close_window() {
  VelocitySample out;
  // Window w is stamped at its grid origin t0 + w/rate, so at equal input
  // and output rates the series passes timestamps through unchanged.
  out.t = t0_ + static_cast<double>(window_) / cfg_.output_rate;
  out.v = sum_v_ / static_cast<double>(count_);
  out.active_px = static_cast<std::size_t>(std::llround(sum_active_ / static_cast<double>(count_)));
  sum_v_ = 0.0;
  sum_active_ = 0.0;
  count_ = 0;
  return out;
}

std::vector<VelocitySample> Resampler::feed(double t, double value, std::size_t active_px) {
  std::vector<VelocitySample> out;
  if (!started_) {
    started_ = true;
    t0_ = t;
    window_ = 0;
  } else if (t <= last_t_) {
    throw StreamError("resample: non-increasing timestamp");
  }
  last_t_ = t;

  // Small positive bias keeps samples landing exactly on a window boundary
  // in the window that starts there, despite rounding in the timestamps.
  const long idx = static_cast<long>(std::floor((t - t0_) * cfg_.output_rate + 1e-7));
  if (idx > window_) {
    if (count_ > 0) out.push_back(close_window());
    window_ = idx;
  }
  sum_v_ += value;
  sum_active_ += static_cast<double>(active_px);
  ++count_;
  return out;
}

std::vector<VelocitySample> Resampler::flush() {
  std::vector<VelocitySample> out;
  if (count_ > 0) out.push_back(close_window());
  return out;
}

VelocitySeries resample(double frames_rate, const std::vector<VelocitySample>& raw,
                        const FeatureConfig& cfg) {
  Resampler rs(frames_rate, cfg);
  VelocitySeries series;
  for (const auto& s : raw) {
    for (auto& emitted : rs.feed(s.t, s.v, s.active_px)) series.samples.push_back(emitted);
  }
  for (auto& emitted : rs.flush()) series.samples.push_back(emitted);
  return series;
}

void write_velocity_csv(std::ostream& out, const VelocitySeries& series) {
  out << "t_s,v_pxs,active_px\n";
  char buf[80];
  for (const auto& s : series.samples) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%zu\n", s.t, s.v, s.active_px);
    out << buf;
  }
}

VelocitySeries read_velocity_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("velocity csv: empty input");
  if (line != "t_s,v_pxs,active_px")
    throw DataError("velocity csv: bad header '" + line + "'");
  VelocitySeries series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    VelocitySample s;
    unsigned long long active = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%llu", &s.t, &s.v, &active) != 3)
      throw DataError("velocity csv: parse error at line " + std::to_string(lineno));
    s.active_px = static_cast<std::size_t>(active);
    series.samples.push_back(s);
  }
  return series;
}

}  // namespace careflow
