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

#ifndef CAREFLOW_FEATURE_HPP
#define CAREFLOW_FEATURE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace careflow {

/// Clock and floor of the scalar velocity feature.
struct FeatureConfig {
  double output_rate = 15.0;     // Hz of the emitted velocity series
  double delta_t = 1.0 / 15.0;   // additive floor inside the velocity norm, seconds

  void validate() const;
};

/// One scalar tangential-velocity sample on the feature clock.
struct VelocitySample {
  double t = 0.0;                // seconds
  double v = 0.0;                // px/s, always >= cfg.delta_t
  std::size_t active_px = 0;     // pixels that contributed to the mean motion
};

struct VelocitySeries {
  std::vector<VelocitySample> samples;
};

/// Norm of the tangential velocity from mean flow components in px/frame:
/// sqrt((u * rate)^2 + (v * rate)^2 + delta_t^2).
/// Throws DataError on non-finite inputs.
double tangential_velocity(double u_mean, double v_mean, const FeatureConfig& cfg);

/// Converts a per-frame value stream at the camera rate into the uniform
/// feature-clock series by mean-pooling every output window. When the input
/// rate equals the output rate this is a pass-through of the values.
///
/// The output grid is anchored at the first sample's timestamp; window j
/// covers [t0 + j/rate, t0 + (j+1)/rate) and is stamped with its grid origin
/// t0 + j/rate, so consecutive outputs differ by exactly one output tick.
class Resampler {
 public:
  /// Throws ConfigError when frames_rate < cfg.output_rate.
  Resampler(double frames_rate, const FeatureConfig& cfg);

  /// Feeds one raw sample; returns the windows completed by it (usually
  /// zero or one). Throws StreamError on non-increasing timestamps.
  std::vector<VelocitySample> feed(double t, double value, std::size_t active_px);

  /// Emits the trailing partial window, if any.
  std::vector<VelocitySample> flush();

  double output_rate() const { return cfg_.output_rate; }

 private:
  VelocitySample close_window();

  FeatureConfig cfg_;
  double frames_rate_ = 0.0;
  bool started_ = false;
  double t0_ = 0.0;
  double last_t_ = 0.0;
  long window_ = 0;
  double sum_v_ = 0.0;
  double sum_active_ = 0.0;
  std::size_t count_ = 0;
};

/// Batch wrapper over Resampler for a fully materialized stream.
VelocitySeries resample(double frames_rate, const std::vector<VelocitySample>& raw,
                        const FeatureConfig& cfg);

/// CSV with header t_s,v_pxs,active_px, one row per sample, 9 significant
/// digits.
void write_velocity_csv(std::ostream& out, const VelocitySeries& series);
VelocitySeries read_velocity_csv(std::istream& in);

}  // namespace careflow

#endif  // CAREFLOW_FEATURE_HPP
