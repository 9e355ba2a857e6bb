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

#ifndef CAREFLOW_FLOW_HPP
#define CAREFLOW_FLOW_HPP

#include <cstddef>
#include <vector>

#include "careflow/frame.hpp"

namespace careflow {

/// Dense per-pixel displacement between two consecutive frames, in pixels
/// per frame. u is horizontal (+x right), v is vertical (+y down).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;
  std::vector<float> v;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h),
        u(static_cast<std::size_t>(w) * h, 0.0f),
        v(static_cast<std::size_t>(w) * h, 0.0f) {}
};

/// Parameters of the polynomial-expansion flow estimator.
///
/// The estimator fits a quadratic polynomial to every pixel neighborhood
/// (Gaussian applicability of size polynomial_neighborhood and width
/// polynomial_sigma), derives a displacement from the coefficient change
/// between the two frames, and averages the resulting normal equations over
/// a window_size box. A coarse-to-fine pyramid handles displacements larger
/// than the neighborhood.
struct FlowConfig {
  int pyramid_levels = 3;           // extra coarse scales beyond full resolution
  double pyramid_scale = 0.5;       // size ratio between pyramid levels, in (0,1)
  int window_size = 15;             // box-averaging window for the flow solve (odd)
  int polynomial_neighborhood = 7;  // polynomial fit support (odd)
  double polynomial_sigma = 1.5;    // Gaussian applicability sigma, pixels
  int iterations = 3;               // displacement refinement passes per level
  double magnitude_threshold = 0.2; // px/frame; pixels below it are ignored in mean_motion

  /// Throws ConfigError on any inconsistent setting.
  void validate() const;
};

/// Per-frame aggregate of the moving part of a flow field.
struct MeanMotion {
  double u_mean = 0.0;      // px/frame
  double v_mean = 0.0;      // px/frame
  std::size_t active_count = 0;  // pixels above cfg.magnitude_threshold
};

/// Dense displacement field estimating next ~= prev warped by (u, v).
/// Deterministic for fixed inputs and configuration.
///
/// Throws DataError when the frames disagree in size or are smaller than
/// 16 px in either dimension, and ConfigError when either dimension is
/// smaller than the polynomial neighborhood or the averaging window.
FlowField compute_flow(const Frame& prev, const Frame& next, const FlowConfig& cfg);

/// Arithmetic mean of (u, v) over pixels whose magnitude exceeds
/// cfg.magnitude_threshold, scanning in row-major order. Returns all zeros
/// when no pixel passes. Throws DataError on non-finite flow values.
MeanMotion mean_motion(const FlowField& flow, const FlowConfig& cfg);

}  // namespace careflow

#endif  // CAREFLOW_FLOW_HPP
