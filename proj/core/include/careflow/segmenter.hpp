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

#ifndef CAREFLOW_SEGMENTER_HPP
#define CAREFLOW_SEGMENTER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "careflow/feature.hpp"

namespace careflow {

/// Threshold heuristic of the motion detector. A motion starts at the first
/// sample with v > tau and ends at the first sample with v < tau; motions
/// shorter than min_duration are discarded.
struct SegmenterConfig {
  double tau = 5.25;          // px/s
  double min_duration = 1.0;  // seconds; shorter motions are dropped
  double max_duration = 30.0; // seconds; safety cap, force-closes the motion
  double sample_rate = 15.0;  // Hz of the incoming series
  int bridge_gap = 0;         // consecutive sub-tau samples tolerated inside a motion

  void validate() const;
};

/// One contiguous 1xK motion bounded by threshold crossings. The first and
/// last values are above tau; interior values may dip below only when
/// bridge_gap > 0.
struct Segment {
  std::vector<double> values;  // px/s
  double t_start = 0.0;        // timestamp of the first sample
  double t_end = 0.0;          // timestamp of the last sample
  bool truncated = false;      // force-closed by the max_duration cap

  std::size_t size() const { return values.size(); }
};

/// Online motion detector. Feed samples in timestamp order; a Segment is
/// returned exactly when a sufficiently long motion ends.
class Segmenter {
 public:
  struct Counters {
    std::uint64_t fed = 0;                // total samples consumed
    std::uint64_t emitted_samples = 0;    // samples inside emitted segments
    std::uint64_t discarded_samples = 0;  // samples of sub-min_duration motions
    std::uint64_t idle_samples = 0;       // samples outside any motion
    std::uint64_t segments_emitted = 0;
    std::uint64_t segments_discarded = 0;
    std::uint64_t segments_truncated = 0;
  };

  explicit Segmenter(const SegmenterConfig& cfg);

  /// Throws StreamError when timestamps go backwards.
  std::optional<Segment> feed(const VelocitySample& sample);

  /// Drops any in-progress motion; the next suprathreshold sample starts a
  /// fresh one. Idempotent on an idle detector.
  void reset();

  const SegmenterConfig& config() const { return cfg_; }
  const Counters& counters() const { return counters_; }

  /// Samples buffered in the motion currently in progress.
  std::size_t pending_samples() const { return buffer_.size() + dip_.size(); }

 private:
  std::optional<Segment> close_motion();

  SegmenterConfig cfg_;
  std::size_t min_samples_ = 0;
  std::size_t max_samples_ = 0;
  bool in_motion_ = false;
  bool have_last_t_ = false;
  double last_t_ = 0.0;
  std::vector<VelocitySample> buffer_;  // suprathreshold motion content
  std::vector<VelocitySample> dip_;     // sub-tau run awaiting bridge/termination
  Counters counters_;
};

}  // namespace careflow

#endif  // CAREFLOW_SEGMENTER_HPP
