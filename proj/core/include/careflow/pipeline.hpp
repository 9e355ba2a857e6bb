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

#ifndef CAREFLOW_PIPELINE_HPP
#define CAREFLOW_PIPELINE_HPP

#include <array>
#include <chrono>
#include <iosfwd>
#include <optional>
#include <vector>

#include "careflow/config.hpp"
#include "careflow/feature.hpp"
#include "careflow/lstm.hpp"
#include "careflow/segmenter.hpp"
#include "careflow/video_io.hpp"

namespace careflow {

/// One classified motion: the segment, its label and scores, and the
/// wall-clock delay from the arrival of the segment-terminating sample's
/// frame to the emission of the label.
struct RecognitionEvent {
  Segment segment;
  Label label = Label::NC;
  std::array<double, 2> scores{0.5, 0.5};  // [C, NC]
  double recognition_ms = 0.0;
};

/// Streaming chain frames -> flow -> velocity -> segments -> predictions.
/// Feed frames in timestamp order; events appear as soon as a motion ends.
class Pipeline {
 public:
  using Clock = std::chrono::steady_clock;

  /// Throws ConfigError when the model or settings are invalid or the
  /// camera rate is below the feature rate.
  Pipeline(const ModelParams& model, const PipelineSettings& settings,
           double frames_rate);

  /// Processes one frame; returns the recognition events it completed.
  /// arrival is the wall-clock instant the frame entered the system (queue
  /// push time in realtime mode); the single-argument form stamps it on
  /// entry, which is the batch-mode behavior.
  std::vector<RecognitionEvent> feed_frame(const Frame& frame,
                                           Clock::time_point arrival);
  std::vector<RecognitionEvent> feed_frame(const Frame& frame);

  /// Flushes the trailing resampler window. A motion still in progress has
  /// no end and is dropped, consistent with the threshold rule.
  std::vector<RecognitionEvent> finish();

  const VelocitySeries& velocity_series() const { return series_; }
  const Segmenter::Counters& segment_counters() const {
    return segmenter_.counters();
  }
  std::size_t frames_fed() const { return frames_fed_; }

 private:
  std::vector<RecognitionEvent> process_sample(const VelocitySample& sample,
                                               Clock::time_point arrival);

  ModelParams model_;
  PipelineSettings settings_;
  Resampler resampler_;
  Segmenter segmenter_;
  std::optional<Frame> prev_;
  VelocitySeries series_;
  std::size_t frames_fed_ = 0;
};

/// Everything one stream run produces.
struct RunResult {
  std::vector<RecognitionEvent> events;  // ordered by segment t_end
  VelocitySeries series;
  Segmenter::Counters counters;
  std::size_t frames = 0;
};

/// Batch mode: frames are pulled and processed as fast as possible,
/// single-threaded and fully deterministic. Realtime mode: a producer
/// thread paces frames at the source rate into a bounded queue
/// (backpressure, no drops) and recognition_ms measures true end-to-end
/// latency.
RunResult run_stream(FrameStreamReader& source, const ModelParams& model,
                     const PipelineSettings& settings);

/// Same, over frames already in memory (used by tests and benchmarks).
RunResult run_frames(const std::vector<Frame>& frames, double fps,
                     const ModelParams& model,
                     const PipelineSettings& settings);

/// Events CSV: t_start_s,t_end_s,K,label,score_c,score_nc,recognition_ms.
/// With deterministic_latency the recognition_ms column is written as 0.000
/// so batch outputs are byte-stable; measured latencies stay available in
/// the events themselves.
void write_events_csv(std::ostream& out,
                      const std::vector<RecognitionEvent>& events,
                      bool deterministic_latency);

std::vector<double> recognition_times_ms(
    const std::vector<RecognitionEvent>& events);

}  // namespace careflow

#endif  // CAREFLOW_PIPELINE_HPP
