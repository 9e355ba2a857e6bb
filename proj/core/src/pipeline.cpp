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

#include "careflow/pipeline.hpp"

#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>
#include <utility>

#include "careflow/bounded_queue.hpp"
#include "careflow/errors.hpp"
#include "careflow/flow.hpp"

namespace careflow {

Pipeline::Pipeline(const ModelParams& model, const PipelineSettings& settings,
                   double frames_rate)
    : model_(model),
      settings_(settings),
      resampler_(frames_rate, settings.feature),
      segmenter_(settings.segmenter) {
  model_.validate();
  settings_.validate();
}

std::vector<RecognitionEvent> Pipeline::process_sample(
    const VelocitySample& sample, Clock::time_point arrival) {
  std::vector<RecognitionEvent> events;
  series_.samples.push_back(sample);
  std::optional<Segment> seg = segmenter_.feed(sample);
  if (seg) {
    const Prediction pred = predict(model_, *seg);
    RecognitionEvent ev;
    ev.segment = std::move(*seg);
    ev.label = pred.label;
    ev.scores = pred.scores;
    ev.recognition_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - arrival)
            .count();
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<RecognitionEvent> Pipeline::feed_frame(const Frame& frame,
                                                   Clock::time_point arrival) {
  std::vector<RecognitionEvent> events;
  frames_fed_ += 1;
  if (!prev_) {
    prev_ = frame;
    return events;
  }
  const FlowField flow = compute_flow(*prev_, frame, settings_.flow);
  const MeanMotion mm = mean_motion(flow, settings_.flow);
  const double v =
      tangential_velocity(mm.u_mean, mm.v_mean, settings_.feature);
  prev_ = frame;
  // The velocity of a frame pair is stamped with the later frame's time.
  for (const VelocitySample& s :
       resampler_.feed(frame.timestamp, v, mm.active_count)) {
    for (RecognitionEvent& ev : process_sample(s, arrival)) {
      events.push_back(std::move(ev));
    }
  }
  return events;
}

std::vector<RecognitionEvent> Pipeline::feed_frame(const Frame& frame) {
  return feed_frame(frame, Clock::now());
}

std::vector<RecognitionEvent> Pipeline::finish() {
  std::vector<RecognitionEvent> events;
  const Clock::time_point arrival = Clock::now();
  for (const VelocitySample& s : resampler_.flush()) {
    for (RecognitionEvent& ev : process_sample(s, arrival)) {
      events.push_back(std::move(ev));
    }
  }
  segmenter_.reset();  // a motion without an end is discarded, not emitted
  return events;
}

namespace {

RunResult run_batch(FrameStreamReader& source, const ModelParams& model,
                    const PipelineSettings& settings) {
  Pipeline pipe(model, settings, source.fps());
  RunResult out;
  while (auto frame = source.next()) {
    for (RecognitionEvent& ev : pipe.feed_frame(*frame)) {
      out.events.push_back(std::move(ev));
    }
  }
  for (RecognitionEvent& ev : pipe.finish()) {
    out.events.push_back(std::move(ev));
  }
  out.series = pipe.velocity_series();
  out.counters = pipe.segment_counters();
  out.frames = pipe.frames_fed();
  return out;
}

struct TimedFrame {
  Frame frame;
  Pipeline::Clock::time_point arrival;
};

RunResult run_realtime(FrameStreamReader& source, const ModelParams& model,
                       const PipelineSettings& settings) {
  Pipeline pipe(model, settings, source.fps());
  BoundedQueue<TimedFrame> queue(settings.queue_capacity);
  std::exception_ptr producer_error;

  // The producer releases each frame at its own timestamp relative to the
  // stream start, emulating a live camera; a full queue blocks it
  // (backpressure) rather than dropping frames.
  std::thread producer([&] {
    try {
      const auto start = Pipeline::Clock::now();
      while (auto frame = source.next()) {
        const auto due =
            start + std::chrono::duration_cast<Pipeline::Clock::duration>(
                        std::chrono::duration<double>(frame->timestamp));
        std::this_thread::sleep_until(due);
        TimedFrame tf{std::move(*frame), Pipeline::Clock::now()};
        if (!queue.push(std::move(tf))) return;
      }
    } catch (...) {
      producer_error = std::current_exception();
    }
    queue.close();
  });

  RunResult out;
  try {
    while (auto tf = queue.pop()) {
      for (RecognitionEvent& ev : pipe.feed_frame(tf->frame, tf->arrival)) {
        out.events.push_back(std::move(ev));
      }
    }
  } catch (...) {
    queue.close();
    producer.join();
    throw;
  }
  producer.join();
  if (producer_error) std::rethrow_exception(producer_error);
  for (RecognitionEvent& ev : pipe.finish()) {
    out.events.push_back(std::move(ev));
  }
  out.series = pipe.velocity_series();
  out.counters = pipe.segment_counters();
  out.frames = pipe.frames_fed();
  return out;
}

}  // namespace

RunResult run_stream(FrameStreamReader& source, const ModelParams& model,
                     const PipelineSettings& settings) {
  return settings.realtime ? run_realtime(source, model, settings)
                           : run_batch(source, model, settings);
}

RunResult run_frames(const std::vector<Frame>& frames, double fps,
                     const ModelParams& model,
                     const PipelineSettings& settings) {
  Pipeline pipe(model, settings, fps);
  RunResult out;
  for (const Frame& f : frames) {
    for (RecognitionEvent& ev : pipe.feed_frame(f)) {
      out.events.push_back(std::move(ev));
    }
  }
  for (RecognitionEvent& ev : pipe.finish()) {
    out.events.push_back(std::move(ev));
  }
  out.series = pipe.velocity_series();
  out.counters = pipe.segment_counters();
  out.frames = pipe.frames_fed();
  return out;
}

void write_events_csv(std::ostream& out,
                      const std::vector<RecognitionEvent>& events,
                      bool deterministic_latency) {
  out << "t_start_s,t_end_s,K,label,score_c,score_nc,recognition_ms\n";
  char buf[192];
  for (const RecognitionEvent& ev : events) {
    const double ms = deterministic_latency ? 0.0 : ev.recognition_ms;
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%zu,%s,%.9g,%.9g,%.3f\n",
                  ev.segment.t_start, ev.segment.t_end,
                  ev.segment.values.size(), to_string(ev.label).c_str(),
                  ev.scores[0], ev.scores[1], ms);
    out << buf;
  }
}

std::vector<double> recognition_times_ms(
    const std::vector<RecognitionEvent>& events) {
  std::vector<double> out;
  out.reserve(events.size());
  for (const RecognitionEvent& ev : events) out.push_back(ev.recognition_ms);
  return out;
}

}  // namespace careflow
