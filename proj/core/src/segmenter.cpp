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

#include "careflow/segmenter.hpp"

#include <cmath>
#include <sstream>

#include "careflow/errors.hpp"

namespace careflow {

void SegmenterConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("segmenter: tau must be a positive finite value");
  }
  if (!(min_duration >= 0.0) || !std::isfinite(min_duration)) {
    throw ConfigError("segmenter: min_duration must be >= 0");
  }
  if (!(max_duration > 0.0) || !std::isfinite(max_duration)) {
    throw ConfigError("segmenter: max_duration must be > 0");
  }
  if (max_duration < min_duration) {
    throw ConfigError("segmenter: max_duration must be >= min_duration");
  }
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ConfigError("segmenter: sample_rate must be > 0");
  }
  if (bridge_gap < 0) {
    throw ConfigError("segmenter: bridge_gap must be >= 0");
  }
}

Segmenter::Segmenter(const SegmenterConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  // A motion of K samples spans K/sample_rate seconds; keep it when that
  // duration reaches min_duration. lround keeps the boundary stable against
  // floating-point representations of min_duration * sample_rate.
  min_samples_ = static_cast<std::size_t>(
      std::lround(std::ceil(cfg_.min_duration * cfg_.sample_rate - 1e-9)));
  max_samples_ = static_cast<std::size_t>(
      std::lround(std::ceil(cfg_.max_duration * cfg_.sample_rate - 1e-9)));
  if (max_samples_ == 0) max_samples_ = 1;
}

std::optional<Segment> Segmenter::close_motion() {
  std::optional<Segment> out;
  const std::size_t k = buffer_.size();
  if (k >= min_samples_ && k > 0) {
    Segment seg;
    seg.values.reserve(k);
    for (const VelocitySample& s : buffer_) seg.values.push_back(s.v);
    seg.t_start = buffer_.front().t;
    seg.t_end = buffer_.back().t;
    counters_.emitted_samples += k;
    counters_.segments_emitted += 1;
    out = std::move(seg);
  } else {
    counters_.discarded_samples += k;
    if (k > 0) counters_.segments_discarded += 1;
  }
  // Whatever sub-tau run was pending never belonged to a motion.
  counters_.idle_samples += dip_.size();
  buffer_.clear();
  dip_.clear();
  in_motion_ = false;
  return out;
}

std::optional<Segment> Segmenter::feed(const VelocitySample& sample) {
  if (!std::isfinite(sample.t) || !std::isfinite(sample.v)) {
    throw DataError("segmenter: non-finite velocity sample");
  }
  if (have_last_t_ && !(sample.t > last_t_)) {
    std::ostringstream msg;
    msg << "segmenter: timestamps must be strictly increasing (got " << sample.t
        << " after " << last_t_ << ")";
    throw StreamError(msg.str());
  }
  last_t_ = sample.t;
  have_last_t_ = true;
  counters_.fed += 1;

  const bool above = sample.v > cfg_.tau;
  const bool below = sample.v < cfg_.tau;

  if (!in_motion_) {
    if (above) {
      in_motion_ = true;
      buffer_.push_back(sample);
    } else {
      counters_.idle_samples += 1;
    }
    return std::nullopt;
  }

  // In motion. Exactly-tau samples neither start nor end a motion: they are
  // kept as motion content.
  if (!below) {
    // A bridged dip becomes part of the motion once flanked by
    // suprathreshold samples on both sides.
    for (const VelocitySample& d : dip_) buffer_.push_back(d);
    dip_.clear();
    buffer_.push_back(sample);
    if (buffer_.size() >= max_samples_) {
      std::optional<Segment> seg = close_motion();
      if (seg) {
        seg->truncated = true;
        counters_.segments_truncated += 1;
      }
      return seg;
    }
    return std::nullopt;
  }

  // Sub-tau sample while in motion: tolerate up to bridge_gap of them.
  if (static_cast<int>(dip_.size()) < cfg_.bridge_gap) {
    dip_.push_back(sample);
    return std::nullopt;
  }

  // The dip is too long: the motion ended before it. Terminating samples are
  // not part of the motion.
  std::vector<VelocitySample> dropped = std::move(dip_);
  dip_.clear();
  std::optional<Segment> seg = close_motion();
  counters_.idle_samples += dropped.size() + 1;
  // close_motion() already accounted dip_ (now empty); the moved-out run and
  // the current terminator are idle.
  return seg;
}

void Segmenter::reset() {
  counters_.discarded_samples += buffer_.size();
  if (!buffer_.empty()) counters_.segments_discarded += 1;
  counters_.idle_samples += dip_.size();
  buffer_.clear();
  dip_.clear();
  in_motion_ = false;
}

}  // namespace careflow
