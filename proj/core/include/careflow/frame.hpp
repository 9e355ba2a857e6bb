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

#ifndef CAREFLOW_FRAME_HPP
#define CAREFLOW_FRAME_HPP

#include <cstdint>
#include <vector>

namespace careflow {

/// One 8-bit grayscale camera image with a monotonic timestamp in seconds.
/// Pixels are stored row-major, pixels.size() == width * height.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  double timestamp = 0.0;

  Frame() = default;
  Frame(int w, int h, double t = 0.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0), timestamp(t) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool same_size(const Frame& other) const {
    return width == other.width && height == other.height;
  }
};

}  // namespace careflow

#endif  // CAREFLOW_FRAME_HPP
