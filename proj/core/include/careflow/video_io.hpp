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

#ifndef CAREFLOW_VIDEO_IO_HPP
#define CAREFLOW_VIDEO_IO_HPP

#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "careflow/frame.hpp"

namespace careflow {

/// Codec-free frame container: one text header line
///   CFVID <width> <height> <fps>
/// followed by the raw 8-bit grayscale frames back to back.
void write_cfvid(const std::string& path, const std::vector<Frame>& frames,
                 double fps);
std::vector<Frame> read_cfvid(const std::string& path);

/// Binary portable graymap (P5, maxval 255).
void write_pgm(const std::string& path, const Frame& frame);
Frame read_pgm(const std::string& path);

/// Directory alternative: one PGM per frame plus an index file
///   CFVIDX <fps>
///   <frame file name>           (one per line, relative to the directory)
/// Creates the directory when missing.
void write_pgm_dir(const std::string& dir, const std::vector<Frame>& frames,
                   double fps);

/// Streaming reader over either container; a directory is read through its
/// index file, anything else as CFVID. Frames are stamped index/fps.
/// Throws IoError (unreadable, truncated — message carries the frame index)
/// or DataError (malformed header or inconsistent frame sizes).
class FrameStreamReader {
 public:
  explicit FrameStreamReader(const std::string& path);

  int width() const { return width_; }
  int height() const { return height_; }
  double fps() const { return fps_; }

  /// Next frame, or nullopt at end of stream.
  std::optional<Frame> next();

  /// Index of the next frame to be returned.
  std::size_t index() const { return index_; }

 private:
  bool dir_mode_ = false;
  std::ifstream cfvid_;
  std::string dir_;
  std::vector<std::string> entries_;
  int width_ = 0;
  int height_ = 0;
  double fps_ = 0.0;
  std::size_t index_ = 0;
};

}  // namespace careflow

#endif  // CAREFLOW_VIDEO_IO_HPP
