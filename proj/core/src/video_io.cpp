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

#include "careflow/video_io.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "careflow/errors.hpp"

namespace fs = std::filesystem;

namespace careflow {

namespace {

void check_frame_geometry(int width, int height) {
  if (width < 1 || height < 1) {
    throw DataError("video: frame dimensions must be positive");
  }
}

// Reads the dimensions from a PGM header without loading pixel data.
void read_pgm_header(const std::string& path, int* width, int* height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("video: cannot open '" + path + "'");
  std::string magic;
  int maxval = 0;
  if (!(in >> magic >> *width >> *height >> maxval) || magic != "P5" ||
      maxval != 255) {
    throw DataError("video: '" + path + "' is not an 8-bit binary PGM");
  }
  check_frame_geometry(*width, *height);
}

}  // namespace

void write_cfvid(const std::string& path, const std::vector<Frame>& frames,
                 double fps) {
  if (!(fps > 0.0)) throw ConfigError("video: fps must be > 0");
  if (frames.empty()) throw DataError("video: refusing to write zero frames");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("video: cannot open '" + path + "' for writing");
  char header[64];
  std::snprintf(header, sizeof(header), "CFVID %d %d %.9g\n", frames[0].width,
                frames[0].height, fps);
  out << header;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (!f.same_size(frames[0])) {
      throw DataError("video: frame " + std::to_string(i) +
                      " has mismatched dimensions");
    }
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  }
  out.flush();
  if (!out) throw IoError("video: write failed for '" + path + "'");
}

std::vector<Frame> read_cfvid(const std::string& path) {
  FrameStreamReader reader(path);
  std::vector<Frame> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return frames;
}

void write_pgm(const std::string& path, const Frame& frame) {
  check_frame_geometry(frame.width, frame.height);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("video: cannot open '" + path + "' for writing");
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  out.flush();
  if (!out) throw IoError("video: write failed for '" + path + "'");
}

Frame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("video: cannot open '" + path + "'");
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  if (!(in >> magic >> width >> height >> maxval) || magic != "P5" ||
      maxval != 255) {
    throw DataError("video: '" + path + "' is not an 8-bit binary PGM");
  }
  check_frame_geometry(width, height);
  in.get();  // the single whitespace byte after the header
  Frame f;
  f.width = width;
  f.height = height;
  f.pixels.resize(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(f.pixels.data()),
          static_cast<std::streamsize>(f.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.pixels.size())) {
    throw IoError("video: truncated PGM '" + path + "'");
  }
  return f;
}

void write_pgm_dir(const std::string& dir, const std::vector<Frame>& frames,
                   double fps) {
  if (!(fps > 0.0)) throw ConfigError("video: fps must be > 0");
  if (frames.empty()) throw DataError("video: refusing to write zero frames");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("video: cannot create directory '" + dir + "'");
  std::ofstream index(fs::path(dir) / "index.txt", std::ios::binary);
  if (!index) throw IoError("video: cannot write index in '" + dir + "'");
  char head[32];
  std::snprintf(head, sizeof(head), "CFVIDX %.9g\n", fps);
  index << head;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
    write_pgm((fs::path(dir) / name).string(), frames[i]);
    index << name << "\n";
  }
  index.flush();
  if (!index) throw IoError("video: index write failed in '" + dir + "'");
}

FrameStreamReader::FrameStreamReader(const std::string& path) {
  if (fs::is_directory(path)) {
    dir_mode_ = true;
    dir_ = path;
    const std::string index_path = (fs::path(path) / "index.txt").string();
    std::ifstream index(index_path, std::ios::binary);
    if (!index) {
      throw IoError("video: cannot open index '" + index_path + "'");
    }
    std::string line;
    if (!std::getline(index, line)) {
      throw DataError("video: empty index '" + index_path + "'");
    }
    std::istringstream hs(line);
    std::string magic;
    if (!(hs >> magic >> fps_) || magic != "CFVIDX" || !(fps_ > 0.0)) {
      throw DataError("video: bad index header '" + line + "'");
    }
    while (std::getline(index, line)) {
      if (!line.empty()) entries_.push_back(line);
    }
    if (!entries_.empty()) {
      read_pgm_header((fs::path(dir_) / entries_[0]).string(), &width_,
                      &height_);
    }
    return;
  }

  cfvid_.open(path, std::ios::binary);
  if (!cfvid_) throw IoError("video: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(cfvid_, line)) {
    throw DataError("video: missing CFVID header in '" + path + "'");
  }
  std::istringstream hs(line);
  std::string magic;
  if (!(hs >> magic >> width_ >> height_ >> fps_) || magic != "CFVID" ||
      !(fps_ > 0.0)) {
    throw DataError("video: bad CFVID header '" + line + "'");
  }
  check_frame_geometry(width_, height_);
}

std::optional<Frame> FrameStreamReader::next() {
  if (dir_mode_) {
    if (index_ >= entries_.size()) return std::nullopt;
    Frame f = read_pgm((fs::path(dir_) / entries_[index_]).string());
    if (index_ > 0 && (f.width != width_ || f.height != height_)) {
      throw DataError("video: frame " + std::to_string(index_) +
                      " has mismatched dimensions");
    }
    width_ = f.width;
    height_ = f.height;
    f.timestamp = static_cast<double>(index_) / fps_;
    ++index_;
    return f;
  }

  Frame f;
  f.width = width_;
  f.height = height_;
  f.pixels.resize(static_cast<std::size_t>(width_) * height_);
  cfvid_.read(reinterpret_cast<char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
  const std::streamsize got = cfvid_.gcount();
  if (got == 0) return std::nullopt;
  if (got != static_cast<std::streamsize>(f.pixels.size())) {
    throw IoError("video: truncated stream at frame " +
                  std::to_string(index_));
  }
  f.timestamp = static_cast<double>(index_) / fps_;
  ++index_;
  return f;
}

}  // namespace careflow
