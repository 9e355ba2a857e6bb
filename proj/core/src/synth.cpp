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

#include "careflow/synth.hpp"

#include <algorithm>
#include <cmath>

#include "careflow/errors.hpp"
#include "careflow/rng.hpp"

namespace careflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smoothed uniform noise in [lo, hi]: white noise passed through a few
// separable binomial blurs, then rescaled to full range. Gives dense local
// gradients everywhere, which the flow estimator needs.
std::vector<double> smooth_noise(int w, int h, std::mt19937_64& rng,
                                 int blur_passes, double lo, double hi) {
  std::vector<double> img(static_cast<std::size_t>(w) * h);
  for (double& p : img) p = uniform01(rng);
  std::vector<double> tmp(img.size());
  const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  auto clampi = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
  for (int pass = 0; pass < blur_passes; ++pass) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i) {
          acc += k[i + 2] * img[static_cast<std::size_t>(y) * w + clampi(x + i, w)];
        }
        tmp[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i) {
          acc += k[i + 2] * tmp[static_cast<std::size_t>(clampi(y + i, h)) * w + x];
        }
        img[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
  }
  double mn = img[0], mx = img[0];
  for (double p : img) {
    mn = std::min(mn, p);
    mx = std::max(mx, p);
  }
  const double scale = mx > mn ? (hi - lo) / (mx - mn) : 0.0;
  for (double& p : img) p = lo + (p - mn) * scale;
  return img;
}

double bilinear(const std::vector<double>& img, int w, int h, double x,
                double y) {
  x = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
  y = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 2 >= 0 ? w - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), h - 2 >= 0 ? h - 2 : 0);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double a = img[static_cast<std::size_t>(y0) * w + x0];
  const double b = img[static_cast<std::size_t>(y0) * w + x1];
  const double c = img[static_cast<std::size_t>(y1) * w + x0];
  const double d = img[static_cast<std::size_t>(y1) * w + x1];
  return a * (1 - fx) * (1 - fy) + b * fx * (1 - fy) + c * (1 - fx) * fy +
         d * fx * fy;
}

}  // namespace

void ProfileSpec::validate() const {
  if (!(duration_s >= 1.0) || !std::isfinite(duration_s)) {
    throw ConfigError("profile: duration must be >= 1 s");
  }
  if (!(sample_rate > 0.0)) {
    throw ConfigError("profile: sample_rate must be > 0");
  }
  if (!(tau > 0.0)) {
    throw ConfigError("profile: tau must be > 0");
  }
  if (!(peak_velocity > tau)) {
    throw ConfigError("profile: peak_velocity must exceed tau");
  }
  if (!(asymmetry > 0.0) || !(asymmetry < 1.0)) {
    throw ConfigError("profile: asymmetry must lie in (0, 1)");
  }
  if (!(noise_std >= 0.0)) {
    throw ConfigError("profile: noise_std must be >= 0");
  }
}

GeneratedProfile generate_profile(const ProfileSpec& spec) {
  spec.validate();
  const long k_count = std::lround(spec.duration_s * spec.sample_rate);
  const std::size_t k_n = static_cast<std::size_t>(std::max(k_count, 2L));
  const std::size_t k_peak = static_cast<std::size_t>(std::clamp(
      std::lround(spec.asymmetry * static_cast<double>(k_n)), 0L,
      static_cast<long>(k_n) - 1));
  const double floor_v = spec.tau + 0.1;
  const double amp = spec.peak_velocity - floor_v;

  std::mt19937_64 rng(spec.seed);
  GeneratedProfile out;
  out.label = spec.class_label;
  out.segment.values.resize(k_n);
  for (std::size_t k = 0; k < k_n; ++k) {
    double shape;
    if (k <= k_peak) {
      shape = k_peak == 0
                  ? 1.0
                  : 0.5 * (1.0 - std::cos(kPi * static_cast<double>(k) /
                                          static_cast<double>(k_peak)));
    } else {
      const double tail = static_cast<double>(k_n - 1 - k_peak);
      shape = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(k_n - 1 - k) /
                                    tail));
    }
    double v = floor_v + amp * shape;
    if (spec.noise_std > 0.0 && k != k_peak) {
      // Noise never pushes a value to or below tau, and the peak sample is
      // left exact so the constructed argmax survives.
      v += spec.noise_std * gaussian(rng);
      v = std::min(std::max(v, spec.tau + 0.05), spec.peak_velocity);
    }
    out.segment.values[k] = v;
  }
  out.segment.t_start = 1.0 / spec.sample_rate;
  out.segment.t_end = static_cast<double>(k_n) / spec.sample_rate;
  out.truth = kinematic_metrics(out.segment, spec.sample_rate);
  return out;
}

ClassDistributions ClassDistributions::identical() {
  ClassDistributions d;
  d.nc_duration_lo = d.c_duration_lo = 1.2;
  d.nc_duration_hi = d.c_duration_hi = 4.0;
  d.nc_asym_lo = d.c_asym_lo = 0.30;
  d.nc_asym_hi = d.c_asym_hi = 0.60;
  return d;
}

ProfileSpec sample_profile_spec(Label label, const ClassDistributions& dist,
                                std::mt19937_64& rng) {
  const bool is_c = label == Label::C;
  ProfileSpec spec;
  spec.class_label = label;
  spec.duration_s = is_c
                        ? uniform_range(rng, dist.c_duration_lo, dist.c_duration_hi)
                        : uniform_range(rng, dist.nc_duration_lo, dist.nc_duration_hi);
  spec.asymmetry = is_c ? uniform_range(rng, dist.c_asym_lo, dist.c_asym_hi)
                        : uniform_range(rng, dist.nc_asym_lo, dist.nc_asym_hi);
  spec.peak_velocity = uniform_range(rng, dist.peak_lo, dist.peak_hi);
  spec.noise_std = dist.noise_std;
  spec.seed = rng();
  return spec;
}

std::vector<GeneratedProfile> generate_corpus(std::size_t per_class,
                                              const ClassDistributions& dist,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GeneratedProfile> out;
  out.reserve(2 * per_class);
  for (Label label : {Label::C, Label::NC}) {
    for (std::size_t i = 0; i < per_class; ++i) {
      out.push_back(generate_profile(sample_profile_spec(label, dist, rng)));
    }
  }
  return out;
}

void SceneSpec::validate() const {
  if (width < 64 || height < 64) {
    throw ConfigError("scene: frame must be at least 64x64");
  }
  if (!(fps >= 15.0)) {
    throw ConfigError("scene: fps must be >= 15");
  }
  if (!(blob_radius >= 2.0)) {
    throw ConfigError("scene: blob_radius must be >= 2");
  }
  if (!(idle_before_s >= 0.0) || !(idle_after_s >= 0.0)) {
    throw ConfigError("scene: idle paddings must be >= 0");
  }
  const double margin = blob_radius + 2.0;
  for (const auto& p : path) {
    if (!(p[0] >= margin) || !(p[0] <= width - 1 - margin) ||
        !(p[1] >= margin) || !(p[1] <= height - 1 - margin)) {
      throw DataError("scene: path exits the frame (blob margin violated)");
    }
  }
  for (double v : speeds_pxs) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DataError("scene: speeds must be finite and >= 0");
    }
  }
}

RenderedScene render_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<double> background =
      smooth_noise(spec.width, spec.height, rng, 2, 40.0, 200.0);
  const int tex_n = static_cast<int>(std::ceil(2.0 * spec.blob_radius)) + 6;
  const std::vector<double> blob_tex =
      smooth_noise(tex_n, tex_n, rng, 2, 70.0, 255.0);

  // Cumulative arc lengths of the path polyline.
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < spec.path.size(); ++i) {
    const double dx = spec.path[i][0] - spec.path[i - 1][0];
    const double dy = spec.path[i][1] - spec.path[i - 1][1];
    cum.push_back(cum.back() + std::hypot(dx, dy));
  }
  const double path_len = cum.back();
  auto position_at = [&](double s) -> std::array<double, 2> {
    if (spec.path.empty()) {
      return {spec.width / 2.0, spec.height / 2.0};
    }
    if (spec.path.size() == 1 || path_len <= 0.0) return spec.path.front();
    s = std::min(std::max(s, 0.0), path_len);
    std::size_t i = 1;
    while (i + 1 < cum.size() && cum[i] < s) ++i;
    const double seg_len = cum[i] - cum[i - 1];
    const double f = seg_len > 0.0 ? (s - cum[i - 1]) / seg_len : 0.0;
    return {spec.path[i - 1][0] + f * (spec.path[i][0] - spec.path[i - 1][0]),
            spec.path[i - 1][1] + f * (spec.path[i][1] - spec.path[i - 1][1])};
  };

  // Speed over the frame interval starting at time t: 0 during the idle
  // paddings, otherwise the 15 Hz profile sample covering t.
  const double k_n = static_cast<double>(spec.speeds_pxs.size());
  auto speed_at = [&](double t) -> double {
    const double rel = t - spec.idle_before_s;
    if (rel < -1e-9 || spec.speeds_pxs.empty()) return 0.0;
    const double idx_f = std::floor(rel * 15.0 + 1e-9);
    if (idx_f >= k_n) return 0.0;
    return spec.speeds_pxs[static_cast<std::size_t>(std::max(idx_f, 0.0))];
  };

  const double motion_span =
      spec.speeds_pxs.empty() ? 0.0 : k_n / 15.0;
  const double total_s = spec.idle_before_s + motion_span + spec.idle_after_s;
  const std::size_t frame_count =
      static_cast<std::size_t>(std::ceil(total_s * spec.fps - 1e-9)) + 1;

  // Blob centers per frame, advancing along the path by speed/fps per
  // interval and clamping at the path end.
  std::vector<std::array<double, 2>> centers(frame_count);
  double s = 0.0;
  for (std::size_t j = 0; j < frame_count; ++j) {
    centers[j] = position_at(s);
    const double t_j = static_cast<double>(j) / spec.fps;
    s += speed_at(t_j) / spec.fps;
  }

  RenderedScene out;
  out.frames.reserve(frame_count);
  const double edge = 1.5;  // alpha falloff width at the blob rim
  for (std::size_t j = 0; j < frame_count; ++j) {
    Frame f;
    f.width = spec.width;
    f.height = spec.height;
    f.timestamp = static_cast<double>(j) / spec.fps;
    f.pixels.resize(static_cast<std::size_t>(spec.width) * spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        f.pixels[static_cast<std::size_t>(y) * spec.width + x] =
            static_cast<std::uint8_t>(std::lround(
                background[static_cast<std::size_t>(y) * spec.width + x]));
      }
    }
    const double cx = centers[j][0];
    const double cy = centers[j][1];
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - spec.blob_radius - 2)));
    const int x_hi = std::min(spec.width - 1,
                              static_cast<int>(std::ceil(cx + spec.blob_radius + 2)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - spec.blob_radius - 2)));
    const int y_hi = std::min(spec.height - 1,
                              static_cast<int>(std::ceil(cy + spec.blob_radius + 2)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const double d = std::hypot(dx, dy);
        const double alpha =
            std::min(std::max((spec.blob_radius - d) / edge, 0.0), 1.0);
        if (alpha <= 0.0) continue;
        // The texture is sampled in blob-local coordinates so the pattern
        // translates rigidly with the blob.
        const double tex = bilinear(blob_tex, tex_n, tex_n,
                                    dx + spec.blob_radius + 3.0,
                                    dy + spec.blob_radius + 3.0);
        const std::size_t at = static_cast<std::size_t>(y) * spec.width + x;
        const double mixed = alpha * tex + (1.0 - alpha) * f.pixels[at];
        f.pixels[at] = static_cast<std::uint8_t>(
            std::min(std::max(std::lround(mixed), 0L), 255L));
      }
    }
    out.frames.push_back(std::move(f));
  }

  // Ground truth from the positions actually rendered.
  bool any = false;
  for (std::size_t j = 0; j + 1 < frame_count; ++j) {
    const double dx = centers[j + 1][0] - centers[j][0];
    const double dy = centers[j + 1][1] - centers[j][1];
    if (std::hypot(dx, dy) > 1e-9) {
      const double t_later = static_cast<double>(j + 1) / spec.fps;
      if (!any) out.motion_start_s = t_later;
      out.motion_end_s = t_later;
      out.moving_pairs += 1;
      any = true;
    }
  }
  return out;
}

std::vector<std::array<double, 2>> sample_straight_path(int width, int height,
                                                        double margin,
                                                        double length,
                                                        std::mt19937_64& rng) {
  const double x_lo = margin;
  const double x_hi = static_cast<double>(width - 1) - margin;
  const double y_lo = margin;
  const double y_hi = static_cast<double>(height - 1) - margin;
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) {
    throw DataError("path: margin leaves no room inside the frame");
  }
  const double diag = std::hypot(x_hi - x_lo, y_hi - y_lo);
  if (length > diag) {
    throw DataError("path: requested length does not fit inside the frame");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x0 = uniform_range(rng, x_lo, x_hi);
    const double y0 = uniform_range(rng, y_lo, y_hi);
    const double ang = uniform_range(rng, 0.0, 2.0 * kPi);
    const double x1 = x0 + length * std::cos(ang);
    const double y1 = y0 + length * std::sin(ang);
    if (x1 >= x_lo && x1 <= x_hi && y1 >= y_lo && y1 <= y_hi) {
      return {{x0, y0}, {x1, y1}};
    }
  }
  // Deterministic fallback: lay the path along the box diagonal.
  const double f = length / diag;
  return {{x_lo, y_lo}, {x_lo + f * (x_hi - x_lo), y_lo + f * (y_hi - y_lo)}};
}

SceneSample sample_scene(Label label, const ClassDistributions& dist,
                         int width, int height, double fps,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SceneSample out;
  out.label = label;
  const ProfileSpec pspec = sample_profile_spec(label, dist, rng);
  out.profile = generate_profile(pspec);

  out.spec.width = width;
  out.spec.height = height;
  out.spec.fps = fps;
  out.spec.speeds_pxs = out.profile.segment.values;
  double travel = 0.0;
  for (double v : out.spec.speeds_pxs) travel += v / 15.0;
  const double margin = out.spec.blob_radius + 3.0;
  out.spec.path =
      sample_straight_path(width, height, margin, travel + 2.0, rng);
  out.spec.seed = rng();
  return out;
}

}  // namespace careflow
