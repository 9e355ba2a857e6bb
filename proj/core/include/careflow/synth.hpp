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

#ifndef CAREFLOW_SYNTH_HPP
#define CAREFLOW_SYNTH_HPP

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "careflow/frame.hpp"
#include "careflow/label.hpp"
#include "careflow/segmenter.hpp"
#include "careflow/stats.hpp"

namespace careflow {

/// Description of one synthetic single-peak velocity profile on the 15 Hz
/// feature clock.
struct ProfileSpec {
  Label class_label = Label::C;
  double duration_s = 3.0;      // >= 1.0 so the segmenter keeps it
  double peak_velocity = 25.0;  // px/s, must exceed tau
  double asymmetry = 0.4;       // target peak position as a fraction in (0,1)
  double noise_std = 0.4;       // px/s of additive clipped noise
  std::uint64_t seed = 0;
  double sample_rate = 15.0;
  double tau = 5.25;            // interior values are kept above this

  void validate() const;  // throws ConfigError on an inconsistent spec
};

struct GeneratedProfile {
  Segment segment;  // timestamps (k+1)/rate, k = 0..K-1
  Label label = Label::C;
  KinematicMetrics truth;  // measured on the emitted values
};

/// Skewed raised-cosine bell: value floor tau + 0.1 at both ends, exact peak
/// at index round(asymmetry * K), plus seeded clipped Gaussian noise.
/// Deterministic given the spec.
GeneratedProfile generate_profile(const ProfileSpec& spec);

/// Uniform class-conditional distributions over profile parameters. The
/// defaults make class C slower with an earlier peak than NC; identical()
/// collapses both classes onto the same distribution so labels carry no
/// signal (a leakage guard for training experiments).
struct ClassDistributions {
  double c_duration_lo = 2.5, c_duration_hi = 4.0;
  double c_asym_lo = 0.30, c_asym_hi = 0.45;
  double nc_duration_lo = 1.2, nc_duration_hi = 2.5;
  double nc_asym_lo = 0.45, nc_asym_hi = 0.60;
  double peak_lo = 15.0, peak_hi = 40.0;  // shared by both classes
  double noise_std = 0.4;

  static ClassDistributions identical();
};

/// Draws one profile spec for the given label; consumes a fixed number of
/// RNG values regardless of label.
ProfileSpec sample_profile_spec(Label label, const ClassDistributions& dist,
                                std::mt19937_64& rng);

/// per_class profiles of each label (C block first), deterministic in seed.
std::vector<GeneratedProfile> generate_corpus(std::size_t per_class,
                                              const ClassDistributions& dist,
                                              std::uint64_t seed);

/// Description of a rendered grayscale scene: a textured blob translating
/// along a polyline over a static textured background, its speed following
/// the 15 Hz samples in speeds_pxs.
struct SceneSpec {
  int width = 320;
  int height = 240;
  double fps = 15.0;         // >= 15
  double blob_radius = 22.0;
  std::uint64_t seed = 0;    // textures
  std::vector<std::array<double, 2>> path;  // waypoints, px
  std::vector<double> speeds_pxs;           // 15 Hz speed samples, px/s
  double idle_before_s = 1.0;  // static frames before the motion
  double idle_after_s = 1.0;   // static frames after it

  void validate() const;  // throws DataError when the path exits the frame
};

struct RenderedScene {
  std::vector<Frame> frames;    // timestamps j/fps
  double motion_start_s = 0.0;  // later-frame time of the first moving pair
  double motion_end_s = 0.0;    // later-frame time of the last moving pair
  std::size_t moving_pairs = 0;
};

/// Deterministic given the spec. A zero-length path (fewer than two distinct
/// waypoints) renders a fully static scene.
RenderedScene render_scene(const SceneSpec& spec);

/// Straight path of the given length that keeps a margin to every frame
/// edge; placement is sampled from rng. Throws DataError when no such
/// path fits.
std::vector<std::array<double, 2>> sample_straight_path(int width, int height,
                                                        double margin,
                                                        double length,
                                                        std::mt19937_64& rng);

/// One fully resolved scene drawn from the class distributions: profile,
/// fitting path, and texture seed.
struct SceneSample {
  SceneSpec spec;
  Label label = Label::C;
  GeneratedProfile profile;
};

SceneSample sample_scene(Label label, const ClassDistributions& dist,
                         int width, int height, double fps,
                         std::uint64_t seed);

}  // namespace careflow

#endif  // CAREFLOW_SYNTH_HPP
