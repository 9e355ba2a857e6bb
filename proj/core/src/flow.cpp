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

#include "careflow/flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "careflow/errors.hpp"

namespace careflow {
namespace {

constexpr int kMinLevelSize = 32;   // smallest pyramid level dimension
constexpr int kMinFrameSize = 16;

// Plain float raster used for pyramid levels and intermediate planes.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

  float* row(int y) { return data.data() + static_cast<std::size_t>(y) * width; }
  const float* row(int y) const { return data.data() + static_cast<std::size_t>(y) * width; }
};

Plane to_plane(const Frame& f) {
  Plane p(f.width, f.height);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) p.data[i] = static_cast<float>(f.pixels[i]);
  return p;
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Separable Gaussian smoothing with replicated edges.
Plane gaussian_blur(const Plane& src, double sigma, int ksize) {
  const int n = ksize / 2;
  std::vector<float> kernel(ksize);
  double s = 0.0;
  for (int i = -n; i <= n; ++i) {
    double w = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
    kernel[i + n] = static_cast<float>(w);
    s += w;
  }
  for (auto& k : kernel) k = static_cast<float>(k / s);

  Plane tmp(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    const float* in = src.row(y);
    float* out = tmp.row(y);
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -n; i <= n; ++i) acc += kernel[i + n] * in[clampi(x + i, 0, src.width - 1)];
      out[x] = static_cast<float>(acc);
    }
  }
  Plane dst(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    float* out = dst.row(y);
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int i = -n; i <= n; ++i) acc += kernel[i + n] * tmp.row(clampi(y + i, 0, src.height - 1))[x];
      out[x] = static_cast<float>(acc);
    }
  }
  return dst;
}

Plane resize_bilinear(const Plane& src, int dst_w, int dst_h) {
  Plane dst(dst_w, dst_h);
  if (dst_w == src.width && dst_h == src.height) {
    dst.data = src.data;
    return dst;
  }
  const double sx = static_cast<double>(src.width) / dst_w;
  const double sy = static_cast<double>(src.height) / dst_h;
  for (int y = 0; y < dst_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = clampi(y0 + 1, 0, src.height - 1);
    y0 = clampi(y0, 0, src.height - 1);
    float* out = dst.row(y);
    const float* r0 = src.row(y0);
    const float* r1 = src.row(y1);
    for (int x = 0; x < dst_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = clampi(x0 + 1, 0, src.width - 1);
      x0 = clampi(x0, 0, src.width - 1);
      double top = r0[x0] + (r0[x1] - r0[x0]) * wx;
      double bot = r1[x0] + (r1[x1] - r1[x0]) * wx;
      out[x] = static_cast<float>(top + (bot - top) * wy);
    }
  }
  return dst;
}

// Quadratic polynomial expansion of an image under a separable Gaussian
// applicability. Output is 5 channels per pixel:
//   [0] y-linear  [1] x-linear  [2] y^2  [3] x^2  [4] xy
// The constant term is not needed for displacement estimation.
struct PolyExpansion {
  int width = 0;
  int height = 0;
  std::vector<float> coef;  // width*height*5, row-major, interleaved

  const float* at(int x, int y) const {
    return coef.data() + (static_cast<std::size_t>(y) * width + x) * 5;
  }
};

PolyExpansion poly_expansion(const Plane& src, int n_radius, double sigma) {
  const int n = n_radius;
  const int width = src.width;
  const int height = src.height;

  std::vector<double> g(2 * n + 1), xg(2 * n + 1), xxg(2 * n + 1);
  double s = 0.0;
  for (int x = -n; x <= n; ++x) {
    g[x + n] = std::exp(-(double(x) * x) / (2.0 * sigma * sigma));
    s += g[x + n];
  }
  for (int x = -n; x <= n; ++x) {
    g[x + n] /= s;
    xg[x + n] = x * g[x + n];
    xxg[x + n] = double(x) * x * g[x + n];
  }

  // Gram matrix of the basis {1, x, y, x^2, y^2, xy} under the separable
  // applicability g(x)g(y); odd moments vanish.
  Eigen::Matrix<double, 6, 6> G = Eigen::Matrix<double, 6, 6>::Zero();
  for (int y = -n; y <= n; ++y) {
    for (int x = -n; x <= n; ++x) {
      double w = g[y + n] * g[x + n];
      G(0, 0) += w;
      G(1, 1) += w * x * x;
      G(3, 3) += w * x * x * x * x;
      G(5, 5) += w * x * x * y * y;
    }
  }
  G(2, 2) = G(1, 1);
  G(0, 3) = G(3, 0) = G(0, 4) = G(4, 0) = G(1, 1);
  G(4, 4) = G(3, 3);
  G(3, 4) = G(4, 3) = G(5, 5);
  Eigen::Matrix<double, 6, 6> invG = G.inverse();
  const double ig11 = invG(1, 1);
  const double ig03 = invG(0, 3);
  const double ig33 = invG(3, 3);
  const double ig55 = invG(5, 5);

  PolyExpansion dst;
  dst.width = width;
  dst.height = height;
  dst.coef.assign(static_cast<std::size_t>(width) * height * 5, 0.0f);

  // Vertical then horizontal correlation; 3 running channels per column:
  // plain, y-antisymmetric, y^2-weighted. Borders replicate.
  std::vector<double> rowbuf((width + 2 * n) * 3);
  double* row = rowbuf.data() + n * 3;

  for (int y = 0; y < height; ++y) {
    const float* src0 = src.row(y);
    for (int x = 0; x < width; ++x) {
      row[x * 3] = src0[x] * g[n];
      row[x * 3 + 1] = 0.0;
      row[x * 3 + 2] = 0.0;
    }
    for (int k = 1; k <= n; ++k) {
      const double g0 = g[n + k];
      const double g1 = xg[n + k];
      const double g2 = xxg[n + k];
      const float* above = src.row(clampi(y - k, 0, height - 1));
      const float* below = src.row(clampi(y + k, 0, height - 1));
      for (int x = 0; x < width; ++x) {
        double p = double(above[x]) + below[x];
        row[x * 3] += g0 * p;
        row[x * 3 + 1] += g1 * (double(below[x]) - above[x]);
        row[x * 3 + 2] += g2 * p;
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) {
        row[(-1 - i) * 3 + c] = row[0 * 3 + c];
        row[(width + i) * 3 + c] = row[(width - 1) * 3 + c];
      }
    }

    float* drow = dst.coef.data() + static_cast<std::size_t>(y) * width * 5;
    for (int x = 0; x < width; ++x) {
      double b1 = row[x * 3] * g[n];
      double b2 = 0.0, b4 = 0.0, b6 = 0.0;
      double b3 = row[x * 3 + 1] * g[n];
      double b5 = row[x * 3 + 2] * g[n];
      for (int k = 1; k <= n; ++k) {
        const double tg = row[(x + k) * 3] + row[(x - k) * 3];
        b1 += tg * g[n + k];
        b4 += tg * xxg[n + k];
        b2 += (row[(x + k) * 3] - row[(x - k) * 3]) * xg[n + k];
        b3 += (row[(x + k) * 3 + 1] + row[(x - k) * 3 + 1]) * g[n + k];
        b6 += (row[(x + k) * 3 + 1] - row[(x - k) * 3 + 1]) * xg[n + k];
        b5 += (row[(x + k) * 3 + 2] + row[(x - k) * 3 + 2]) * g[n + k];
      }
      drow[x * 5] = static_cast<float>(b3 * ig11);
      drow[x * 5 + 1] = static_cast<float>(b2 * ig11);
      drow[x * 5 + 2] = static_cast<float>(b1 * ig03 + b5 * ig33);
      drow[x * 5 + 3] = static_cast<float>(b1 * ig03 + b4 * ig33);
      drow[x * 5 + 4] = static_cast<float>(b6 * ig55);
    }
  }
  return dst;
}

// Per-pixel normal equations for the displacement solve, 5 channels:
// [g11 g12 g22 h1 h2] where G = A^T A and h = A^T db for the averaged
// polynomial A and the (displacement-compensated) coefficient difference db.
struct NormalEqs {
  int width = 0;
  int height = 0;
  std::vector<float> m;  // width*height*5
};

void update_matrices(const PolyExpansion& r0, const PolyExpansion& r1,
                     const Plane& du, const Plane& dv, NormalEqs& out) {
  const int width = r0.width;
  const int height = r0.height;
  constexpr int kBorder = 5;
  static const float kEdgeWeight[kBorder] = {0.14f, 0.14f, 0.4472f, 0.4472f, 0.4472f};

  out.width = width;
  out.height = height;
  out.m.resize(static_cast<std::size_t>(width) * height * 5);

  for (int y = 0; y < height; ++y) {
    const float* urow = du.row(y);
    const float* vrow = dv.row(y);
    float* mrow = out.m.data() + static_cast<std::size_t>(y) * width * 5;
    for (int x = 0; x < width; ++x) {
      const float dx = urow[x];
      const float dy = vrow[x];
      const float fx = x + dx;
      const float fy = y + dy;
      const int x1 = static_cast<int>(std::lround(fx));
      const int y1 = static_cast<int>(std::lround(fy));
      const float* p0 = r0.at(x, y);

      float ry, rx, ryy, rxx, rxy;
      if (x1 >= 0 && x1 < width && y1 >= 0 && y1 < height) {
        const float* p1 = r1.at(x1, y1);
        ry = p1[0];
        rx = p1[1];
        ryy = (p0[2] + p1[2]) * 0.5f;
        rxx = (p0[3] + p1[3]) * 0.5f;
        rxy = (p0[4] + p1[4]) * 0.25f;
      } else {
        ry = rx = 0.0f;
        ryy = p0[2];
        rxx = p0[3];
        rxy = p0[4] * 0.5f;
      }

      // db, compensated by the current displacement estimate
      float dby = (p0[0] - ry) * 0.5f;
      float dbx = (p0[1] - rx) * 0.5f;
      dby += ryy * dy + rxy * dx;
      dbx += rxy * dy + rxx * dx;

      if (x < kBorder || x >= width - kBorder || y < kBorder || y >= height - kBorder) {
        float scale = (x < kBorder ? kEdgeWeight[x] : 1.0f) *
                      (x >= width - kBorder ? kEdgeWeight[width - x - 1] : 1.0f) *
                      (y < kBorder ? kEdgeWeight[y] : 1.0f) *
                      (y >= height - kBorder ? kEdgeWeight[height - y - 1] : 1.0f);
        dby *= scale;
        dbx *= scale;
        ryy *= scale;
        rxx *= scale;
        rxy *= scale;
      }

      mrow[x * 5] = ryy * ryy + rxy * rxy;        // g11 (y,y)
      mrow[x * 5 + 1] = (ryy + rxx) * rxy;        // g12
      mrow[x * 5 + 2] = rxx * rxx + rxy * rxy;    // g22 (x,x)
      mrow[x * 5 + 3] = ryy * dby + rxy * dbx;    // h1 (y)
      mrow[x * 5 + 4] = rxy * dby + rxx * dbx;    // h2 (x)
    }
  }
}

// Box-averages the normal equations over the window and solves the 2x2
// system per pixel. Overwrites du/dv.
void update_flow(const NormalEqs& eqs, int window_size, Plane& du, Plane& dv) {
  const int width = eqs.width;
  const int height = eqs.height;
  const int m = window_size / 2;
  const double scale = 1.0 / (double(window_size) * window_size);

  // vertical running sums, replicate rows
  std::vector<double> vsum(static_cast<std::size_t>(width) * 5, 0.0);
  std::vector<double> hsum((width + 2 * m) * 5, 0.0);
  auto mrow = [&](int y) {
    return eqs.m.data() + static_cast<std::size_t>(clampi(y, 0, height - 1)) * width * 5;
  };

  for (int j = -m; j <= m; ++j) {
    const float* src = mrow(j);
    for (std::size_t i = 0; i < vsum.size(); ++i) vsum[i] += src[i];
  }

  for (int y = 0; y < height; ++y) {
    if (y > 0) {
      const float* add = mrow(y + m);
      const float* sub = mrow(y - m - 1);
      for (std::size_t i = 0; i < vsum.size(); ++i) vsum[i] += double(add[i]) - sub[i];
    }

    // horizontal running sums over vsum, replicate columns
    double* h = hsum.data() + m * 5;
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 5; ++c) h[x * 5 + c] = vsum[x * 5 + c];
    for (int i = 1; i <= m; ++i)
      for (int c = 0; c < 5; ++c) {
        h[(-i) * 5 + c] = h[c];
        h[(width - 1 + i) * 5 + c] = h[(width - 1) * 5 + c];
      }

    double acc[5];
    for (int c = 0; c < 5; ++c) {
      acc[c] = 0.0;
      for (int i = -m; i <= m; ++i) acc[c] += h[i * 5 + c];
    }

    float* urow = du.row(y);
    float* vrow = dv.row(y);
    for (int x = 0; x < width; ++x) {
      if (x > 0)
        for (int c = 0; c < 5; ++c) acc[c] += h[(x + m) * 5 + c] - h[(x - m - 1) * 5 + c];

      const double g11 = acc[0] * scale;
      const double g12 = acc[1] * scale;
      const double g22 = acc[2] * scale;
      const double h1 = acc[3] * scale;
      const double h2 = acc[4] * scale;
      const double idet = 1.0 / (g11 * g22 - g12 * g12 + 1e-3);
      vrow[x] = static_cast<float>((g22 * h1 - g12 * h2) * idet);
      urow[x] = static_cast<float>((g11 * h2 - g12 * h1) * idet);
    }
  }
}

}  // namespace

void FlowConfig::validate() const {
  if (pyramid_levels < 0) throw ConfigError("flow: pyramid_levels must be >= 0");
  if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0))
    throw ConfigError("flow: pyramid_scale must lie in (0,1)");
  if (window_size < 3 || window_size % 2 == 0)
    throw ConfigError("flow: window_size must be odd and >= 3");
  if (polynomial_neighborhood < 3 || polynomial_neighborhood % 2 == 0)
    throw ConfigError("flow: polynomial_neighborhood must be odd and >= 3");
  if (!(polynomial_sigma > 0.0)) throw ConfigError("flow: polynomial_sigma must be > 0");
  if (iterations < 1) throw ConfigError("flow: iterations must be >= 1");
  if (magnitude_threshold < 0.0) throw ConfigError("flow: magnitude_threshold must be >= 0");
}

FlowField compute_flow(const Frame& prev, const Frame& next, const FlowConfig& cfg) {
  cfg.validate();
  if (!prev.same_size(next)) throw DataError("compute_flow: frame dimensions differ");
  const int width = prev.width;
  const int height = prev.height;
  const int min_dim = std::min(width, height);
  if (min_dim < cfg.polynomial_neighborhood || min_dim < cfg.window_size)
    throw ConfigError("compute_flow: frame smaller than polynomial neighborhood or window");
  if (width < kMinFrameSize || height < kMinFrameSize)
    throw DataError("compute_flow: frames must be at least 16x16");

  // Trim pyramid so the coarsest level keeps enough support.
  int levels = 0;
  {
    double scale = 1.0;
    for (int k = 0; k < cfg.pyramid_levels; ++k) {
      scale *= cfg.pyramid_scale;
      if (width * scale < kMinLevelSize || height * scale < kMinLevelSize) break;
      levels = k + 1;
    }
  }

  const Plane full0 = to_plane(prev);
  const Plane full1 = to_plane(next);

  Plane u, v;
  bool have_flow = false;
  NormalEqs eqs;

  for (int k = levels; k >= 0; --k) {
    const double scale = std::pow(cfg.pyramid_scale, k);
    const int lw = static_cast<int>(std::lround(width * scale));
    const int lh = static_cast<int>(std::lround(height * scale));

    Plane i0, i1;
    if (k == 0) {
      i0 = full0;
      i1 = full1;
    } else {
      const double sigma = (1.0 / scale - 1.0) * 0.5;
      int ssize = std::max(3, static_cast<int>(std::lround(sigma * 5)) | 1);
      i0 = resize_bilinear(gaussian_blur(full0, sigma, ssize), lw, lh);
      i1 = resize_bilinear(gaussian_blur(full1, sigma, ssize), lw, lh);
    }

    const PolyExpansion r0 = poly_expansion(i0, cfg.polynomial_neighborhood / 2, cfg.polynomial_sigma);
    const PolyExpansion r1 = poly_expansion(i1, cfg.polynomial_neighborhood / 2, cfg.polynomial_sigma);

    if (!have_flow) {
      u = Plane(lw, lh);
      v = Plane(lw, lh);
      have_flow = true;
    } else {
      const float grow = static_cast<float>(1.0 / cfg.pyramid_scale);
      u = resize_bilinear(u, lw, lh);
      v = resize_bilinear(v, lw, lh);
      for (auto& val : u.data) val *= grow;
      for (auto& val : v.data) val *= grow;
    }

    update_matrices(r0, r1, u, v, eqs);
    for (int it = 0; it < cfg.iterations; ++it) {
      update_flow(eqs, cfg.window_size, u, v);
      if (it + 1 < cfg.iterations) update_matrices(r0, r1, u, v, eqs);
    }
  }

  FlowField out(width, height);
  out.u = std::move(u.data);
  out.v = std::move(v.data);
  return out;
}

MeanMotion mean_motion(const FlowField& flow, const FlowConfig& cfg) {
  MeanMotion result;
  double su = 0.0, sv = 0.0;
  std::size_t n = 0;
  const std::size_t total = flow.u.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double fu = flow.u[i];
    const double fv = flow.v[i];
    if (!std::isfinite(fu) || !std::isfinite(fv))
      throw DataError("mean_motion: non-finite flow value");
    if (std::sqrt(fu * fu + fv * fv) > cfg.magnitude_threshold) {
      su += fu;
      sv += fv;
      ++n;
    }
  }
  if (n > 0) {
    result.u_mean = su / static_cast<double>(n);
    result.v_mean = sv / static_cast<double>(n);
    result.active_count = n;
  }
  return result;
}

}  // namespace careflow
