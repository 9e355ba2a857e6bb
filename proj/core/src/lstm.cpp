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

#include "careflow/lstm.hpp"

#include <chrono>
#include <cmath>

#include "careflow/errors.hpp"
#include "careflow/rng.hpp"

namespace careflow {

namespace {

constexpr double kScoreClampLo = 1e-7;
constexpr double kScoreClampHi = 1.0 - 1e-7;

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw ConfigError(std::string("model: non-finite weights in ") + what);
  }
}

// Per-timestep activations cached for backpropagation, in processing order
// (step 0 is the first step the direction consumes).
struct DirCache {
  std::vector<Eigen::ArrayXd> i, f, g, o, tanh_c, c_prev, h_prev;
  std::vector<double> x;  // standardized input per step
  Eigen::VectorXd h_final;
};

// Runs one direction over the standardized inputs xs[0..valid-1]; reverse
// directions consume them back to front. Returns the final hidden state.
Eigen::VectorXd run_direction(const LstmDirection& d, int hidden,
                              const std::vector<double>& xs,
                              std::size_t valid, bool reverse,
                              DirCache* cache) {
  const int h_n = hidden;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(h_n);
  Eigen::ArrayXd c = Eigen::ArrayXd::Zero(h_n);
  if (cache) {
    cache->i.reserve(valid);
    cache->f.reserve(valid);
    cache->g.reserve(valid);
    cache->o.reserve(valid);
    cache->tanh_c.reserve(valid);
    cache->c_prev.reserve(valid);
    cache->h_prev.reserve(valid);
    cache->x.reserve(valid);
  }
  for (std::size_t s = 0; s < valid; ++s) {
    const std::size_t idx = reverse ? valid - 1 - s : s;
    const double x = xs[idx];
    const Eigen::VectorXd z = d.wx.col(0) * x + d.wh * h + d.b;
    const Eigen::ArrayXd i = sigmoid(z.head(h_n).array());
    const Eigen::ArrayXd f = sigmoid(z.segment(h_n, h_n).array());
    const Eigen::ArrayXd g = z.segment(2 * h_n, h_n).array().tanh();
    const Eigen::ArrayXd o = sigmoid(z.tail(h_n).array());
    const Eigen::ArrayXd c_new = f * c + i * g;
    const Eigen::ArrayXd tc = c_new.tanh();
    if (cache) {
      cache->i.push_back(i);
      cache->f.push_back(f);
      cache->g.push_back(g);
      cache->o.push_back(o);
      cache->tanh_c.push_back(tc);
      cache->c_prev.push_back(c);
      cache->h_prev.push_back(h.array());
      cache->x.push_back(x);
    }
    c = c_new;
    h = (o * tc).matrix();
  }
  if (cache) cache->h_final = h;
  return h;
}

// Backpropagates dL/dh_final through one direction, accumulating into grad.
void backprop_direction(const LstmDirection& d, int hidden,
                        const DirCache& cache, const Eigen::VectorXd& dh_final,
                        LstmDirection* grad) {
  const int h_n = hidden;
  Eigen::ArrayXd dh = dh_final.array();
  Eigen::ArrayXd dc = Eigen::ArrayXd::Zero(h_n);
  for (std::size_t s = cache.x.size(); s-- > 0;) {
    const Eigen::ArrayXd& i = cache.i[s];
    const Eigen::ArrayXd& f = cache.f[s];
    const Eigen::ArrayXd& g = cache.g[s];
    const Eigen::ArrayXd& o = cache.o[s];
    const Eigen::ArrayXd& tc = cache.tanh_c[s];
    const Eigen::ArrayXd do_ = dh * tc;
    dc += dh * o * (1.0 - tc * tc);
    const Eigen::ArrayXd di = dc * g;
    const Eigen::ArrayXd df = dc * cache.c_prev[s];
    const Eigen::ArrayXd dg = dc * i;
    Eigen::VectorXd dz(4 * h_n);
    dz.head(h_n) = (di * i * (1.0 - i)).matrix();
    dz.segment(h_n, h_n) = (df * f * (1.0 - f)).matrix();
    dz.segment(2 * h_n, h_n) = (dg * (1.0 - g * g)).matrix();
    dz.tail(h_n) = (do_ * o * (1.0 - o)).matrix();
    grad->wx.col(0) += dz * cache.x[s];
    grad->wh += dz * cache.h_prev[s].matrix().transpose();
    grad->b += dz;
    dh = (d.wh.transpose() * dz).array();
    dc = dc * f;
  }
}

std::vector<double> standardize(const ModelParams& p,
                                const std::vector<double>& values,
                                std::size_t valid) {
  std::vector<double> xs(valid);
  const double inv = 1.0 / p.feature_std;
  for (std::size_t i = 0; i < valid; ++i) {
    xs[i] = (values[i] - p.feature_mean) * inv;
    if (!std::isfinite(xs[i])) {
      throw DataError("forward: non-finite input value");
    }
  }
  return xs;
}

Eigen::Vector2d readout(const ModelParams& p, const Eigen::VectorXd& h_fwd,
                        const Eigen::VectorXd& h_bwd) {
  Eigen::VectorXd r(2 * p.hidden_units);
  r.head(p.hidden_units) = h_fwd;
  r.tail(p.hidden_units) = h_bwd;
  const Eigen::Vector2d logits = p.wo * r + p.bo;
  return Eigen::Vector2d(1.0 / (1.0 + std::exp(-logits[0])),
                         1.0 / (1.0 + std::exp(-logits[1])));
}

double clamped(double s) {
  return std::min(std::max(s, kScoreClampLo), kScoreClampHi);
}

double bce_one(const Eigen::Vector2d& scores, Label label) {
  const double y0 = label == Label::C ? 1.0 : 0.0;
  const double y1 = 1.0 - y0;
  const double s0 = clamped(scores[0]);
  const double s1 = clamped(scores[1]);
  const double l0 = -(y0 * std::log(s0) + (1.0 - y0) * std::log(1.0 - s0));
  const double l1 = -(y1 * std::log(s1) + (1.0 - y1) * std::log(1.0 - s1));
  return 0.5 * (l0 + l1);  // mean over the two output neurons
}

}  // namespace

void ModelParams::validate() const {
  if (input_dim != 1) {
    throw ConfigError("model: input_dim must be 1 (scalar velocity feature)");
  }
  if (hidden_units < 1) {
    throw ConfigError("model: hidden_units must be >= 1");
  }
  const int h4 = 4 * hidden_units;
  auto check_dir = [&](const LstmDirection& d, const char* name) {
    if (d.wx.rows() != h4 || d.wx.cols() != input_dim ||
        d.wh.rows() != h4 || d.wh.cols() != hidden_units ||
        d.b.size() != h4) {
      throw ConfigError(std::string("model: bad ") + name + " dimensions");
    }
    check_finite(d.wx, name);
    check_finite(d.wh, name);
    check_finite(d.b, name);
  };
  check_dir(fwd, "forward weights");
  check_dir(bwd, "backward weights");
  if (wo.rows() != 2 || wo.cols() != 2 * hidden_units || bo.size() != 2) {
    throw ConfigError("model: bad output-layer dimensions");
  }
  check_finite(wo, "output weights");
  check_finite(bo, "output bias");
  if (!(feature_std > 0.0) || !std::isfinite(feature_std) ||
      !std::isfinite(feature_mean)) {
    throw ConfigError("model: feature_std must be finite and > 0");
  }
}

ModelParams init_params(int hidden_units, int input_dim, std::uint64_t seed) {
  if (hidden_units < 1 || input_dim != 1) {
    throw ConfigError("init_params: hidden_units >= 1 and input_dim == 1");
  }
  std::mt19937_64 rng(seed);
  const int h4 = 4 * hidden_units;
  auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    // Row-major fill so the draw order matches the serialized layout.
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(r, c) = uniform_range(rng, -limit, limit);
      }
    }
    return m;
  };
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden_units = hidden_units;
  for (LstmDirection* d : {&p.fwd, &p.bwd}) {
    d->wx = glorot(h4, input_dim);
    d->wh = glorot(h4, hidden_units);
    d->b = Eigen::VectorXd::Zero(h4);
    d->b.segment(hidden_units, hidden_units).setConstant(1.0);  // forget gate
  }
  p.wo = glorot(2, 2 * hidden_units);
  p.bo = Eigen::VectorXd::Zero(2);
  p.validate();
  return p;
}

Eigen::Vector2d forward_scores(const ModelParams& params,
                               const std::vector<double>& values,
                               std::size_t valid_length) {
  params.validate();
  if (valid_length == 0) {
    throw DataError("forward: empty segment");
  }
  if (valid_length > values.size()) {
    throw DataError("forward: valid_length exceeds provided values");
  }
  const std::vector<double> xs = standardize(params, values, valid_length);
  const Eigen::VectorXd h_fwd =
      run_direction(params.fwd, params.hidden_units, xs, valid_length,
                    /*reverse=*/false, nullptr);
  const Eigen::VectorXd h_bwd =
      run_direction(params.bwd, params.hidden_units, xs, valid_length,
                    /*reverse=*/true, nullptr);
  return readout(params, h_fwd, h_bwd);
}

Eigen::Vector2d forward_scores(const ModelParams& params,
                               const std::vector<double>& values) {
  return forward_scores(params, values, values.size());
}

double bce_loss(const ModelParams& params,
                const std::vector<LabeledSequence>& batch) {
  if (batch.empty()) {
    throw DataError("loss: empty batch");
  }
  double total = 0.0;
  for (const LabeledSequence& entry : batch) {
    const Eigen::Vector2d s = forward_scores(params, entry.values);
    total += bce_one(s, entry.label);
  }
  return total / static_cast<double>(batch.size());
}

Gradients zero_gradients(const ModelParams& params) {
  Gradients g;
  const int h4 = 4 * params.hidden_units;
  for (LstmDirection* d : {&g.fwd, &g.bwd}) {
    d->wx = Eigen::MatrixXd::Zero(h4, params.input_dim);
    d->wh = Eigen::MatrixXd::Zero(h4, params.hidden_units);
    d->b = Eigen::VectorXd::Zero(h4);
  }
  g.wo = Eigen::MatrixXd::Zero(2, 2 * params.hidden_units);
  g.bo = Eigen::VectorXd::Zero(2);
  return g;
}

Gradients gradients(const ModelParams& params,
                    const std::vector<LabeledSequence>& batch,
                    double* loss_out) {
  params.validate();
  if (batch.empty()) {
    throw DataError("gradients: empty batch");
  }
  Gradients g = zero_gradients(params);
  const int h_n = params.hidden_units;
  double total_loss = 0.0;
  // Loss is the mean over batch entries and the 2 output neurons, so each
  // neuron's logit receives (s - y) / (2 batch).
  const double inv_scale = 1.0 / (2.0 * static_cast<double>(batch.size()));

  for (const LabeledSequence& entry : batch) {
    if (entry.values.empty()) {
      throw DataError("gradients: empty segment in batch");
    }
    const std::vector<double> xs =
        standardize(params, entry.values, entry.values.size());
    DirCache cf, cb;
    const Eigen::VectorXd h_fwd = run_direction(
        params.fwd, h_n, xs, xs.size(), /*reverse=*/false, &cf);
    const Eigen::VectorXd h_bwd = run_direction(
        params.bwd, h_n, xs, xs.size(), /*reverse=*/true, &cb);
    const Eigen::Vector2d s = readout(params, h_fwd, h_bwd);
    total_loss += bce_one(s, entry.label);

    const double y0 = entry.label == Label::C ? 1.0 : 0.0;
    Eigen::Vector2d dlogits;
    for (int j = 0; j < 2; ++j) {
      const double y = j == 0 ? y0 : 1.0 - y0;
      // The clamp is flat outside [lo, hi], so saturated scores pass no
      // gradient; inside, d(bce)/d(logit) collapses to s - y.
      if (s[j] <= kScoreClampLo || s[j] >= kScoreClampHi) {
        dlogits[j] = 0.0;
      } else {
        dlogits[j] = (s[j] - y) * inv_scale;
      }
    }

    Eigen::VectorXd r(2 * h_n);
    r.head(h_n) = h_fwd;
    r.tail(h_n) = h_bwd;
    g.wo += dlogits * r.transpose();
    g.bo += dlogits;
    const Eigen::VectorXd dr = params.wo.transpose() * dlogits;
    backprop_direction(params.fwd, h_n, cf, dr.head(h_n), &g.fwd);
    backprop_direction(params.bwd, h_n, cb, dr.tail(h_n), &g.bwd);
  }
  if (loss_out) *loss_out = total_loss / static_cast<double>(batch.size());
  return g;
}

Prediction predict(const ModelParams& params,
                   const std::vector<double>& values) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Vector2d s = forward_scores(params, values);
  const auto t1 = std::chrono::steady_clock::now();
  Prediction p;
  p.scores = {s[0], s[1]};
  // Exact ties resolve to NC: the conservative call for a robot observer.
  p.label = s[0] > s[1] ? Label::C : Label::NC;
  p.inference_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return p;
}

Prediction predict(const ModelParams& params, const Segment& segment) {
  return predict(params, segment.values);
}

std::vector<ParamView> param_views(ModelParams& p) {
  return {
      {p.fwd.wx.data(), static_cast<std::size_t>(p.fwd.wx.size())},
      {p.fwd.wh.data(), static_cast<std::size_t>(p.fwd.wh.size())},
      {p.fwd.b.data(), static_cast<std::size_t>(p.fwd.b.size())},
      {p.bwd.wx.data(), static_cast<std::size_t>(p.bwd.wx.size())},
      {p.bwd.wh.data(), static_cast<std::size_t>(p.bwd.wh.size())},
      {p.bwd.b.data(), static_cast<std::size_t>(p.bwd.b.size())},
      {p.wo.data(), static_cast<std::size_t>(p.wo.size())},
      {p.bo.data(), static_cast<std::size_t>(p.bo.size())},
  };
}

std::vector<ParamView> param_views(Gradients& g) {
  return {
      {g.fwd.wx.data(), static_cast<std::size_t>(g.fwd.wx.size())},
      {g.fwd.wh.data(), static_cast<std::size_t>(g.fwd.wh.size())},
      {g.fwd.b.data(), static_cast<std::size_t>(g.fwd.b.size())},
      {g.bwd.wx.data(), static_cast<std::size_t>(g.bwd.wx.size())},
      {g.bwd.wh.data(), static_cast<std::size_t>(g.bwd.wh.size())},
      {g.bwd.b.data(), static_cast<std::size_t>(g.bwd.b.size())},
      {g.wo.data(), static_cast<std::size_t>(g.wo.size())},
      {g.bo.data(), static_cast<std::size_t>(g.bo.size())},
  };
}

}  // namespace careflow
