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

#include "careflow/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "careflow/errors.hpp"
#include "careflow/rng.hpp"

namespace careflow {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kImproveEps = 1e-6;  // val loss must drop by more than this

struct AdamState {
  std::vector<std::vector<double>> m;  // one slab per parameter array
  std::vector<std::vector<double>> v;
  long long t = 0;

  explicit AdamState(const std::vector<ParamView>& views) {
    m.reserve(views.size());
    v.reserve(views.size());
    for (const ParamView& pv : views) {
      m.emplace_back(pv.size, 0.0);
      v.emplace_back(pv.size, 0.0);
    }
  }
};

void adam_step(std::vector<ParamView>& params,
               const std::vector<ParamView>& grads, AdamState& state,
               double lr) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.t));
  for (std::size_t a = 0; a < params.size(); ++a) {
    double* p = params[a].data;
    const double* g = grads[a].data;
    double* m = state.m[a].data();
    double* v = state.v[a].data();
    for (std::size_t i = 0; i < params[a].size; ++i) {
      m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
      v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }
  }
}

std::vector<LabeledSequence> gather(const std::vector<LabeledSequence>& data,
                                    const std::vector<std::size_t>& idx) {
  std::vector<LabeledSequence> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (patience < 1) throw ConfigError("train: patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
  if (hidden_units < 1) throw ConfigError("train: hidden_units must be >= 1");
  if (!(initial_lr >= 0.0) || !std::isfinite(initial_lr)) {
    throw ConfigError("train: initial_lr must be >= 0");
  }
  if (!(lr_decay_rate > 0.0) || lr_decay_rate > 1.0) {
    throw ConfigError("train: lr_decay_rate must be in (0, 1]");
  }
  const bool frac_ok = train_frac > 0.0 && val_frac >= 0.0 &&
                       test_frac >= 0.0 &&
                       std::abs(train_frac + val_frac + test_frac - 1.0) <
                           1e-9;
  if (!frac_ok) {
    throw ConfigError(
        "train: split fractions must be nonnegative and sum to 1 with a "
        "positive training share");
  }
}

TrainResult train(const std::vector<LabeledSequence>& dataset,
                  const TrainConfig& cfg) {
  cfg.validate();
  for (const LabeledSequence& s : dataset) {
    if (s.values.empty()) throw DataError("train: empty sequence in dataset");
  }

  // Per-class index pools, in dataset order.
  std::vector<std::size_t> pool_c, pool_nc;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].label == Label::C ? pool_c : pool_nc).push_back(i);
  }
  if (pool_c.empty() || pool_nc.empty()) {
    throw DataError("train: dataset must contain both classes");
  }

  // One RNG stream drives, in order: the per-class split shuffles (C first),
  // weight initialization, then every per-epoch shuffle. Keeping the
  // consumption order fixed is what makes training bit-reproducible.
  std::mt19937_64 rng(cfg.seed);

  TrainResult res;
  auto split_class = [&](std::vector<std::size_t>& pool) {
    shuffle_vector(pool, rng);
    const std::size_t m = pool.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::lround(static_cast<double>(m) * cfg.train_frac));
    std::size_t n_val = static_cast<std::size_t>(
        std::lround(static_cast<double>(m) * cfg.val_frac));
    if (cfg.val_frac > 0.0 && n_val == 0 && m >= 2) n_val = 1;
    if (n_train == 0) n_train = 1;
    while (n_train + n_val > m) {
      if (n_val > 0) {
        --n_val;
      } else {
        --n_train;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i < n_train) {
        res.train_indices.push_back(pool[i]);
      } else if (i < n_train + n_val) {
        res.val_indices.push_back(pool[i]);
      } else {
        res.test_indices.push_back(pool[i]);
      }
    }
  };
  split_class(pool_c);
  split_class(pool_nc);
  if (res.train_indices.empty()) {
    throw DataError("train: training split is empty");
  }
  if (res.val_indices.empty()) {
    throw DataError(
        "train: validation split is empty; dataset too small for early "
        "stopping");
  }

  // Standardization statistics from the training split only (population
  // variance over all its values).
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i : res.train_indices) {
    for (double v : dataset[i].values) {
      sum += v;
      count += 1.0;
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (std::size_t i : res.train_indices) {
    for (double v : dataset[i].values) {
      ss += (v - mean) * (v - mean);
    }
  }
  const double stdev = std::sqrt(ss / count);
  if (!(stdev > 0.0)) {
    throw DataError("train: training values have zero variance");
  }

  ModelParams params = init_params(cfg.hidden_units, 1, rng());
  params.feature_mean = mean;
  params.feature_std = stdev;

  std::vector<LabeledSequence> train_set = gather(dataset, res.train_indices);
  std::vector<LabeledSequence> val_set = gather(dataset, res.val_indices);
  std::vector<LabeledSequence> test_set = gather(dataset, res.test_indices);

  std::vector<ParamView> pviews = param_views(params);
  AdamState adam(pviews);

  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_improve = 0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = cfg.initial_lr * std::pow(cfg.lr_decay_rate, epoch);
    shuffle_vector(order, rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<LabeledSequence> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(train_set[order[i]]);
      }
      Gradients g = gradients(params, batch);
      std::vector<ParamView> gviews = param_views(g);
      adam_step(pviews, gviews, adam, lr);
    }

    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.train_loss = bce_loss(params, train_set);
    log.val_loss = bce_loss(params, val_set);
    log.improved = log.val_loss < best_val - kImproveEps;
    if (log.improved) {
      best_val = log.val_loss;
      best = params;
      res.best_epoch = log.epoch;
      epochs_since_improve = 0;
    } else {
      ++epochs_since_improve;
    }
    res.log.push_back(log);
    res.stopped_epoch = log.epoch;
    if (epochs_since_improve >= cfg.patience) break;
  }

  res.params = std::move(best);
  if (!test_set.empty()) {
    std::vector<Label> pred, truth;
    pred.reserve(test_set.size());
    truth.reserve(test_set.size());
    for (const LabeledSequence& s : test_set) {
      pred.push_back(predict(res.params, s.values).label);
      truth.push_back(s.label);
    }
    res.test_report = classification_report(pred, truth);
  }
  return res;
}

std::string training_log_text(const TrainResult& result) {
  std::ostringstream os;
  os << "epoch,train_loss,val_loss,lr,improved\n";
  for (const EpochLog& e : result.log) {
    char line[160];
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%d\n", e.epoch,
                  e.train_loss, e.val_loss, e.lr, e.improved ? 1 : 0);
    os << line;
  }
  os << "best_epoch," << result.best_epoch << "\n";
  os << "stopped_epoch," << result.stopped_epoch << "\n";
  if (result.test_report) {
    char acc[64];
    std::snprintf(acc, sizeof(acc), "test_accuracy,%.9g\n",
                  result.test_report->accuracy);
    os << acc;
  }
  return os.str();
}

}  // namespace careflow
