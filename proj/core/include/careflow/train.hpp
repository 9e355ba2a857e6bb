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

#ifndef CAREFLOW_TRAIN_HPP
#define CAREFLOW_TRAIN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "careflow/lstm.hpp"
#include "careflow/stats.hpp"

namespace careflow {

struct TrainConfig {
  int batch_size = 30;
  double initial_lr = 1e-3;
  double lr_decay_rate = 0.95;  // lr at epoch e (0-based) = initial * rate^e
  int patience = 5;             // epochs without val improvement before stop
  int max_epochs = 200;
  std::uint64_t seed = 0;
  double train_frac = 0.72;
  double val_frac = 0.08;
  double test_frac = 0.20;
  int hidden_units = 32;

  void validate() const;  // fractions sum to 1, patience >= 1, batch >= 1
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  bool improved = false;
};

struct TrainResult {
  ModelParams params;  // weights of the best-validation epoch
  std::vector<EpochLog> log;
  int best_epoch = 0;     // 1-based epoch whose weights are returned
  int stopped_epoch = 0;  // 1-based last epoch that ran
  std::optional<ClassificationReport> test_report;  // absent if test split empty
  std::vector<std::size_t> train_indices;  // into the input dataset
  std::vector<std::size_t> val_indices;
  std::vector<std::size_t> test_indices;
};

/// Trains the bidirectional classifier. Deterministic given cfg.seed: the
/// same dataset and config always produce bit-identical parameters. The
/// split is stratified per class; feature standardization statistics are
/// computed on the training split only and stored in the returned model.
/// Throws DataError when the dataset lacks one of the classes or is too
/// small to split.
TrainResult train(const std::vector<LabeledSequence>& dataset,
                  const TrainConfig& cfg);

/// Writes per-epoch losses plus the stopping summary as plain text.
std::string training_log_text(const TrainResult& result);

}  // namespace careflow

#endif  // CAREFLOW_TRAIN_HPP
