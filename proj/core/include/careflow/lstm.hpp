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

#ifndef CAREFLOW_LSTM_HPP
#define CAREFLOW_LSTM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "careflow/label.hpp"
#include "careflow/segmenter.hpp"

namespace careflow {

/// Weights of one LSTM direction. Gate pre-activations are stacked along the
/// rows in the fixed order [input, forget, cell-candidate, output], H rows
/// each, so every matrix has 4H rows.
struct LstmDirection {
  Eigen::MatrixXd wx;  // 4H x input_dim
  Eigen::MatrixXd wh;  // 4H x H
  Eigen::VectorXd b;   // 4H
};

/// Full bidirectional classifier: two LSTM directions, a 2-unit sigmoid
/// output layer over the concatenated final hidden states, and the feature
/// standardizer baked in at training time. Score index 0 is class C,
/// index 1 is class NC.
struct ModelParams {
  int input_dim = 1;
  int hidden_units = 32;  // per direction
  LstmDirection fwd;
  LstmDirection bwd;
  Eigen::MatrixXd wo;  // 2 x 2H
  Eigen::VectorXd bo;  // 2
  double feature_mean = 0.0;
  double feature_std = 1.0;

  /// Throws ConfigError on dimension mismatch, non-finite weights, or
  /// feature_std <= 0.
  void validate() const;
};

/// Glorot-uniform weights (±sqrt(6/(rows+cols)) per matrix), zero biases
/// except the forget gate at 1.0.
ModelParams init_params(int hidden_units, int input_dim, std::uint64_t seed);

/// One training example: raw (unstandardized) velocity values plus the label.
struct LabeledSequence {
  std::vector<double> values;  // px/s
  Label label = Label::C;
};

/// Scores in (0,1) for [C, NC]. Only the first valid_length entries of
/// values are read; trailing padding of any length never influences the
/// result. Throws DataError when valid_length == 0 or exceeds values.size().
Eigen::Vector2d forward_scores(const ModelParams& params,
                               const std::vector<double>& values,
                               std::size_t valid_length);
Eigen::Vector2d forward_scores(const ModelParams& params,
                               const std::vector<double>& values);

/// Mean binary cross-entropy over the batch and over both output neurons,
/// with scores clamped to [1e-7, 1 - 1e-7]. Labels are one-hot: C -> (1,0),
/// NC -> (0,1).
double bce_loss(const ModelParams& params,
                const std::vector<LabeledSequence>& batch);

/// Gradient of bce_loss with respect to every weight, same shapes as the
/// parameters they correspond to.
struct Gradients {
  LstmDirection fwd;
  LstmDirection bwd;
  Eigen::MatrixXd wo;
  Eigen::VectorXd bo;
};

/// Exact backpropagation-through-time gradients of bce_loss over the batch.
/// When loss_out is non-null the batch loss is stored there (same value as
/// bce_loss, computed in one pass).
Gradients gradients(const ModelParams& params,
                    const std::vector<LabeledSequence>& batch,
                    double* loss_out = nullptr);

/// Classifier output for one segment.
struct Prediction {
  Label label = Label::NC;
  std::array<double, 2> scores{0.5, 0.5};  // [C, NC]
  double inference_ms = 0.0;               // wall-clock forward-pass time
};

/// argmax of forward_scores; exact ties resolve to NC.
Prediction predict(const ModelParams& params, const Segment& segment);
Prediction predict(const ModelParams& params,
                   const std::vector<double>& values);

/// Flat views over every trainable array, in the fixed order
/// fwd.wx, fwd.wh, fwd.b, bwd.wx, bwd.wh, bwd.b, wo, bo. ModelParams and
/// Gradients expose the same layout, which the optimizer and the
/// finite-difference harness rely on.
struct ParamView {
  double* data;
  std::size_t size;
};
std::vector<ParamView> param_views(ModelParams& params);
std::vector<ParamView> param_views(Gradients& grads);

/// Zero-filled gradients shaped like the given model.
Gradients zero_gradients(const ModelParams& params);

}  // namespace careflow

#endif  // CAREFLOW_LSTM_HPP
