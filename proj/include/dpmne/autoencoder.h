// Copyright 2026 The DPMNE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMNE_AUTOENCODER_H_
#define DPMNE_AUTOENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpmne/common.h"

namespace dpmne {

enum class Activation { kIdentity, kSigmoid, kTanh };

std::string ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

// Rows are samples, so a layer maps A (rows x in) to act(A * weight + bias).
struct DenseLayer {
  Matrix weight;  // in x out
  RowVector bias;  // 1 x out
  Activation activation = Activation::kIdentity;

  int in() const { return static_cast<int>(weight.rows()); }
  int out() const { return static_cast<int>(weight.cols()); }
};

// K encoder layers map the d_s raw features down to the code width d_s^h;
// K decoder layers mirror the widths back up to d_s.
struct AutoencoderParams {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  int input_dim() const { return encoder.empty() ? 0 : encoder.front().in(); }
  int code_dim() const { return encoder.empty() ? 0 : encoder.back().out(); }

  // Sum of squared Frobenius norms of all weight matrices (biases excluded).
  double WeightNormSq() const;
  // Total number of scalar parameters, weights and biases.
  int ParameterCount() const;
  // Throws Error("shape_mismatch") when the layer chain is inconsistent.
  void CheckShapes() const;

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  // `encoder_widths` lists the output width of every encoder layer; the
  // last entry is the code width. Hidden layers use `hidden`, the final
  // decoder layer uses `output`.
  static AutoencoderParams Init(int input_dim,
                                const std::vector<int>& encoder_widths,
                                Activation hidden, Activation output,
                                std::uint64_t seed);
};

// Forward pass through the encoder. Rows whose mask bit is false come out
// exactly zero and never touch the network.
Matrix Encode(const AutoencoderParams& params, const Matrix& x,
              const Mask& mask);

// Decoder forward pass over every row of `h`.
Matrix Decode(const AutoencoderParams& params, const Matrix& h);

// ||X - X~||_F^2 restricted to rows with a true mask bit.
double ReconstructionLoss(const Matrix& x, const Matrix& x_tilde,
                          const Mask& mask);

// Per-view objective of the autoencoder block:
//   ||I(X - X~)||^2 + alpha ||I(H - Y B)||^2 + lambda sum ||W||^2.
struct ViewLoss {
  double reconstruction = 0.0;
  double subspace = 0.0;
  double weight_norm = 0.0;

  double Total(double alpha, double lambda) const {
    return reconstruction + alpha * subspace + lambda * weight_norm;
  }
};

// The fixed inputs of one view's autoencoder block.
struct ViewProblem {
  const Matrix& x;
  const Mask& mask;
  const Matrix& y;       // n x d common embedding
  const Matrix& basis;   // d x d_s^h
  double alpha = 0.0;
  double lambda = 0.0;
};

ViewLoss EvaluateViewLoss(const AutoencoderParams& params,
                          const ViewProblem& problem);

// Analytic gradient of ViewLoss::Total by backpropagation. The result has
// the same layout as `params` (weights and biases hold derivatives).
AutoencoderParams ViewLossGradient(const AutoencoderParams& params,
                                   const ViewProblem& problem,
                                   ViewLoss* loss = nullptr);

struct OptimizerConfig {
  int steps = 5;
  double learning_rate = 1e-3;
  double armijo = 1e-4;
  int max_halvings = 60;
};

struct TrainResult {
  double loss_before = 0.0;
  double loss_after = 0.0;
  int accepted_steps = 0;
  // Step length to start from next time.
  double learning_rate = 0.0;
};

// Gradient descent with Armijo backtracking on the view loss. A step is
// only taken when it lowers the loss, so loss_after <= loss_before. Throws
// Error("non_finite") if the starting loss is not finite and
// Error("step_underflow") when max_halvings cannot find descent.
TrainResult TrainViewAutoencoder(AutoencoderParams& params,
                                 const ViewProblem& problem,
                                 const OptimizerConfig& config);

}  // namespace dpmne

#endif  // DPMNE_AUTOENCODER_H_
