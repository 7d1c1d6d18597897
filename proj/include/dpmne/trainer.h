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

#ifndef DPMNE_TRAINER_H_
#define DPMNE_TRAINER_H_

#include <cstdint>
#include <vector>

#include "dpmne/autoencoder.h"
#include "dpmne/common.h"
#include "dpmne/graph_model.h"
#include "dpmne/proximity.h"

namespace dpmne {

struct Hyperparams {
  double alpha = 1.0;
  double beta = 0.1;
  double lambda = 0.01;
  int dim = 128;
  int max_iters = 60;
  int y_steps = 5;
  int h_steps = 5;
  double y_learning_rate = 1e-2;
  double h_learning_rate = 1e-3;
  std::vector<int> encoder_widths = {200};
  Activation hidden_activation = Activation::kTanh;
  Activation output_activation = Activation::kSigmoid;
  ProximityConfig proximity;
  // Stop once the relative objective decrease stays below early_stop_tol
  // for early_stop_patience consecutive iterations.
  double early_stop_tol = 1e-6;
  int early_stop_patience = 3;
  std::uint64_t seed = 1;

  // Throws Error("invalid_config").
  void Check() const;
};

struct EmbeddingState {
  Matrix y;                                  // n x d
  std::vector<Matrix> basis;                 // per view, d x d_s^h
  std::vector<Matrix> hidden;                // per view, n x d_s^h (cached)
  std::vector<AutoencoderParams> autoencoders;
  std::vector<double> objective_trace;       // [0] is the initial value
  // Step lengths carried between iterations so training can resume.
  double y_learning_rate = 0.0;
  std::vector<double> h_learning_rates;
  int iterations = 0;
  int stall_count = 0;
};

// The four parts of the joint objective. Regularizers: ||Y^T Y - I||^2 for
// the embedding, ||B^s||^2 for the bases, weight Frobenius norms for the
// autoencoders.
struct ObjectiveTerms {
  double reconstruction = 0.0;
  double subspace = 0.0;
  double laplacian = 0.0;  // tr(Y^T L Y)
  double reg_y = 0.0;
  double reg_b = 0.0;
  double reg_w = 0.0;

  double Total(const Hyperparams& h) const {
    return reconstruction + h.alpha * subspace + h.beta * laplacian +
           h.lambda * (reg_y + reg_b + reg_w);
  }
};

// Proximity stack built from every view's adjacency.
ProximityStack BuildProximity(const MultiplexNetwork& network,
                              const ProximityConfig& config);

// Evaluates every term from scratch (codes are re-encoded from the
// autoencoder parameters, not read from the cache).
ObjectiveTerms ComputeObjective(const EmbeddingState& state,
                                const MultiplexNetwork& network,
                                const ProximityStack& proximity);

// Throws Error("non_finite") when the total is not finite.
double Objective(const EmbeddingState& state, const MultiplexNetwork& network,
                 const ProximityStack& proximity, const Hyperparams& hyper);

// ||Y^T Y - I_d||_F^2.
double OrthogonalityPenalty(const Matrix& y);

// Gradient of the Y block:
//   alpha sum_s 2 I^s (Y B^s - H^s) B^s^T + 2 beta L Y + 4 lambda Y (Y^T Y - I)
Matrix GradY(const EmbeddingState& state, const MultiplexNetwork& network,
             const ProximityStack& proximity, const Hyperparams& hyper);

// Gradient of alpha ||I^s(H^s - Y B^s)||^2 + lambda ||B^s||^2 in B^s.
Matrix GradB(const EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper, int view);

// Closed-form minimizer (alpha Y^T I^s Y + lambda I)^-1 alpha Y^T I^s H^s.
// Throws Error("singular_system") when the system matrix is singular
// (lambda = 0 with rank-deficient masked Y).
Matrix SolveBasis(const Matrix& y, const Matrix& hidden, const Mask& mask,
                  double alpha, double lambda);

// Runs hyper.y_steps backtracking gradient steps on the Y sub-problem.
void UpdateY(EmbeddingState& state, const MultiplexNetwork& network,
             const ProximityStack& proximity, const Hyperparams& hyper);

// Replaces every B^s by its closed-form minimizer.
void UpdateB(EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper);

// Trains every view's autoencoder against the fixed Y and B, then
// refreshes the cached codes.
void UpdateH(EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper);

// Deterministic warm start: Y from the top singular vectors of the
// concatenated present features, seeded autoencoders, codes, and one B
// update. Only rows with a true mask bit are read; validation is left to
// the caller.
EmbeddingState Initialize(const MultiplexNetwork& network,
                          const Hyperparams& hyper);

// Runs up to `iterations` more Y -> B -> H sweeps, appending to the trace.
// Returns false when early stopping fired.
bool Resume(EmbeddingState& state, const MultiplexNetwork& network,
            const ProximityStack& proximity, const Hyperparams& hyper,
            int iterations);

// Validates the network, builds the proximity stack and trains for
// hyper.max_iters iterations (or until early stopping).
EmbeddingState Train(const MultiplexNetwork& network,
                     const Hyperparams& hyper);

// y_i B^s: the latent estimate of node i's code in view s, whether or not
// the node is observed there.
Vector ReconstructMissing(const EmbeddingState& state, int node, int view);

}  // namespace dpmne

#endif  // DPMNE_TRAINER_H_
