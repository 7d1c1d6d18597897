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

#ifndef DPMNE_TESTS_GRADIENT_CHECK_H_
#define DPMNE_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <random>

#include "dpmne/trainer.h"
#include "oracles.h"

namespace dpmne::testing {

struct GradientErrors {
  double y = 0.0;
  double basis = 0.0;    // worst over views
  double weights = 0.0;  // worst over every weight and bias block
};

// Random instance with t views, n nodes, embedding width d and code width
// `code`; biases and bases are randomized so no block sits at zero.
struct SmallProblem {
  MultiplexNetwork network;
  Hyperparams hyper;
  EmbeddingState state;
  ProximityStack proximity;
};

inline SmallProblem MakeSmallProblem(std::uint64_t seed, int n = 16, int d = 3,
                                     int t = 2, int code = 5) {
  std::mt19937_64 rng(seed);
  SynthConfig cfg;
  cfg.n = n;
  cfg.communities = 2;
  cfg.views.assign(t, SynthViewConfig{});
  for (int s = 0; s < t; ++s) {
    cfg.views[s].dim = 4 + s;
    cfg.views[s].intra_prob = 0.4;
    cfg.views[s].inter_prob = 0.1;
    cfg.views[s].pdr = 0.25;
  }
  cfg.seed = seed;
  SmallProblem p;
  p.network = SynthGenerate(cfg);
  p.hyper.dim = d;
  p.hyper.encoder_widths = {code + 2, code};
  p.hyper.alpha = 0.8;
  p.hyper.beta = 0.3;
  p.hyper.lambda = 0.05;
  p.hyper.seed = seed;
  p.state = Initialize(p.network, p.hyper);
  p.state.y = oracle::RandomMatrix(n, d, rng, 0.4);
  std::normal_distribution<double> g(0.0, 0.2);
  for (int s = 0; s < t; ++s) {
    p.state.basis[s] = oracle::RandomMatrix(d, code, rng, 0.5);
    for (auto* stack : {&p.state.autoencoders[s].encoder,
                        &p.state.autoencoders[s].decoder})
      for (DenseLayer& l : *stack)
        for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = g(rng);
    const ViewData& v = p.network.views[s];
    p.state.hidden[s] = Encode(p.state.autoencoders[s], v.features, v.mask);
  }
  p.proximity = BuildProximity(p.network, p.hyper.proximity);
  return p;
}

// Analytic block gradients against central differences (step 1e-6) of
// the full objective.
inline GradientErrors CheckFullGradient(SmallProblem& p) {
  GradientErrors err;
  EmbeddingState& st = p.state;
  auto objective = [&] {
    return Objective(st, p.network, p.proximity, p.hyper);
  };
  const double h = 1e-6;

  err.y = oracle::RelativeError(GradY(st, p.network, p.proximity, p.hyper),
                                oracle::FiniteDifference(objective, &st.y, h));
  for (int s = 0; s < p.network.t(); ++s) {
    err.basis = std::max(
        err.basis,
        oracle::RelativeError(GradB(st, p.network, p.hyper, s),
                              oracle::FiniteDifference(objective, &st.basis[s], h)));
    const ViewData& v = p.network.views[s];
    ViewProblem problem{v.features, v.mask, st.y, st.basis[s], p.hyper.alpha,
                        p.hyper.lambda};
    AutoencoderParams& ae = st.autoencoders[s];
    const AutoencoderParams grad = ViewLossGradient(ae, problem);
    auto check = [&](const Matrix& analytic, Matrix* param) {
      err.weights = std::max(
          err.weights,
          oracle::RelativeError(analytic, oracle::FiniteDifference(objective, param, h)));
    };
    for (size_t l = 0; l < ae.encoder.size(); ++l) {
      check(grad.encoder[l].weight, &ae.encoder[l].weight);
      Matrix bias = ae.encoder[l].bias;
      auto with_bias = [&] {
        ae.encoder[l].bias = bias;
        return objective();
      };
      err.weights = std::max(
          err.weights, oracle::RelativeError(
                           grad.encoder[l].bias,
                           oracle::FiniteDifference(with_bias, &bias, h)));
      ae.encoder[l].bias = bias;
    }
    for (size_t l = 0; l < ae.decoder.size(); ++l) {
      check(grad.decoder[l].weight, &ae.decoder[l].weight);
      Matrix bias = ae.decoder[l].bias;
      auto with_bias = [&] {
        ae.decoder[l].bias = bias;
        return objective();
      };
      err.weights = std::max(
          err.weights, oracle::RelativeError(
                           grad.decoder[l].bias,
                           oracle::FiniteDifference(with_bias, &bias, h)));
      ae.decoder[l].bias = bias;
    }
  }
  return err;
}

}  // namespace dpmne::testing

#endif  // DPMNE_TESTS_GRADIENT_CHECK_H_
