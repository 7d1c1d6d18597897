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

#include "dpmne/autoencoder.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dpmne/line_search.h"

namespace dpmne {

std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kTanh:
      return "tanh";
  }
  return "identity";
}

Activation ParseActivation(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  throw Error("invalid_config", "unknown activation '" + name + "'");
}

namespace {

void ApplyActivation(Activation a, Matrix& z) {
  switch (a) {
    case Activation::kIdentity:
      return;
    case Activation::kSigmoid:
      z = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      return;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      return;
  }
}

// Multiplies `upstream` in place by the activation derivative, written in
// terms of the activation output `a`.
void ScaleByDerivative(Activation act, const Matrix& a, Matrix& upstream) {
  switch (act) {
    case Activation::kIdentity:
      return;
    case Activation::kSigmoid:
      upstream.array() *= a.array() * (1.0 - a.array());
      return;
    case Activation::kTanh:
      upstream.array() *= 1.0 - a.array().square();
      return;
  }
}

Matrix Forward(const DenseLayer& layer, const Matrix& input) {
  Matrix z = input * layer.weight;
  z.rowwise() += layer.bias;
  ApplyActivation(layer.activation, z);
  return z;
}

std::vector<int> PresentRows(const Mask& mask) {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(mask.size()); ++i)
    if (mask[i]) rows.push_back(i);
  return rows;
}

Matrix Gather(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(rows.size(), m.cols());
  for (size_t k = 0; k < rows.size(); ++k) out.row(k) = m.row(rows[k]);
  return out;
}

// Layer outputs on the present rows: acts[0] is the input, acts[K] the
// code, acts[2K] the reconstruction.
std::vector<Matrix> ForwardAll(const AutoencoderParams& params,
                               const Matrix& input) {
  std::vector<Matrix> acts;
  acts.reserve(params.encoder.size() + params.decoder.size() + 1);
  acts.push_back(input);
  for (const DenseLayer& l : params.encoder) acts.push_back(Forward(l, acts.back()));
  for (const DenseLayer& l : params.decoder) acts.push_back(Forward(l, acts.back()));
  return acts;
}

void CheckProblem(const AutoencoderParams& params, const ViewProblem& p) {
  params.CheckShapes();
  const auto n = p.x.rows();
  if (p.x.cols() != params.input_dim())
    throw Error("shape_mismatch", "feature width differs from encoder input");
  if (static_cast<Eigen::Index>(p.mask.size()) != n)
    throw Error("shape_mismatch", "mask length differs from feature rows");
  if (p.y.rows() != n)
    throw Error("shape_mismatch", "embedding rows differ from feature rows");
  if (p.basis.rows() != p.y.cols() || p.basis.cols() != params.code_dim())
    throw Error("shape_mismatch", "basis must be d x code_dim");
}

AutoencoderParams ZerosLike(const AutoencoderParams& params) {
  AutoencoderParams g = params;
  for (auto* stack : {&g.encoder, &g.decoder}) {
    for (DenseLayer& l : *stack) {
      l.weight.setZero();
      l.bias.setZero();
    }
  }
  return g;
}

double SquaredNorm(const AutoencoderParams& g) {
  double s = 0.0;
  for (const auto* stack : {&g.encoder, &g.decoder}) {
    for (const DenseLayer& l : *stack)
      s += l.weight.squaredNorm() + l.bias.squaredNorm();
  }
  return s;
}

// out = base - t * grad, layer by layer.
void Step(const AutoencoderParams& base, const AutoencoderParams& grad,
          double t, AutoencoderParams& out) {
  for (size_t k = 0; k < base.encoder.size(); ++k) {
    out.encoder[k].weight = base.encoder[k].weight - t * grad.encoder[k].weight;
    out.encoder[k].bias = base.encoder[k].bias - t * grad.encoder[k].bias;
  }
  for (size_t k = 0; k < base.decoder.size(); ++k) {
    out.decoder[k].weight = base.decoder[k].weight - t * grad.decoder[k].weight;
    out.decoder[k].bias = base.decoder[k].bias - t * grad.decoder[k].bias;
  }
}

}  // namespace

double AutoencoderParams::WeightNormSq() const {
  double s = 0.0;
  for (const DenseLayer& l : encoder) s += l.weight.squaredNorm();
  for (const DenseLayer& l : decoder) s += l.weight.squaredNorm();
  return s;
}

int AutoencoderParams::ParameterCount() const {
  Eigen::Index count = 0;
  for (const auto* stack : {&encoder, &decoder})
    for (const DenseLayer& l : *stack) count += l.weight.size() + l.bias.size();
  return static_cast<int>(count);
}

void AutoencoderParams::CheckShapes() const {
  if (encoder.empty() || encoder.size() != decoder.size())
    throw Error("shape_mismatch",
                "encoder and decoder need the same nonzero layer count");
  int width = encoder.front().in();
  for (const auto* stack : {&encoder, &decoder}) {
    for (const DenseLayer& l : *stack) {
      if (l.in() != width || l.bias.size() != l.out())
        throw Error("shape_mismatch", "autoencoder layers do not chain");
      width = l.out();
    }
  }
  if (width != input_dim())
    throw Error("shape_mismatch", "decoder output width differs from input");
}

AutoencoderParams AutoencoderParams::Init(
    int input_dim, const std::vector<int>& encoder_widths, Activation hidden,
    Activation output, std::uint64_t seed) {
  if (input_dim < 1 || encoder_widths.empty())
    throw Error("invalid_config", "autoencoder needs input width and layers");
  for (int w : encoder_widths) {
    if (w < 1) throw Error("invalid_config", "layer widths must be positive");
  }
  std::mt19937_64 rng(seed);
  auto make = [&rng](int in, int out, Activation act) {
    const double bound = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer l;
    l.weight.resize(in, out);
    for (int c = 0; c < out; ++c)
      for (int r = 0; r < in; ++r) l.weight(r, c) = dist(rng);
    l.bias = RowVector::Zero(out);
    l.activation = act;
    return l;
  };
  std::vector<int> widths;
  widths.push_back(input_dim);
  widths.insert(widths.end(), encoder_widths.begin(), encoder_widths.end());
  const int k = static_cast<int>(encoder_widths.size());

  AutoencoderParams p;
  for (int i = 0; i < k; ++i) p.encoder.push_back(make(widths[i], widths[i + 1], hidden));
  for (int i = k; i > 0; --i) {
    p.decoder.push_back(
        make(widths[i], widths[i - 1], i == 1 ? output : hidden));
  }
  return p;
}

Matrix Encode(const AutoencoderParams& params, const Matrix& x,
              const Mask& mask) {
  params.CheckShapes();
  if (x.cols() != params.input_dim())
    throw Error("shape_mismatch", "feature width differs from encoder input");
  if (static_cast<Eigen::Index>(mask.size()) != x.rows())
    throw Error("shape_mismatch", "mask length differs from feature rows");
  const std::vector<int> rows = PresentRows(mask);
  Matrix a = Gather(x, rows);
  for (const DenseLayer& l : params.encoder) a = Forward(l, a);
  Matrix h = Matrix::Zero(x.rows(), params.code_dim());
  for (size_t k = 0; k < rows.size(); ++k) h.row(rows[k]) = a.row(k);
  return h;
}

Matrix Decode(const AutoencoderParams& params, const Matrix& h) {
  params.CheckShapes();
  if (h.cols() != params.code_dim())
    throw Error("shape_mismatch", "code width differs from decoder input");
  Matrix a = h;
  for (const DenseLayer& l : params.decoder) a = Forward(l, a);
  return a;
}

double ReconstructionLoss(const Matrix& x, const Matrix& x_tilde,
                          const Mask& mask) {
  if (x.rows() != x_tilde.rows() || x.cols() != x_tilde.cols() ||
      static_cast<Eigen::Index>(mask.size()) != x.rows())
    throw Error("shape_mismatch", "reconstruction inputs differ in shape");
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (mask[i]) loss += (x.row(i) - x_tilde.row(i)).squaredNorm();
  return loss;
}

ViewLoss EvaluateViewLoss(const AutoencoderParams& params,
                          const ViewProblem& problem) {
  CheckProblem(params, problem);
  const std::vector<int> rows = PresentRows(problem.mask);
  const std::vector<Matrix> acts =
      ForwardAll(params, Gather(problem.x, rows));
  const size_t k = params.encoder.size();
  const Matrix target = Gather(problem.y, rows) * problem.basis;

  ViewLoss loss;
  loss.reconstruction = (acts.back() - acts.front()).squaredNorm();
  loss.subspace = (acts[k] - target).squaredNorm();
  loss.weight_norm = params.WeightNormSq();
  return loss;
}

AutoencoderParams ViewLossGradient(const AutoencoderParams& params,
                                   const ViewProblem& problem,
                                   ViewLoss* loss) {
  CheckProblem(params, problem);
  const std::vector<int> rows = PresentRows(problem.mask);
  const std::vector<Matrix> acts =
      ForwardAll(params, Gather(problem.x, rows));
  const size_t k = params.encoder.size();
  const Matrix code_residual =
      acts[k] - Gather(problem.y, rows) * problem.basis;
  const Matrix recon_residual = acts.back() - acts.front();
  if (loss != nullptr) {
    loss->reconstruction = recon_residual.squaredNorm();
    loss->subspace = code_residual.squaredNorm();
    loss->weight_norm = params.WeightNormSq();
  }

  AutoencoderParams grad = ZerosLike(params);
  // d(total)/d(activation) flowing backwards, starting at the output.
  Matrix upstream = 2.0 * recon_residual;
  auto backprop = [&](const DenseLayer& layer, DenseLayer& g,
                      const Matrix& input, const Matrix& output) {
    ScaleByDerivative(layer.activation, output, upstream);
    g.weight = input.transpose() * upstream + 2.0 * problem.lambda * layer.weight;
    g.bias = upstream.colwise().sum();
    upstream = upstream * layer.weight.transpose();
  };
  for (size_t l = params.decoder.size(); l-- > 0;) {
    backprop(params.decoder[l], grad.decoder[l], acts[k + l], acts[k + l + 1]);
  }
  upstream += 2.0 * problem.alpha * code_residual;
  for (size_t l = params.encoder.size(); l-- > 0;) {
    backprop(params.encoder[l], grad.encoder[l], acts[l], acts[l + 1]);
  }
  return grad;
}

TrainResult TrainViewAutoencoder(AutoencoderParams& params,
                                 const ViewProblem& problem,
                                 const OptimizerConfig& config) {
  TrainResult result;
  result.learning_rate = config.learning_rate;
  double loss = EvaluateViewLoss(params, problem).Total(problem.alpha,
                                                         problem.lambda);
  if (!std::isfinite(loss))
    throw Error("non_finite", "autoencoder loss is not finite at entry");
  result.loss_before = loss;
  AutoencoderParams candidate = params;
  for (int step = 0; step < config.steps; ++step) {
    ViewLoss current;
    const AutoencoderParams grad = ViewLossGradient(params, problem, &current);
    const double grad_sq = SquaredNorm(grad);
    auto eval = [&](double t) {
      Step(params, grad, t, candidate);
      return EvaluateViewLoss(candidate, problem).Total(problem.alpha,
                                                        problem.lambda);
    };
    LineSearchResult ls =
        Backtrack(loss, grad_sq, result.learning_rate, config.armijo,
                  config.max_halvings, eval, "autoencoder update");
    if (!ls.accepted) break;
    std::swap(params, candidate);
    loss = ls.loss;
    ++result.accepted_steps;
    // Let the next step try a longer stride than the one that worked.
    result.learning_rate = 2.0 * ls.step;
  }
  result.loss_after = loss;
  return result;
}

}  // namespace dpmne
