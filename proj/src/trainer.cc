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

#include "dpmne/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dpmne/line_search.h"

namespace dpmne {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

// Zeroes the rows of `m` whose mask bit is false.
void MaskRows(const Mask& mask, Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (!mask[i]) m.row(i).setZero();
}

Matrix MaskedResidual(const Matrix& y, const Matrix& basis,
                      const Matrix& hidden, const Mask& mask) {
  Matrix r = y * basis - hidden;
  MaskRows(mask, r);
  return r;
}

void CheckState(const EmbeddingState& state, const MultiplexNetwork& network) {
  const int t = network.t();
  if (state.y.rows() != network.n)
    throw Error("shape_mismatch", "embedding rows differ from node count");
  if (static_cast<int>(state.basis.size()) != t ||
      static_cast<int>(state.hidden.size()) != t ||
      static_cast<int>(state.autoencoders.size()) != t)
    throw Error("shape_mismatch", "state holds the wrong number of views");
  for (int s = 0; s < t; ++s) {
    if (state.basis[s].rows() != state.y.cols() ||
        state.basis[s].cols() != state.autoencoders[s].code_dim() ||
        state.hidden[s].rows() != network.n ||
        state.hidden[s].cols() != state.autoencoders[s].code_dim())
      throw Error("shape_mismatch",
                  "view " + std::to_string(s) + " state shapes disagree");
  }
}

// splitmix64 of (seed, view) so each view's weights get their own stream.
std::uint64_t ViewSeed(std::uint64_t seed, int view) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (view + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Matrix InitialEmbedding(const MultiplexNetwork& network, int dim,
                        std::uint64_t seed) {
  const int n = network.n;
  int total = 0;
  for (const ViewData& v : network.views) total += v.dim();
  Matrix concat(n, total);
  int col = 0;
  for (const ViewData& v : network.views) {
    concat.middleCols(col, v.dim()) = v.features;
    for (int i = 0; i < n; ++i)
      if (!v.mask[i]) concat.row(i).segment(col, v.dim()).setZero();
    col += v.dim();
  }
  Matrix y(n, dim);
  int filled = 0;
  if (total > 0) {
    Eigen::BDCSVD<Matrix> svd(concat, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    for (; filled < dim && filled < sv.size() && sv(filled) > cutoff;
         ++filled) {
      y.col(filled) = svd.matrixU().col(filled);
      y.col(filled).normalize();
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = filled; c < dim; ++c) {
    for (int i = 0; i < n; ++i) y(i, c) = gauss(rng) / std::sqrt(dim);
    const double norm = y.col(c).norm();
    if (norm > 0.0) y.col(c) /= norm;
  }
  return y;
}

// Y sub-problem value given ly = L Y.
double SubproblemY(const EmbeddingState& state,
                   const MultiplexNetwork& network, const Matrix& ly,
                   const Hyperparams& h) {
  double subspace = 0.0;
  for (int s = 0; s < network.t(); ++s) {
    subspace += MaskedResidual(state.y, state.basis[s], state.hidden[s],
                               network.views[s].mask)
                    .squaredNorm();
  }
  return h.alpha * subspace + h.beta * state.y.cwiseProduct(ly).sum() +
         h.lambda * OrthogonalityPenalty(state.y);
}

// Y gradient given ly = L Y.
Matrix GradYGiven(const EmbeddingState& state, const MultiplexNetwork& network,
                  const Matrix& ly, const Hyperparams& hyper) {
  const int d = static_cast<int>(state.y.cols());
  Matrix grad = Matrix::Zero(state.y.rows(), d);
  if (hyper.alpha != 0.0) {
    for (int s = 0; s < network.t(); ++s) {
      grad += (2.0 * hyper.alpha) *
              MaskedResidual(state.y, state.basis[s], state.hidden[s],
                             network.views[s].mask) *
              state.basis[s].transpose();
    }
  }
  if (hyper.beta != 0.0) grad += (2.0 * hyper.beta) * ly;
  if (hyper.lambda != 0.0) {
    Matrix gram = state.y.transpose() * state.y;
    gram.diagonal().array() -= 1.0;
    grad += (4.0 * hyper.lambda) * state.y * gram;
  }
  return grad;
}

// L X, skipped when the Laplacian term is off.
Matrix LaplacianTimes(const ProximityStack& proximity, const Matrix& x,
                      const Hyperparams& hyper) {
  if (hyper.beta == 0.0) return Matrix::Zero(x.rows(), x.cols());
  return proximity.Apply(x);
}

}  // namespace

void Hyperparams::Check() const {
  auto fail = [](const std::string& what) {
    throw Error("invalid_config", what);
  };
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(lambda >= 0.0))
    fail("alpha, beta and lambda must be nonnegative");
  if (dim < 1) fail("embedding dimension must be at least 1");
  if (max_iters < 0) fail("max_iters must be nonnegative");
  if (y_steps < 0 || h_steps < 0) fail("inner step counts must be nonnegative");
  if (!(y_learning_rate > 0.0) || !(h_learning_rate > 0.0))
    fail("learning rates must be positive");
  if (encoder_widths.empty()) fail("at least one encoder layer is required");
  for (int w : encoder_widths)
    if (w < 1) fail("layer widths must be positive");
  if (proximity.order() < 1) fail("proximity order must be at least 1");
  if (!(early_stop_tol >= 0.0) || early_stop_patience < 1)
    fail("early stopping needs tol >= 0 and patience >= 1");
}

ProximityStack BuildProximity(const MultiplexNetwork& network,
                              const ProximityConfig& config) {
  std::vector<SparseMatrix> per_view(network.t());
  ParallelFor(network.t(), [&](int s) {
    per_view[s] = HighOrderProximity(network.views[s].adjacency, config);
  });
  return ProximityStack::Build(std::move(per_view));
}

double OrthogonalityPenalty(const Matrix& y) {
  Matrix gram = y.transpose() * y;
  gram.diagonal().array() -= 1.0;
  return gram.squaredNorm();
}

ObjectiveTerms ComputeObjective(const EmbeddingState& state,
                                const MultiplexNetwork& network,
                                const ProximityStack& proximity) {
  CheckState(state, network);
  ObjectiveTerms terms;
  for (int s = 0; s < network.t(); ++s) {
    const ViewData& v = network.views[s];
    const AutoencoderParams& ae = state.autoencoders[s];
    const Matrix h = Encode(ae, v.features, v.mask);
    terms.reconstruction += ReconstructionLoss(v.features, Decode(ae, h), v.mask);
    terms.subspace +=
        MaskedResidual(state.y, state.basis[s], h, v.mask).squaredNorm();
    terms.reg_b += state.basis[s].squaredNorm();
    terms.reg_w += ae.WeightNormSq();
  }
  terms.laplacian = proximity.Quadratic(state.y);
  terms.reg_y = OrthogonalityPenalty(state.y);
  return terms;
}

double Objective(const EmbeddingState& state, const MultiplexNetwork& network,
                 const ProximityStack& proximity, const Hyperparams& hyper) {
  const double total =
      ComputeObjective(state, network, proximity).Total(hyper);
  if (!std::isfinite(total))
    throw Error("non_finite", "objective is not finite");
  return total;
}

Matrix GradY(const EmbeddingState& state, const MultiplexNetwork& network,
             const ProximityStack& proximity, const Hyperparams& hyper) {
  CheckState(state, network);
  return GradYGiven(state, network, LaplacianTimes(proximity, state.y, hyper),
                    hyper);
}

Matrix GradB(const EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper, int view) {
  CheckState(state, network);
  if (view < 0 || view >= network.t())
    throw Error("out_of_range", "view index out of range");
  const Matrix r = MaskedResidual(state.y, state.basis[view],
                                  state.hidden[view], network.views[view].mask);
  return (2.0 * hyper.alpha) * state.y.transpose() * r +
         (2.0 * hyper.lambda) * state.basis[view];
}

Matrix SolveBasis(const Matrix& y, const Matrix& hidden, const Mask& mask,
                  double alpha, double lambda) {
  if (hidden.rows() != y.rows() ||
      static_cast<Eigen::Index>(mask.size()) != y.rows())
    throw Error("shape_mismatch", "basis solve inputs differ in rows");
  Matrix masked_y = y;
  MaskRows(mask, masked_y);
  const auto d = y.cols();
  Matrix system = alpha * (masked_y.transpose() * masked_y);
  system.diagonal().array() += lambda;
  Matrix rhs = alpha * (masked_y.transpose() * hidden);
  if (lambda > 0.0) {
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
  }
  Eigen::FullPivLU<Matrix> lu(system);
  if (lu.rank() < d) {
    throw Error("singular_system",
                "basis system is singular; use lambda > 0 (rank " +
                    std::to_string(lu.rank()) + " of " + std::to_string(d) +
                    ")");
  }
  return lu.solve(rhs);
}

void UpdateY(EmbeddingState& state, const MultiplexNetwork& network,
             const ProximityStack& proximity, const Hyperparams& hyper) {
  CheckState(state, network);
  const int t = network.t();
  if (state.y_learning_rate <= 0.0) state.y_learning_rate = hyper.y_learning_rate;
  Matrix ly = LaplacianTimes(proximity, state.y, hyper);
  double loss = SubproblemY(state, network, ly, hyper);
  if (!std::isfinite(loss))
    throw Error("non_finite", "Y sub-problem is not finite");

  for (int step = 0; step < hyper.y_steps; ++step) {
    const Matrix grad = GradYGiven(state, network, ly, hyper);
    const double grad_sq = grad.squaredNorm();
    // Candidate pieces are affine in the step: residual_s(t) = R_s - t G B^s
    // and L Y(t) = L Y - t L G.
    std::vector<Matrix> residual(t), shift(t);
    for (int s = 0; s < t; ++s) {
      residual[s] = MaskedResidual(state.y, state.basis[s], state.hidden[s],
                                   network.views[s].mask);
      shift[s] = grad * state.basis[s];
      MaskRows(network.views[s].mask, shift[s]);
    }
    const Matrix lg = LaplacianTimes(proximity, grad, hyper);
    Matrix candidate;
    auto eval = [&](double step_len) {
      candidate = state.y - step_len * grad;
      double subspace = 0.0;
      for (int s = 0; s < t; ++s)
        subspace += (residual[s] - step_len * shift[s]).squaredNorm();
      const double quad =
          candidate.cwiseProduct(ly - step_len * lg).sum();
      return hyper.alpha * subspace + hyper.beta * quad +
             hyper.lambda * OrthogonalityPenalty(candidate);
    };
    LineSearchResult ls = Backtrack(loss, grad_sq, state.y_learning_rate,
                                    kArmijo, kMaxHalvings, eval, "Y update");
    if (!ls.accepted) break;
    state.y = std::move(candidate);
    ly -= ls.step * lg;
    loss = ls.loss;
    state.y_learning_rate = 2.0 * ls.step;
  }
}

void UpdateB(EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper) {
  CheckState(state, network);
  ParallelFor(network.t(), [&](int s) {
    state.basis[s] = SolveBasis(state.y, state.hidden[s],
                                network.views[s].mask, hyper.alpha,
                                hyper.lambda);
  });
}

void UpdateH(EmbeddingState& state, const MultiplexNetwork& network,
             const Hyperparams& hyper) {
  CheckState(state, network);
  if (state.h_learning_rates.size() != state.autoencoders.size())
    state.h_learning_rates.assign(state.autoencoders.size(),
                                  hyper.h_learning_rate);
  ParallelFor(network.t(), [&](int s) {
    const ViewData& v = network.views[s];
    ViewProblem problem{v.features, v.mask,      state.y,
                        state.basis[s], hyper.alpha, hyper.lambda};
    OptimizerConfig config;
    config.steps = hyper.h_steps;
    config.learning_rate = state.h_learning_rates[s];
    config.armijo = kArmijo;
    config.max_halvings = kMaxHalvings;
    TrainResult r = TrainViewAutoencoder(state.autoencoders[s], problem, config);
    state.h_learning_rates[s] = r.learning_rate;
    state.hidden[s] = Encode(state.autoencoders[s], v.features, v.mask);
  });
}

EmbeddingState Initialize(const MultiplexNetwork& network,
                          const Hyperparams& hyper) {
  hyper.Check();
  if (network.t() < 1 || network.n < 1)
    throw Error("invalid_network", "network has no nodes or no views");
  EmbeddingState state;
  state.y = InitialEmbedding(network, hyper.dim, hyper.seed);
  for (int s = 0; s < network.t(); ++s) {
    const ViewData& v = network.views[s];
    state.autoencoders.push_back(AutoencoderParams::Init(
        v.dim(), hyper.encoder_widths, hyper.hidden_activation,
        hyper.output_activation, ViewSeed(hyper.seed, s)));
    state.hidden.push_back(Encode(state.autoencoders.back(), v.features, v.mask));
    state.basis.push_back(Matrix::Zero(hyper.dim, state.autoencoders.back().code_dim()));
  }
  UpdateB(state, network, hyper);
  state.y_learning_rate = hyper.y_learning_rate;
  state.h_learning_rates.assign(network.t(), hyper.h_learning_rate);
  return state;
}

bool Resume(EmbeddingState& state, const MultiplexNetwork& network,
            const ProximityStack& proximity, const Hyperparams& hyper,
            int iterations) {
  if (state.objective_trace.empty())
    state.objective_trace.push_back(
        Objective(state, network, proximity, hyper));
  for (int it = 0; it < iterations; ++it) {
    if (state.stall_count >= hyper.early_stop_patience) return false;
    UpdateY(state, network, proximity, hyper);
    UpdateB(state, network, hyper);
    UpdateH(state, network, hyper);
    const double previous = state.objective_trace.back();
    const double current = Objective(state, network, proximity, hyper);
    state.objective_trace.push_back(current);
    ++state.iterations;
    const double scale = std::max(std::abs(previous), 1e-300);
    if ((previous - current) / scale < hyper.early_stop_tol) {
      ++state.stall_count;
    } else {
      state.stall_count = 0;
    }
  }
  return state.stall_count < hyper.early_stop_patience;
}

EmbeddingState Train(const MultiplexNetwork& network,
                     const Hyperparams& hyper) {
  ValidateOrThrow(network);
  EmbeddingState state = Initialize(network, hyper);
  const ProximityStack proximity = BuildProximity(network, hyper.proximity);
  Resume(state, network, proximity, hyper, hyper.max_iters);
  return state;
}

Vector ReconstructMissing(const EmbeddingState& state, int node, int view) {
  if (node < 0 || node >= state.y.rows())
    throw Error("out_of_range", "node index " + std::to_string(node) +
                                    " out of range");
  if (view < 0 || view >= static_cast<int>(state.basis.size()))
    throw Error("out_of_range", "view index " + std::to_string(view) +
                                    " out of range");
  return (state.y.row(node) * state.basis[view]).transpose();
}

}  // namespace dpmne
