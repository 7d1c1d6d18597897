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

#include "dpmne/proximity.h"

#include <cmath>
#include <string>

namespace dpmne {

std::vector<double> ProximityConfig::DefaultWeights(int order) {
  std::vector<double> w(order > 0 ? order : 0);
  double value = 1.0;
  for (double& x : w) {
    x = value;
    value *= 0.5;
  }
  return w;
}

namespace {

constexpr double kDenseFill = 0.5;

double Fill(const SparseMatrix& m) {
  const double cells = static_cast<double>(m.rows()) * m.cols();
  return cells == 0.0 ? 0.0 : m.nonZeros() / cells;
}

SparseMatrix Symmetrized(const SparseMatrix& m) {
  SparseMatrix t = m.transpose();
  SparseMatrix sym = 0.5 * (m + t);
  sym.prune(0.0);
  sym.makeCompressed();
  return sym;
}

SparseMatrix NormalizedAdjacency(const SparseMatrix& adj) {
  Vector deg = Vector::Zero(adj.rows());
  for (int i = 0; i < adj.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it) deg(i) += it.value();
  Vector scale = deg.unaryExpr(
      [](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
  SparseMatrix out = scale.asDiagonal() * adj * scale.asDiagonal();
  out.makeCompressed();
  return out;
}

}  // namespace

SparseMatrix HighOrderProximity(const SparseMatrix& adjacency,
                                const ProximityConfig& config) {
  if (config.order() < 1)
    throw Error("invalid_config", "proximity order must be at least 1");
  for (double w : config.weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("invalid_config", "proximity weights must be nonnegative");
  }
  if (adjacency.rows() != adjacency.cols())
    throw Error("shape_mismatch", "adjacency must be square");

  const SparseMatrix base =
      config.normalize ? NormalizedAdjacency(adjacency) : adjacency;

  SparseMatrix power = base;
  SparseMatrix sum = config.weights[0] * base;
  int k = 1;
  for (; k < config.order() && Fill(power) <= kDenseFill; ++k) {
    power = (power * base).pruned(0.0);
    sum += config.weights[k] * power;
  }
  if (k < config.order()) {
    Matrix dense_power = Matrix(power);
    Matrix dense_sum = Matrix(sum);
    for (; k < config.order(); ++k) {
      dense_power = dense_power * base;
      dense_sum += config.weights[k] * dense_power;
    }
    sum = dense_sum.sparseView(0.0, 0.0);
  }
  sum.prune(0.0);
  sum.makeCompressed();
  return config.normalize ? Symmetrized(sum) : sum;
}

ProximityStack ProximityStack::Build(std::vector<SparseMatrix> per_view) {
  if (per_view.empty())
    throw Error("shape_mismatch", "at least one proximity matrix is required");
  const auto n = per_view.front().rows();
  for (size_t s = 0; s < per_view.size(); ++s) {
    if (per_view[s].rows() != n || per_view[s].cols() != n) {
      throw Error("shape_mismatch",
                  "proximity matrix for view " + std::to_string(s) +
                      " is not " + std::to_string(n) + " x " +
                      std::to_string(n));
    }
  }
  ProximityStack stack;
  stack.aggregate_ = SparseMatrix(n, n);
  for (const SparseMatrix& p : per_view) stack.aggregate_ += p;
  stack.aggregate_ = Symmetrized(stack.aggregate_);
  stack.per_view_ = std::move(per_view);

  stack.degree_ = Vector::Zero(n);
  for (int i = 0; i < stack.aggregate_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(stack.aggregate_, i); it; ++it)
      stack.degree_(i) += it.value();
  }
  SparseMatrix diag(n, n);
  diag.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) diag.insert(i, i) = stack.degree_(i);
  stack.laplacian_ = diag - stack.aggregate_;
  stack.laplacian_.makeCompressed();
  if (Fill(stack.laplacian_) > kDenseFill)
    stack.dense_laplacian_ = Matrix(stack.laplacian_);
  return stack;
}

Matrix ProximityStack::Apply(const Matrix& y) const {
  if (y.rows() != n())
    throw Error("shape_mismatch", "embedding rows differ from node count");
  if (dense_laplacian_) return (*dense_laplacian_) * y;
  // Row-major operands keep each neighbour's row in one cache line run.
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor yr = y;
  RowMajor out = laplacian_ * yr;
  return out;
}

double ProximityStack::Quadratic(const Matrix& y) const {
  return y.cwiseProduct(Apply(y)).sum();
}

}  // namespace dpmne
