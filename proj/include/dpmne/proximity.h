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

#ifndef DPMNE_PROXIMITY_H_
#define DPMNE_PROXIMITY_H_

#include <optional>
#include <vector>

#include "dpmne/common.h"

namespace dpmne {

// P = sum_i weights[i] * A^(i+1) over a view's adjacency A.
struct ProximityConfig {
  std::vector<double> weights = DefaultWeights(5);
  // Replace A by D^-1/2 A D^-1/2 before taking powers. Keeps entries of
  // high powers bounded on dense graphs; off by default.
  bool normalize = false;

  int order() const { return static_cast<int>(weights.size()); }

  // w_1 = 1, w_i = 0.5 * w_{i-1}.
  static std::vector<double> DefaultWeights(int order);
};

// Returns the weighted sum of exact adjacency powers. Closed walks on the
// diagonal are kept. Products switch to dense storage once fill-in passes
// half the matrix. Throws Error("invalid_config") for an empty weight list
// or negative weights, Error("shape_mismatch") for non-square input.
SparseMatrix HighOrderProximity(const SparseMatrix& adjacency,
                                const ProximityConfig& config);

class ProximityStack {
 public:
  ProximityStack() = default;

  // P = sum_s P^s, D_ii = sum_j P_ij, L = D - P.
  static ProximityStack Build(std::vector<SparseMatrix> per_view);

  int n() const { return static_cast<int>(aggregate_.rows()); }
  const std::vector<SparseMatrix>& per_view() const { return per_view_; }
  const SparseMatrix& aggregate() const { return aggregate_; }
  const Vector& degree() const { return degree_; }
  const SparseMatrix& laplacian() const { return laplacian_; }
  bool dense() const { return dense_laplacian_.has_value(); }

  // L * Y.
  Matrix Apply(const Matrix& y) const;
  // tr(Y^T L Y).
  double Quadratic(const Matrix& y) const;

 private:
  std::vector<SparseMatrix> per_view_;
  SparseMatrix aggregate_;
  Vector degree_;
  SparseMatrix laplacian_;
  std::optional<Matrix> dense_laplacian_;
};

}  // namespace dpmne

#endif  // DPMNE_PROXIMITY_H_
