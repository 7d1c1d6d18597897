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

#include <random>

#include "doctest.h"
#include "dpmne/graph_model.h"
#include "oracles.h"

namespace dpmne {
namespace {

SparseMatrix RandomGraph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return AdjacencyFromEdges(n, edges);
}

double MaxAbsDiff(const Matrix& a, const oracle::Grid& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

TEST_CASE("default weights halve from one") {
  ProximityConfig cfg;
  CHECK(cfg.order() == 5);
  CHECK(cfg.weights == std::vector<double>{1.0, 0.5, 0.25, 0.125, 0.0625});
}

TEST_CASE("no edges gives zero proximity") {
  SparseMatrix empty(4, 4);
  CHECK(HighOrderProximity(empty, ProximityConfig{}).nonZeros() == 0);
}

TEST_CASE("path graph second order matches the hand result") {
  SparseMatrix adj = AdjacencyFromEdges(3, {{0, 1}, {1, 2}});
  ProximityConfig cfg;
  cfg.weights = {1.0, 0.5};
  Matrix p = Matrix(HighOrderProximity(adj, cfg));
  Matrix expected(3, 3);
  expected << 0.5, 1, 0.5, 1, 1, 1, 0.5, 1, 0.5;
  CHECK(p == expected);
  // Same thing by the dense oracle.
  CHECK(MaxAbsDiff(p, oracle::DensePowerSum(oracle::ToGrid(Matrix(adj)),
                                            cfg.weights)) == 0.0);
}

TEST_CASE("order one with unit weight returns the adjacency") {
  std::mt19937_64 rng(3);
  SparseMatrix adj = RandomGraph(30, 0.1, rng);
  ProximityConfig cfg;
  cfg.weights = {1.0};
  CHECK(Matrix(HighOrderProximity(adj, cfg)) == Matrix(adj));
}

TEST_CASE("default config matches the dense power oracle") {
  std::mt19937_64 rng(5);
  for (double p : {0.02, 0.08, 0.3}) {
    SparseMatrix adj = RandomGraph(40, p, rng);
    ProximityConfig cfg;
    Matrix got = Matrix(HighOrderProximity(adj, cfg));
    CHECK(MaxAbsDiff(got, oracle::DensePowerSum(oracle::ToGrid(Matrix(adj)),
                                                cfg.weights)) < 1e-9);
    CHECK(got == got.transpose());
  }
}

TEST_CASE("adding an edge never lowers proximity") {
  std::mt19937_64 rng(9);
  SparseMatrix adj = RandomGraph(25, 0.1, rng);
  Matrix before = Matrix(HighOrderProximity(adj, ProximityConfig{}));
  std::vector<std::pair<int, int>> edges = EdgesFromAdjacency(adj);
  for (int i = 0; i < 25; ++i) {
    if (adj.coeff(0, i) == 0.0 && i != 0) {
      edges.emplace_back(0, i);
      break;
    }
  }
  Matrix after =
      Matrix(HighOrderProximity(AdjacencyFromEdges(25, edges), ProximityConfig{}));
  CHECK((after - before).minCoeff() >= 0.0);
  CHECK((after - before).maxCoeff() > 0.0);
}

TEST_CASE("normalized proximity is symmetric and bounded") {
  std::mt19937_64 rng(2);
  SparseMatrix adj = RandomGraph(40, 0.4, rng);
  ProximityConfig cfg;
  cfg.normalize = true;
  Matrix p = Matrix(HighOrderProximity(adj, cfg));
  CHECK((p - p.transpose()).norm() < 1e-12);
  // Spectral radius of the normalized adjacency is 1, so each power's
  // entries stay within [0, 1] and the sum below the weight total.
  CHECK(p.maxCoeff() <= 1.0 + 0.5 + 0.25 + 0.125 + 0.0625);
}

TEST_CASE("proximity rejects bad configs") {
  SparseMatrix adj(3, 3);
  ProximityConfig cfg;
  cfg.weights = {};
  CHECK_THROWS_AS(HighOrderProximity(adj, cfg), Error);
  cfg.weights = {1.0, -0.5};
  CHECK_THROWS_AS(HighOrderProximity(adj, cfg), Error);
  CHECK_THROWS_AS(HighOrderProximity(SparseMatrix(2, 3), ProximityConfig{}), Error);
}

TEST_CASE("single view aggregate equals the view") {
  SparseMatrix adj = AdjacencyFromEdges(3, {{0, 1}, {1, 2}});
  SparseMatrix p = HighOrderProximity(adj, ProximityConfig{});
  ProximityStack stack = ProximityStack::Build({p});
  CHECK(Matrix(stack.aggregate()) == Matrix(p));
}

TEST_CASE("path graph degree and laplacian") {
  SparseMatrix adj = AdjacencyFromEdges(3, {{0, 1}, {1, 2}});
  ProximityConfig cfg;
  cfg.weights = {1.0, 0.5};
  ProximityStack stack = ProximityStack::Build({HighOrderProximity(adj, cfg)});
  Vector expected_degree(3);
  expected_degree << 2, 3, 2;
  CHECK(stack.degree() == expected_degree);
  Matrix l(3, 3);
  l << 1.5, -1, -0.5, -1, 2, -1, -0.5, -1, 1.5;
  CHECK(Matrix(stack.laplacian()) == l);
  Matrix ones = Matrix::Ones(3, 1);
  CHECK(stack.Quadratic(ones) == 0.0);
}

TEST_CASE("aggregate rejects shape mismatch") {
  CHECK_THROWS_AS(ProximityStack::Build({SparseMatrix(3, 3), SparseMatrix(4, 4)}),
                  Error);
  CHECK_THROWS_AS(ProximityStack::Build({}), Error);
}

TEST_CASE("laplacian quadratic form equals half the weighted pair distance") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 30;
    std::vector<SparseMatrix> views;
    for (int s = 0; s < 2; ++s)
      views.push_back(HighOrderProximity(RandomGraph(n, 0.08, rng), ProximityConfig{}));
    ProximityStack stack = ProximityStack::Build(views);
    Matrix y = oracle::RandomMatrix(n, 4, rng);
    const double lhs = stack.Quadratic(y);
    const double rhs =
        oracle::PairwiseSmoothness(oracle::ToGrid(Matrix(stack.aggregate())), y);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
    Vector row_sums = Matrix(stack.laplacian()).rowwise().sum();
    CHECK(row_sums.cwiseAbs().maxCoeff() <= 1e-10 * stack.degree().maxCoeff());
    Matrix l = Matrix(stack.laplacian());
    CHECK((l - l.transpose()).norm() == 0.0);
  }
}

TEST_CASE("dense and sparse laplacian paths agree") {
  std::mt19937_64 rng(4);
  SparseMatrix adj = RandomGraph(30, 0.5, rng);
  ProximityStack stack = ProximityStack::Build({HighOrderProximity(adj, ProximityConfig{})});
  CHECK(stack.dense());
  Matrix y = oracle::RandomMatrix(30, 3, rng);
  Matrix direct = Matrix(stack.laplacian()) * y;
  CHECK((stack.Apply(y) - direct).norm() <= 1e-12 * direct.norm());
}

}  // namespace
}  // namespace dpmne
