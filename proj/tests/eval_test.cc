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

#include "dpmne/eval.h"

#include <random>

#include "doctest.h"
#include "oracles.h"

namespace dpmne {
namespace {

TEST_CASE("F1 from confusion matches the definitions") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 4;
    std::uniform_int_distribution<int> cls(0, k - 1);
    std::vector<int> truth(40), pred(40);
    for (int i = 0; i < 40; ++i) {
      truth[i] = cls(rng);
      pred[i] = rng() % 3 == 0 ? cls(rng) : truth[i];
    }
    F1Scores got = F1FromConfusion(Confusion(truth, pred, k));
    oracle::F1Pair want = oracle::F1ByDefinition(truth, pred, k);
    CHECK(std::abs(got.micro - want.micro) < 1e-12);
    CHECK(std::abs(got.macro - want.macro) < 1e-12);
  }
}

TEST_CASE("hand confusion matrix with three classes") {
  // truth\pred  0  1  2
  //   0         5  1  0
  //   1         2  3  1
  //   2         0  0  4
  std::vector<int> truth, pred;
  const int table[3][3] = {{5, 1, 0}, {2, 3, 1}, {0, 0, 4}};
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p)
      for (int c = 0; c < table[t][p]; ++c) {
        truth.push_back(t);
        pred.push_back(p);
      }
  F1Scores got = F1FromConfusion(Confusion(truth, pred, 3));
  oracle::F1Pair want = oracle::F1ByDefinition(truth, pred, 3);
  CHECK(got.micro == doctest::Approx(want.micro).epsilon(1e-14));
  CHECK(got.macro == doctest::Approx(want.macro).epsilon(1e-14));
  CHECK(got.micro == doctest::Approx(12.0 / 16.0));
}

TEST_CASE("constant prediction on balanced binary data") {
  std::vector<int> truth = {0, 0, 0, 1, 1, 1};
  std::vector<int> pred(6, 0);
  F1Scores got = F1FromConfusion(Confusion(truth, pred, 2));
  CHECK(got.micro == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(got.macro == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  oracle::F1Pair want = oracle::F1ByDefinition(truth, pred, 2);
  CHECK(got.macro == doctest::Approx(want.macro).epsilon(1e-15));
}

TEST_CASE("summaries use the sample standard deviation") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 2, 5, 10}) {
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    MeanStd s = Summarize(v);
    CHECK(std::abs(s.std - oracle::SampleStd(v)) < 1e-15);
  }
  CHECK(Summarize({0.25}).std == 0.0);
}

TEST_CASE("logistic regression converges on separable data") {
  Matrix x(6, 2);
  x << 0, 0, 0.1, 0.2, 0.2, 0.1, 3, 3, 3.1, 2.9, 2.8, 3.2;
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  LogisticRegression lr;
  lr.Fit(x, y, 2);
  CHECK(lr.Predict(x) == y);
  CHECK(lr.gradient_norm() <= 1e-6);
  Matrix p = lr.PredictProba(x);
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("one-hot embeddings classify perfectly") {
  const int n = 60, k = 3;
  Matrix emb = Matrix::Zero(n, k);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % k;
    emb(i, i % k) = 1.0;
  }
  EvalProtocol protocol;
  protocol.repeats = 3;
  MetricsReport r = ClassifyF1(emb, labels, protocol);
  CHECK(r.micro_f1.mean == 1.0);
  CHECK(r.macro_f1.mean == 1.0);
  CHECK(r.micro_f1.std == 0.0);
}

TEST_CASE("classification is deterministic and bounded") {
  std::mt19937_64 rng(3);
  Matrix emb = oracle::RandomMatrix(50, 4, rng);
  std::vector<int> labels(50);
  for (int i = 0; i < 50; ++i) labels[i] = emb(i, 0) > 0 ? 1 : 0;
  EvalProtocol protocol;
  protocol.repeats = 4;
  MetricsReport a = ClassifyF1(emb, labels, protocol);
  MetricsReport b = ClassifyF1(emb, labels, protocol);
  CHECK(a.micro_f1.mean == b.micro_f1.mean);
  CHECK(a.micro_f1.mean > 0.8);
  CHECK(a.macro_f1.mean <= 1.0);
  CHECK(a.micro_f1.std >= 0.0);
  protocol.train_fraction = 1.0;
  CHECK_THROWS_AS(ClassifyF1(emb, labels, protocol), Error);
}

TEST_CASE("matching accuracy edge cases") {
  std::vector<int> labels = {0, 0, 1, 1, 2, 2};
  CHECK(MatchedAccuracy(labels, labels) == 1.0);
  std::vector<int> permuted = {2, 2, 0, 0, 1, 1};
  CHECK(MatchedAccuracy(permuted, labels) == 1.0);
  // Five points, two clusters, one point on the wrong side.
  std::vector<int> truth = {0, 0, 0, 1, 1};
  std::vector<int> clusters = {1, 1, 0, 0, 0};
  CHECK(MatchedAccuracy(clusters, truth) == doctest::Approx(0.8));
  CHECK(oracle::BruteForceMatching(clusters, truth, 2) == doctest::Approx(0.8));
}

TEST_CASE("matching accuracy agrees with brute force and is permutation invariant") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + trial % 4;
    std::vector<int> clusters(25), labels(25);
    for (int i = 0; i < 25; ++i) {
      clusters[i] = static_cast<int>(rng() % k);
      labels[i] = static_cast<int>(rng() % k);
    }
    const double got = MatchedAccuracy(clusters, labels);
    CHECK(got == doctest::Approx(oracle::BruteForceMatching(clusters, labels, k)));
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> relabeled(25), reclustered(25);
    for (int i = 0; i < 25; ++i) {
      relabeled[i] = perm[labels[i]];
      reclustered[i] = perm[clusters[i]];
    }
    CHECK(MatchedAccuracy(clusters, relabeled) == doctest::Approx(got));
    CHECK(MatchedAccuracy(reclustered, labels) == doctest::Approx(got));
  }
}

TEST_CASE("hungarian matching is optimal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    Matrix w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = u(rng);
    std::vector<int> match = MaxWeightMatching(w);
    double got = 0;
    for (int i = 0; i < n; ++i) got += w(i, match[i]);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
      double s = 0;
      for (int i = 0; i < n; ++i) s += w(i, perm[i]);
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("k-means separates well-spaced blobs") {
  std::mt19937_64 rng(6);
  const int per = 30, k = 4;
  Matrix x(per * k, 3);
  std::vector<int> labels(per * k);
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < per; ++i) {
      x.row(c * per + i) = oracle::RandomMatrix(1, 3, rng, 0.2);
      x(c * per + i, c % 3) += 10.0 * (c + 1);
      labels[c * per + i] = c;
    }
  }
  CHECK(ClusterAccuracy(x, labels, k, 1) == 1.0);
  KMeansResult a = KMeans(x, k, 3);
  KMeansResult b = KMeans(x, k, 3);
  CHECK(a.assignment == b.assignment);
  CHECK_THROWS_AS(KMeans(x, 0, 1), Error);
}

TEST_CASE("k-means survives duplicate points") {
  Matrix x = Matrix::Zero(6, 2);
  x.row(5) << 1, 1;
  KMeansResult r = KMeans(x, 3, 2);
  CHECK(r.inertia == doctest::Approx(0.0));
}

MultiplexNetwork ImputeFixture() {
  // 6 nodes, 2 views; view 1 misses nodes 4 and 5, view 0 misses node 1.
  MultiplexNetwork net;
  net.n = 6;
  ViewData a;
  a.features.resize(6, 2);
  a.features << 1, 0, 0, 0, 0.9, 0.1, 0, 1, 1, 0.2, 0.1, 1;
  a.mask = {true, false, true, true, true, true};
  a.adjacency = AdjacencyFromEdges(6, {{0, 1}});
  ViewData b;
  b.features.resize(6, 3);
  b.features << 1, 0, 1, 0.5, 0.5, 0, 1, 0.1, 0.8, 0, 1, 0, 0, 0, 0, 0, 0, 0;
  b.mask = {true, true, true, true, false, false};
  b.adjacency = AdjacencyFromEdges(6, {{2, 3}});
  net.views = {a, b};
  return net;
}

// Scalar-loop restatement of the imputation rule.
Matrix OracleImpute(const MultiplexNetwork& net, int s, int k) {
  Matrix out = net.views[s].features;
  for (int i = 0; i < net.n; ++i) {
    if (net.views[s].mask[i]) continue;
    std::vector<std::pair<double, int>> sims;
    for (int j = 0; j < net.n; ++j) {
      if (j == i || !net.views[s].mask[j]) continue;
      double dot = 0, ni = 0, nj = 0;
      bool shared = false;
      for (int v = 0; v < net.t(); ++v) {
        if (!net.views[v].mask[i] || !net.views[v].mask[j]) continue;
        shared = true;
        for (int c = 0; c < net.views[v].dim(); ++c) {
          dot += net.views[v].features(i, c) * net.views[v].features(j, c);
          ni += net.views[v].features(i, c) * net.views[v].features(i, c);
          nj += net.views[v].features(j, c) * net.views[v].features(j, c);
        }
      }
      if (!shared || ni == 0 || nj == 0) continue;
      const double sim = dot / std::sqrt(ni * nj);
      if (sim > 0) sims.push_back({sim, j});
    }
    std::sort(sims.begin(), sims.end(), [](auto a, auto b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    double wsum = 0;
    RowVector acc = RowVector::Zero(out.cols());
    for (int c = 0; c < std::min<int>(k, sims.size()); ++c) {
      acc += sims[c].first * net.views[s].features.row(sims[c].second);
      wsum += sims[c].first;
    }
    out.row(i) = wsum > 0 ? RowVector(acc / wsum) : RowVector::Zero(out.cols());
  }
  return out;
}

TEST_CASE("knn imputation matches the scalar oracle") {
  MultiplexNetwork net = ImputeFixture();
  for (int k : {1, 2, 5}) {
    ImputeResult r = KnnImpute(net, k);
    for (int s = 0; s < 2; ++s) {
      Matrix want = OracleImpute(net, s, k);
      CHECK((r.network.views[s].features - want).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 0; i < net.n; ++i) {
        CHECK(r.network.views[s].mask[i]);
        if (net.views[s].mask[i]) {
          CHECK(r.network.views[s].features.row(i) == net.views[s].features.row(i));
          CHECK_FALSE(r.network.views[s].imputed[i]);
        } else {
          CHECK(r.network.views[s].imputed[i]);
        }
      }
    }
  }
}

TEST_CASE("knn imputation degenerate cases") {
  MultiplexNetwork full = ImputeFixture();
  for (ViewData& v : full.views) v.mask.assign(6, true);
  full.views[0].features.row(1) << 0.3, 0.3;
  full.views[1].features.row(4) << 1, 1, 1;
  full.views[1].features.row(5) << 0, 1, 1;
  ImputeResult same = KnnImpute(full, 5);
  CHECK(same.network.views[0].features == full.views[0].features);
  CHECK(same.unresolved.empty());

  // Node 2 duplicates node 0 in view 0; with k = 1 its view-1 row is copied.
  MultiplexNetwork dup = full;
  dup.views[0].features.row(2) = dup.views[0].features.row(0);
  dup.views[1].mask[2] = false;
  dup.views[1].features.row(2).setZero();
  dup.views[0].features.row(3) << 0, 1;  // orthogonal to node 0
  ImputeResult one = KnnImpute(dup, 1);
  // Cosine 1 ties with any other perfectly aligned neighbour; node 0 is the
  // only one here.
  CHECK(one.network.views[1].features.row(2) == dup.views[1].features.row(0));

  // A node whose only shared view is all-zero has no comparable neighbour.
  MultiplexNetwork lonely = ImputeFixture();
  lonely.views[0].features.row(4).setZero();
  ImputeResult r = KnnImpute(lonely, 3);
  REQUIRE(r.unresolved.size() == 1);
  CHECK(r.unresolved[0] == std::pair<int, int>{1, 4});
  CHECK(r.network.views[1].features.row(4).isZero(0.0));
  CHECK_THROWS_AS(KnnImpute(lonely, 0), Error);
}

TEST_CASE("fold assignment partitions every node once") {
  std::vector<int> fold = FoldAssignment(23, 5, 7);
  std::vector<int> sizes(5, 0);
  for (int f : fold) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++sizes[f];
  }
  CHECK(*std::max_element(sizes.begin(), sizes.end()) -
            *std::min_element(sizes.begin(), sizes.end()) <= 1);
  CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == 23);
  CHECK_THROWS_AS(FoldAssignment(3, 5, 1), Error);
}

MultiplexNetwork Planted(int n, std::uint64_t seed, double feature_flip = 0.0) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.communities = 3;
  cfg.views.assign(2, SynthViewConfig{});
  for (auto& v : cfg.views) {
    v.dim = 8;
    v.intra_prob = 0.2;
    v.inter_prob = 0.01;
  }
  cfg.feature_flip = feature_flip;
  cfg.seed = seed;
  return SynthGenerate(cfg);
}

Hyperparams Small() {
  Hyperparams h;
  h.dim = 6;
  h.encoder_widths = {10};
  h.max_iters = 5;
  return h;
}

TEST_CASE("sweep shape and the ratio-0 row") {
  MultiplexNetwork net = Planted(45, 1);
  EvalProtocol protocol;
  protocol.repeats = 2;
  std::vector<SweepRow> rows =
      PdrSweep(net, {0.0, 0.2}, {Method::kDpmne, Method::kZeroFill, Method::kKnnFill},
               Small(), protocol);
  CHECK(rows.size() == 6);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[3].ratio == 0.2);
  CHECK(rows[4].method == Method::kZeroFill);

  std::vector<SweepRow> plain = PdrSweep(net, {0.0}, {Method::kDpmne}, Small(), protocol);
  REQUIRE(plain.size() == 1);
  MetricsReport direct = ClassifyF1(Train(net, Small()).y, *net.labels, protocol);
  CHECK(plain[0].metrics.micro_f1.mean == direct.micro_f1.mean);
  CHECK(plain[0].metrics.macro_f1.std == direct.macro_f1.std);
  CHECK_THROWS_AS(PdrSweep(net, {0.2, 0.1}, {Method::kDpmne}, Small(), protocol), Error);
}

TEST_CASE("cross validation with one grid point returns it") {
  MultiplexNetwork net = Planted(40, 2);
  HyperGrid grid{{0.5}, {0.2}, {0.03}};
  CrossValidationResult r = CrossValidate(net, grid, Small(), 5, EvalProtocol{});
  CHECK(r.best.alpha == 0.5);
  CHECK(r.best.beta == 0.2);
  CHECK(r.best.lambda == 0.03);
  CHECK(r.scores.size() == 1);
}

TEST_CASE("cross validation picks the setting that uses the graph") {
  // Features carry no community signal; only the Laplacian term can
  // recover the planted partition, so beta > 0 must win over beta = 0.
  SynthConfig cfg;
  cfg.n = 60;
  cfg.communities = 3;
  cfg.views.assign(1, SynthViewConfig{});
  cfg.views[0].dim = 6;
  cfg.views[0].intra_prob = 0.5;
  cfg.views[0].inter_prob = 0.0;
  cfg.feature_flip = 1.0;
  cfg.seed = 3;
  MultiplexNetwork net = SynthGenerate(cfg);
  Hyperparams base = Small();
  base.max_iters = 20;
  HyperGrid grid{{0.01}, {0.0, 10.0}, {0.1}};
  CrossValidationResult r = CrossValidate(net, grid, base, 5, EvalProtocol{});
  REQUIRE(r.scores.size() == 2);
  MESSAGE("beta=0: " << r.scores[0].micro_f1 << "  beta=10: " << r.scores[1].micro_f1);
  CHECK(r.best.beta == 10.0);
  CHECK(r.scores[1].micro_f1 > r.scores[0].micro_f1 + 0.2);
}

}  // namespace
}  // namespace dpmne
