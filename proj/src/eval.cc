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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "dpmne/line_search.h"

namespace dpmne {

ConfusionMatrix Confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int num_classes) {
  if (truth.size() != predicted.size())
    throw Error("shape_mismatch", "truth and prediction lengths differ");
  ConfusionMatrix m = ConfusionMatrix::Zero(num_classes, num_classes);
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
        predicted[i] >= num_classes)
      throw Error("out_of_range", "class id outside [0, num_classes)");
    ++m(truth[i], predicted[i]);
  }
  return m;
}

F1Scores F1FromConfusion(const ConfusionMatrix& confusion) {
  const int k = static_cast<int>(confusion.rows());
  long tp_sum = 0, fp_sum = 0, fn_sum = 0;
  double macro_sum = 0.0;
  int counted = 0;
  for (int c = 0; c < k; ++c) {
    const long tp = confusion(c, c);
    const long fn = confusion.row(c).sum() - tp;
    const long fp = confusion.col(c).sum() - tp;
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
    if (tp + fn + fp == 0) continue;
    ++counted;
    macro_sum += 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
  }
  F1Scores out;
  const long denom = 2 * tp_sum + fp_sum + fn_sum;
  out.micro = denom == 0 ? 0.0 : 2.0 * tp_sum / static_cast<double>(denom);
  out.macro = counted == 0 ? 0.0 : macro_sum / counted;
  return out;
}

MeanStd Summarize(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (values.size() - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Matrix Softmax(Matrix logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - top).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

struct SoftmaxLoss {
  const Matrix& x;
  const std::vector<int>& labels;
  double l2;

  double Value(const Matrix& w, const RowVector& b) const {
    Matrix logits = x * w;
    logits.rowwise() += b;
    double loss = 0.5 * l2 * w.squaredNorm();
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double top = logits.row(i).maxCoeff();
      const double lse =
          top + std::log((logits.row(i).array() - top).exp().sum());
      loss += lse - logits(i, labels[i]);
    }
    return loss;
  }

  void Gradient(const Matrix& w, const RowVector& b, Matrix& gw,
                RowVector& gb) const {
    Matrix logits = x * w;
    logits.rowwise() += b;
    Matrix p = Softmax(std::move(logits));
    for (Eigen::Index i = 0; i < p.rows(); ++i) p(i, labels[i]) -= 1.0;
    gw = x.transpose() * p + l2 * w;
    gb = p.colwise().sum();
  }
};

}  // namespace

void LogisticRegression::Fit(const Matrix& x, const std::vector<int>& labels,
                             int num_classes) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw Error("shape_mismatch", "one label per row is required");
  if (num_classes < 1) throw Error("invalid_config", "need at least one class");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw Error("out_of_range", "label outside [0, num_classes)");
  weights_ = Matrix::Zero(x.cols(), num_classes);
  bias_ = RowVector::Zero(num_classes);
  SoftmaxLoss objective{x, labels, options_.l2};
  double loss = objective.Value(weights_, bias_);
  double step = 1.0 / std::max<Eigen::Index>(x.rows(), 1);
  Matrix gw, cand_w;
  RowVector gb, cand_b;
  iterations_ = 0;
  for (; iterations_ < options_.max_iters; ++iterations_) {
    objective.Gradient(weights_, bias_, gw, gb);
    const double grad_sq = gw.squaredNorm() + gb.squaredNorm();
    gradient_norm_ = std::sqrt(grad_sq);
    if (gradient_norm_ <= options_.gradient_tol) break;
    auto eval = [&](double t) {
      cand_w = weights_ - t * gw;
      cand_b = bias_ - t * gb;
      return objective.Value(cand_w, cand_b);
    };
    LineSearchResult ls =
        Backtrack(loss, grad_sq, step, 1e-4, 60, eval, "logistic regression");
    if (!ls.accepted) break;
    weights_.swap(cand_w);
    bias_.swap(cand_b);
    loss = ls.loss;
    step = 2.0 * ls.step;
  }
}

Matrix LogisticRegression::PredictProba(const Matrix& x) const {
  Matrix logits = x * weights_;
  logits.rowwise() += bias_;
  return Softmax(std::move(logits));
}

std::vector<int> LogisticRegression::Predict(const Matrix& x) const {
  Matrix logits = x * weights_;
  logits.rowwise() += bias_;
  std::vector<int> out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index arg;
    logits.row(i).maxCoeff(&arg);
    out[i] = static_cast<int>(arg);
  }
  return out;
}

void EvalProtocol::Check() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("invalid_config", "train fraction must lie in (0, 1)");
  if (repeats < 1) throw Error("invalid_config", "repeats must be >= 1");
  if (!(l2 >= 0.0)) throw Error("invalid_config", "l2 must be nonnegative");
}

namespace {

int ClassCount(const std::vector<int>& labels) {
  int k = 0;
  for (int y : labels) {
    if (y < 0) throw Error("out_of_range", "labels must be nonnegative");
    k = std::max(k, y + 1);
  }
  return k;
}

Matrix Rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(rows.size(), m.cols());
  for (size_t k = 0; k < rows.size(); ++k) out.row(k) = m.row(rows[k]);
  return out;
}

std::vector<int> Pick(const std::vector<int>& v, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

// Z-scores both sets with the training mean and deviation; constant
// columns are only centred.
void Standardize(Matrix& train, Matrix& test) {
  const RowVector mean = train.colwise().mean();
  train.rowwise() -= mean;
  test.rowwise() -= mean;
  const double rows = std::max<double>(1.0, train.rows());
  RowVector scale = (train.colwise().squaredNorm() / rows).cwiseSqrt();
  for (Eigen::Index c = 0; c < scale.size(); ++c)
    if (!(scale(c) > 1e-12)) scale(c) = 1.0;
  train = train.array().rowwise() / scale.array();
  test = test.array().rowwise() / scale.array();
}

F1Scores FitAndScore(const Matrix& embeddings, const std::vector<int>& labels,
                     const std::vector<int>& train_idx,
                     const std::vector<int>& test_idx, int num_classes,
                     double l2) {
  Matrix train = Rows(embeddings, train_idx);
  Matrix test = Rows(embeddings, test_idx);
  Standardize(train, test);
  LogisticRegression::Options opts;
  opts.l2 = l2;
  LogisticRegression model(opts);
  model.Fit(train, Pick(labels, train_idx), num_classes);
  return F1FromConfusion(
      Confusion(Pick(labels, test_idx), model.Predict(test), num_classes));
}

}  // namespace

MetricsReport ClassifyF1(const Matrix& embeddings,
                         const std::vector<int>& labels,
                         const EvalProtocol& protocol) {
  protocol.Check();
  const int n = static_cast<int>(labels.size());
  if (embeddings.rows() != n)
    throw Error("shape_mismatch", "one label per embedding row is required");
  const int k = ClassCount(labels);
  const int train_count = static_cast<int>(std::lround(protocol.train_fraction * n));
  if (train_count < 1 || train_count >= n)
    throw Error("invalid_config", "split leaves an empty train or test set");

  std::mt19937_64 rng(protocol.seed);
  std::vector<bool> seen(k, false);
  for (int y : labels) seen[y] = true;
  std::vector<double> micro, macro;
  for (int r = 0; r < protocol.repeats; ++r) {
    std::vector<int> order(n);
    bool covered = false;
    for (int attempt = 0; attempt <= protocol.max_resamples && !covered;
         ++attempt) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<bool> in_train(k, false);
      for (int i = 0; i < train_count; ++i) in_train[labels[order[i]]] = true;
      covered = in_train == seen;
    }
    if (!covered) {
      throw Error("split_failed",
                  "could not draw a training split containing every class");
    }
    std::vector<int> train_idx(order.begin(), order.begin() + train_count);
    std::vector<int> test_idx(order.begin() + train_count, order.end());
    F1Scores f1 = FitAndScore(embeddings, labels, train_idx, test_idx, k,
                              protocol.l2);
    micro.push_back(f1.micro);
    macro.push_back(f1.macro);
  }
  MetricsReport report;
  report.micro_f1 = Summarize(micro);
  report.macro_f1 = Summarize(macro);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

double SquaredDistance(const Matrix& x, Eigen::Index i, const Matrix& c,
                       Eigen::Index j) {
  return (x.row(i) - c.row(j)).squaredNorm();
}

Matrix PlusPlusSeeds(const Matrix& x, int k, std::mt19937_64& rng) {
  const auto n = x.rows();
  Matrix centroids(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  Vector closest(n);
  for (Eigen::Index i = 0; i < n; ++i) closest(i) = SquaredDistance(x, i, centroids, 0);
  for (int c = 1; c < k; ++c) {
    const double total = closest.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (chosen = 0; chosen < n - 1; ++chosen) {
        target -= closest(chosen);
        if (target <= 0.0) break;
      }
    } else {
      chosen = first(rng);
    }
    centroids.row(c) = x.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i)
      closest(i) = std::min(closest(i), SquaredDistance(x, i, centroids, c));
  }
  return centroids;
}

KMeansResult Lloyd(const Matrix& x, Matrix centroids,
                   const KMeansOptions& options) {
  const auto n = x.rows();
  const int k = static_cast<int>(centroids.rows());
  KMeansResult r;
  r.assignment.assign(n, 0);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iters; ++it) {
    Vector dist(n);
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(x, i, centroids, c);
        if (d < best) {
          best = d;
          r.assignment[i] = c;
        }
      }
      dist(i) = best;
      r.inertia += best;
    }
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.assignment[i]) += x.row(i);
      ++counts[r.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
        continue;
      }
      Eigen::Index far;
      dist.maxCoeff(&far);
      centroids.row(c) = x.row(far);
      dist(far) = 0.0;
    }
    if (previous - r.inertia <= options.tol * std::max(r.inertia, 1e-300)) break;
    previous = r.inertia;
  }
  // Final assignment against the last centroids.
  r.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = SquaredDistance(x, i, centroids, c);
      if (d < best) {
        best = d;
        r.assignment[i] = c;
      }
    }
    r.inertia += best;
  }
  r.centroids = std::move(centroids);
  return r;
}

}  // namespace

KMeansResult KMeans(const Matrix& x, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k < 1 || k > x.rows())
    throw Error("invalid_config", "k must lie in [1, rows]");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    KMeansResult cand = Lloyd(x, PlusPlusSeeds(x, k, rng), options);
    if (cand.inertia < best.inertia) best = std::move(cand);
  }
  return best;
}

std::vector<int> MaxWeightMatching(const Matrix& weight) {
  const int n = static_cast<int>(weight.rows());
  if (weight.cols() != n)
    throw Error("shape_mismatch", "matching needs a square weight matrix");
  if (n == 0) return {};
  // Shortest augmenting path Hungarian method on cost = max - weight,
  // 1-based potentials as in the classical formulation.
  const double top = weight.maxCoeff();
  auto cost = [&](int i, int j) { return top - weight(i - 1, j - 1); };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double MatchedAccuracy(const std::vector<int>& clusters,
                       const std::vector<int>& labels) {
  if (clusters.size() != labels.size())
    throw Error("shape_mismatch", "cluster and label lengths differ");
  if (labels.empty()) return 0.0;
  const int size = std::max(ClassCount(clusters), ClassCount(labels));
  Matrix counts = Matrix::Zero(size, size);
  for (size_t i = 0; i < labels.size(); ++i) counts(clusters[i], labels[i]) += 1.0;
  const std::vector<int> match = MaxWeightMatching(counts);
  double hit = 0.0;
  for (int c = 0; c < size; ++c) hit += counts(c, match[c]);
  return hit / static_cast<double>(labels.size());
}

double ClusterAccuracy(const Matrix& embeddings, const std::vector<int>& labels,
                       int num_clusters, std::uint64_t seed) {
  if (embeddings.rows() != static_cast<Eigen::Index>(labels.size()))
    throw Error("shape_mismatch", "one label per embedding row is required");
  KMeansResult km = KMeans(embeddings, num_clusters, seed);
  return MatchedAccuracy(km.assignment, labels);
}

// ---------------------------------------------------------------------------

ImputeResult KnnImpute(const MultiplexNetwork& network, int k) {
  if (k < 1) throw Error("invalid_config", "k must be at least 1");
  const int n = network.n;
  const int t = network.t();
  ImputeResult result;
  result.network = network;

  // Similarity over the views both nodes have. Per-view dot products and
  // squared norms are summed, then combined into a cosine.
  std::vector<Matrix> gram(t);
  std::vector<Vector> sq(t);
  for (int s = 0; s < t; ++s) {
    const Matrix& x = network.views[s].features;
    gram[s] = x * x.transpose();
    sq[s] = x.rowwise().squaredNorm();
  }
  auto similarity = [&](int i, int j, bool* comparable) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    *comparable = false;
    for (int s = 0; s < t; ++s) {
      const Mask& m = network.views[s].mask;
      if (!m[i] || !m[j]) continue;
      *comparable = true;
      dot += gram[s](i, j);
      ni += sq[s](i);
      nj += sq[s](j);
    }
    if (!*comparable || ni <= 0.0 || nj <= 0.0) return 0.0;
    return dot / std::sqrt(ni * nj);
  };

  for (int s = 0; s < t; ++s) {
    const ViewData& src = network.views[s];
    ViewData& dst = result.network.views[s];
    if (src.present_count() == n) continue;
    if (dst.imputed.empty()) dst.imputed.assign(n, false);
    for (int i = 0; i < n; ++i) {
      if (src.mask[i]) continue;
      std::vector<std::pair<double, int>> cands;
      for (int j = 0; j < n; ++j) {
        if (j == i || !src.mask[j]) continue;
        bool comparable = false;
        const double sim = similarity(i, j, &comparable);
        if (comparable && sim > 0.0) cands.emplace_back(-sim, j);
      }
      dst.mask[i] = true;
      dst.imputed[i] = true;
      if (cands.empty()) {
        result.unresolved.emplace_back(s, i);
        continue;
      }
      const size_t keep = std::min<size_t>(k, cands.size());
      std::partial_sort(cands.begin(), cands.begin() + keep, cands.end());
      RowVector acc = RowVector::Zero(src.dim());
      double wsum = 0.0;
      for (size_t c = 0; c < keep; ++c) {
        const double w = -cands[c].first;
        acc += w * src.features.row(cands[c].second);
        wsum += w;
      }
      dst.features.row(i) = acc / wsum;
    }
  }
  return result;
}

MultiplexNetwork ZeroFill(const MultiplexNetwork& network) {
  MultiplexNetwork out = network;
  for (ViewData& v : out.views) v.mask.assign(out.n, true);
  return out;
}

// ---------------------------------------------------------------------------

std::string MethodName(Method m) {
  switch (m) {
    case Method::kDpmne:
      return "dpmne";
    case Method::kZeroFill:
      return "zero-fill";
    case Method::kKnnFill:
      return "knn-fill";
  }
  return "dpmne";
}

Method ParseMethod(const std::string& name) {
  if (name == "dpmne") return Method::kDpmne;
  if (name == "zero-fill") return Method::kZeroFill;
  if (name == "knn-fill") return Method::kKnnFill;
  throw Error("invalid_config", "unknown method '" + name + "'");
}

std::vector<SweepRow> PdrSweep(const MultiplexNetwork& network,
                               const std::vector<double>& ratios,
                               const std::vector<Method>& methods,
                               const Hyperparams& hyper,
                               const EvalProtocol& protocol,
                               const SweepOptions& options) {
  protocol.Check();
  hyper.Check();
  if (!network.labels)
    throw Error("missing_labels", "pdr sweep needs node labels");
  if (!std::is_sorted(ratios.begin(), ratios.end()))
    throw Error("invalid_config", "ratios must be sorted ascending");
  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    const MultiplexNetwork masked = ApplyPdr(
        network, std::vector<double>(network.t(), ratio), options.pdr_seed);
    for (Method m : methods) {
      MultiplexNetwork input;
      switch (m) {
        case Method::kDpmne:
          input = masked;
          break;
        case Method::kZeroFill:
          input = ZeroFill(masked);
          break;
        case Method::kKnnFill:
          input = KnnImpute(masked, options.knn).network;
          break;
      }
      const EmbeddingState state = Train(input, hyper);
      SweepRow row;
      row.ratio = ratio;
      row.method = m;
      row.metrics = ClassifyF1(state.y, *network.labels, protocol);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<int> FoldAssignment(int count, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > count)
    throw Error("invalid_config", "folds must lie in [2, item count]");
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(count);
  for (int k = 0; k < count; ++k) fold[order[k]] = k % folds;
  return fold;
}

CrossValidationResult CrossValidate(const MultiplexNetwork& network,
                                    const HyperGrid& grid,
                                    const Hyperparams& base, int folds,
                                    const EvalProtocol& protocol) {
  protocol.Check();
  if (!network.labels)
    throw Error("missing_labels", "cross validation needs node labels");
  if (grid.alphas.empty() || grid.betas.empty() || grid.lambdas.empty())
    throw Error("invalid_config", "every grid axis needs at least one value");
  const std::vector<int>& labels = *network.labels;
  const int k = ClassCount(labels);
  const std::vector<int> fold = FoldAssignment(network.n, folds, protocol.seed);

  CrossValidationResult result;
  double best_score = -1.0;
  for (double a : grid.alphas) {
    for (double b : grid.betas) {
      for (double l : grid.lambdas) {
        Hyperparams h = base;
        h.alpha = a;
        h.beta = b;
        h.lambda = l;
        h.Check();
        const EmbeddingState state = Train(network, h);
        std::vector<double> micro;
        for (int f = 0; f < folds; ++f) {
          std::vector<int> train_idx, test_idx;
          for (int i = 0; i < network.n; ++i)
            (fold[i] == f ? test_idx : train_idx).push_back(i);
          micro.push_back(FitAndScore(state.y, labels, train_idx, test_idx, k,
                                      protocol.l2)
                              .micro);
        }
        GridScore score{h, Summarize(micro).mean};
        result.scores.push_back(score);
        if (score.micro_f1 > best_score) {
          best_score = score.micro_f1;
          result.best = h;
        }
      }
    }
  }
  return result;
}

}  // namespace dpmne
