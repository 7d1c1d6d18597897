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

#ifndef DPMNE_EVAL_H_
#define DPMNE_EVAL_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpmne/common.h"
#include "dpmne/graph_model.h"
#include "dpmne/trainer.h"

namespace dpmne {

// ---------------------------------------------------------------------------
// Classification metrics

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

// counts(truth, predicted).
using ConfusionMatrix = Eigen::MatrixXi;

ConfusionMatrix Confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int num_classes);

// Micro-F1 from pooled TP/FP/FN; macro-F1 is the unweighted mean of the
// per-class F1 over classes that occur in the truth or the predictions.
// A class with no true positives scores 0.
F1Scores F1FromConfusion(const ConfusionMatrix& confusion);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

MeanStd Summarize(const std::vector<double>& values);

// Multinomial logistic regression with an L2 penalty on the weights:
//   sum_i -log softmax(x_i W + b)[y_i] + l2 / 2 * ||W||^2
// fitted by full-batch backtracking gradient descent.
class LogisticRegression {
 public:
  struct Options {
    double l2 = 1.0;
    double gradient_tol = 1e-6;
    int max_iters = 2000;
  };

  LogisticRegression() = default;
  explicit LogisticRegression(Options options) : options_(options) {}

  void Fit(const Matrix& x, const std::vector<int>& labels, int num_classes);
  Matrix PredictProba(const Matrix& x) const;
  std::vector<int> Predict(const Matrix& x) const;

  const Matrix& weights() const { return weights_; }
  const RowVector& bias() const { return bias_; }
  int iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Options options_;
  Matrix weights_;
  RowVector bias_;
  int iterations_ = 0;
  double gradient_norm_ = 0.0;
};

struct EvalProtocol {
  double train_fraction = 0.5;
  int repeats = 10;
  std::uint64_t seed = 1;
  double l2 = 1.0;
  // Split redraws allowed when a class is missing from the training half.
  int max_resamples = 100;

  void Check() const;
};

struct MetricsReport {
  MeanStd micro_f1;
  MeanStd macro_f1;
  MeanStd clustering_accuracy;
};

// Per repeat: random train/test split, z-scoring with training statistics,
// logistic regression fit and F1 on the test half.
MetricsReport ClassifyF1(const Matrix& embeddings, const std::vector<int>& labels,
                         const EvalProtocol& protocol);

// ---------------------------------------------------------------------------
// Clustering

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centroids;
  double inertia = 0.0;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-6;
};

// Lloyd iterations from k-means++ seeds; the restart with the lowest
// inertia wins. An emptied cluster is re-seeded at the point farthest from
// its centroid.
KMeansResult KMeans(const Matrix& x, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// Maximum-weight assignment on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> MaxWeightMatching(const Matrix& weight);

// Fraction of nodes whose cluster maps to their label under the best
// one-to-one cluster/label matching.
double MatchedAccuracy(const std::vector<int>& clusters,
                       const std::vector<int>& labels);

double ClusterAccuracy(const Matrix& embeddings, const std::vector<int>& labels,
                       int num_clusters, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Imputation baseline

struct ImputeResult {
  MultiplexNetwork network;
  // (view, node) pairs with no comparable neighbour, left zero-filled.
  std::vector<std::pair<int, int>> unresolved;
};

// Each missing row of view s is replaced by the similarity-weighted mean of
// the k most similar nodes present in s. Similarity is the cosine over the
// concatenated views where both nodes are present; only positive
// similarities count. Imputed rows are marked present and flagged in
// ViewData::imputed. Throws Error("invalid_config") for k < 1.
ImputeResult KnnImpute(const MultiplexNetwork& network, int k);

// Copy with every mask bit set; missing rows keep their zeros. This is the
// zero-fill baseline.
MultiplexNetwork ZeroFill(const MultiplexNetwork& network);

// ---------------------------------------------------------------------------
// Experiments

enum class Method { kDpmne, kZeroFill, kKnnFill };

std::string MethodName(Method m);
Method ParseMethod(const std::string& name);

struct SweepRow {
  double ratio = 0.0;
  Method method = Method::kDpmne;
  MetricsReport metrics;
};

struct SweepOptions {
  int knn = 5;
  std::uint64_t pdr_seed = 1;
};

// For each ratio: mask every view to that missing fraction, run each method
// and classify its embedding. Rows are ordered ratio-major.
std::vector<SweepRow> PdrSweep(const MultiplexNetwork& network,
                               const std::vector<double>& ratios,
                               const std::vector<Method>& methods,
                               const Hyperparams& hyper,
                               const EvalProtocol& protocol,
                               const SweepOptions& options = {});

struct HyperGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> lambdas;
};

struct GridScore {
  Hyperparams hyper;
  double micro_f1 = 0.0;
};

struct CrossValidationResult {
  Hyperparams best;
  std::vector<GridScore> scores;  // grid order: alpha, beta, lambda
};

// Assigns each of `count` items to one of `folds` folds after a seeded
// shuffle; fold sizes differ by at most one.
std::vector<int> FoldAssignment(int count, int folds, std::uint64_t seed);

// Trains an embedding per grid point and scores it by k-fold logistic
// regression over the labelled nodes; the best mean micro-F1 wins, ties go
// to the earlier grid point.
CrossValidationResult CrossValidate(const MultiplexNetwork& network,
                                    const HyperGrid& grid,
                                    const Hyperparams& base, int folds,
                                    const EvalProtocol& protocol);

}  // namespace dpmne

#endif  // DPMNE_EVAL_H_
