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

#ifndef DPMNE_GRAPH_MODEL_H_
#define DPMNE_GRAPH_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpmne/common.h"

namespace dpmne {

// One relation type of a multiplex network. Nodes are the dense indices
// 0..n-1 shared by every view. Rows of `features` whose mask bit is false
// hold zeros; the mask is the only record of which rows are observed.
struct ViewData {
  Matrix features;          // n x dim
  Mask mask;                // size n, true = present
  SparseMatrix adjacency;   // n x n, symmetric 0/1, zero diagonal
  // Rows filled in by an imputation step. Empty unless imputation ran.
  std::vector<bool> imputed;

  int dim() const { return static_cast<int>(features.cols()); }
  int present_count() const;
};

struct MultiplexNetwork {
  int n = 0;
  std::vector<ViewData> views;
  std::optional<std::vector<int>> labels;  // evaluation only

  int t() const { return static_cast<int>(views.size()); }
};

struct Violation {
  int view = -1;  // -1 when the violation is network-wide
  std::string what;
};

using ValidationReport = std::vector<Violation>;

// Lists every violated structural invariant; empty iff well-formed.
ValidationReport Validate(const MultiplexNetwork& network);

// Throws Error("invalid_network") describing the first few violations.
void ValidateOrThrow(const MultiplexNetwork& network);

// Builds a symmetric 0/1 adjacency from an undirected edge list. Duplicate
// and reversed pairs collapse; self-loops are dropped.
SparseMatrix AdjacencyFromEdges(
    int n, const std::vector<std::pair<int, int>>& edges);

// Upper-triangle edge list (u < v), sorted.
std::vector<std::pair<int, int>> EdgesFromAdjacency(const SparseMatrix& adj);

struct SynthViewConfig {
  double intra_prob = 0.05;
  double inter_prob = 0.005;
  int dim = 32;
  double pdr = 0.0;
};

// Planted-partition multiplex generator.
struct SynthConfig {
  int n = 200;
  int communities = 4;
  std::vector<SynthViewConfig> views = std::vector<SynthViewConfig>(2);
  double noise = 0.3;
  // Fraction of nodes whose feature signal points at a random community
  // instead of their own.
  double feature_flip = 0.0;
  // Emit 0/1 features by thresholding the noisy projection at 0.5.
  bool binary_features = false;
  std::uint64_t seed = 1;
};

// Nodes are assigned to communities round-robin after a seeded shuffle. Per
// view, pairs share an edge with intra_prob (same community) or inter_prob.
// Features are the one-hot community indicator times a fixed random
// communities x dim map, plus Gaussian noise. Masks drop round(pdr * n)
// rows per view through ApplyPdr, so every node stays present somewhere.
// Throws Error("invalid_config") or Error("pdr_infeasible").
MultiplexNetwork SynthGenerate(const SynthConfig& config);

// Masks additional rows so that each view's missing fraction becomes
// round(ratio[s] * n) / n. Previously missing rows stay missing and present
// rows are copied bit for bit. Nodes whose last present view would be
// removed are skipped when choosing victims; if not enough candidates are
// left, Error("pdr_infeasible") is thrown.
MultiplexNetwork ApplyPdr(const MultiplexNetwork& network,
                          const std::vector<double>& ratio,
                          std::uint64_t seed);

// Fraction of masked-out rows in one view.
double MeasuredPdr(const ViewData& view);

// Rescales every feature column to [0, 1] by the min and max over present
// rows; constant columns become 0 and missing rows stay zero.
MultiplexNetwork MinMaxScaleFeatures(const MultiplexNetwork& network);

}  // namespace dpmne

#endif  // DPMNE_GRAPH_MODEL_H_
