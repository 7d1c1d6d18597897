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

#include "dpmne/graph_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace dpmne {

int ViewData::present_count() const {
  return static_cast<int>(std::count(mask.begin(), mask.end(), true));
}

ValidationReport Validate(const MultiplexNetwork& network) {
  ValidationReport report;
  auto flag = [&report](int view, std::string what) {
    report.push_back({view, std::move(what)});
  };
  if (network.n < 1) flag(-1, "node count must be at least 1");
  if (network.t() < 1) flag(-1, "network must have at least one view");
  if (network.labels && static_cast<int>(network.labels->size()) != network.n)
    flag(-1, "labels length differs from node count");

  const int n = network.n;
  for (int s = 0; s < network.t(); ++s) {
    const ViewData& v = network.views[s];
    if (v.features.rows() != n) {
      flag(s, "feature matrix has " + std::to_string(v.features.rows()) +
                  " rows, expected " + std::to_string(n));
    }
    if (static_cast<int>(v.mask.size()) != n) {
      flag(s, "mask length differs from node count");
    } else {
      if (v.present_count() == 0) flag(s, "view has no present nodes");
      if (v.features.rows() == n) {
        for (int i = 0; i < n; ++i) {
          if (!v.mask[i] && v.features.row(i).cwiseAbs().maxCoeff() != 0.0) {
            flag(s, "masked row " + std::to_string(i) +
                        " has nonzero features");
          }
        }
      }
    }
    if (!v.features.allFinite()) flag(s, "features contain non-finite values");
    if (v.adjacency.rows() != n || v.adjacency.cols() != n) {
      flag(s, "adjacency is not n x n");
      continue;
    }
    bool diag = false;
    bool binary = true;
    for (int i = 0; i < n; ++i) {
      for (SparseMatrix::InnerIterator it(v.adjacency, i); it; ++it) {
        if (it.value() == 0.0) continue;
        if (it.col() == i) diag = true;
        if (it.value() != 1.0) binary = false;
      }
    }
    if (diag) flag(s, "adjacency has nonzero diagonal (self-loop)");
    if (!binary) flag(s, "adjacency entries are not 0/1");
    SparseMatrix transposed = v.adjacency.transpose();
    if ((transposed - v.adjacency).norm() != 0.0)
      flag(s, "adjacency is not symmetric");
  }
  return report;
}

void ValidateOrThrow(const MultiplexNetwork& network) {
  ValidationReport report = Validate(network);
  if (report.empty()) return;
  std::ostringstream msg;
  msg << report.size() << " violation(s):";
  const size_t shown = std::min<size_t>(report.size(), 5);
  for (size_t k = 0; k < shown; ++k) {
    msg << ' ';
    if (report[k].view >= 0) msg << "[view " << report[k].view << "] ";
    msg << report[k].what << ';';
  }
  throw Error("invalid_network", msg.str());
}

SparseMatrix AdjacencyFromEdges(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error("edge_out_of_range",
                  "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                      ") outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) continue;
    triplets.emplace_back(u, v, 1.0);
    triplets.emplace_back(v, u, 1.0);
  }
  SparseMatrix adj(n, n);
  // Duplicates are summed by setFromTriplets; clamp them back to 1.
  adj.setFromTriplets(triplets.begin(), triplets.end(),
                      [](double, double) { return 1.0; });
  adj.makeCompressed();
  return adj;
}

std::vector<std::pair<int, int>> EdgesFromAdjacency(const SparseMatrix& adj) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < adj.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
      if (it.value() != 0.0 && it.col() > i)
        edges.emplace_back(i, static_cast<int>(it.col()));
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

namespace {

void CheckProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error("invalid_config", std::string(name) + " must lie in [0, 1]");
}

int MissingCount(double ratio, int n) {
  return static_cast<int>(std::lround(ratio * n));
}

}  // namespace

MultiplexNetwork SynthGenerate(const SynthConfig& config) {
  const int n = config.n;
  const int c = config.communities;
  if (n < 1) throw Error("invalid_config", "n must be at least 1");
  if (c < 1 || c > n)
    throw Error("invalid_config", "communities must lie in [1, n]");
  if (config.views.empty())
    throw Error("invalid_config", "at least one view is required");
  if (!(config.noise >= 0.0))
    throw Error("invalid_config", "noise must be nonnegative");
  CheckProbability(config.feature_flip, "feature_flip");
  for (const SynthViewConfig& vc : config.views) {
    CheckProbability(vc.intra_prob, "intra_prob");
    CheckProbability(vc.inter_prob, "inter_prob");
    if (vc.dim < 1) throw Error("invalid_config", "view dim must be >= 1");
    if (!(vc.pdr >= 0.0 && vc.pdr < 1.0))
      throw Error("invalid_config", "pdr must lie in [0, 1)");
    if (MissingCount(vc.pdr, n) >= n)
      throw Error("invalid_config", "pdr leaves a view with no present nodes");
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  MultiplexNetwork net;
  net.n = n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> labels(n);
  for (int k = 0; k < n; ++k) labels[order[k]] = k % c;

  // Community each node's features advertise.
  std::vector<int> signal = labels;
  for (int i = 0; i < n; ++i) {
    if (unit(rng) < config.feature_flip)
      signal[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(c));
  }

  for (const SynthViewConfig& vc : config.views) {
    ViewData view;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double p = labels[i] == labels[j] ? vc.intra_prob : vc.inter_prob;
        if (unit(rng) < p) edges.emplace_back(i, j);
      }
    }
    view.adjacency = AdjacencyFromEdges(n, edges);

    Matrix map(c, vc.dim);
    for (int r = 0; r < c; ++r)
      for (int q = 0; q < vc.dim; ++q) map(r, q) = unit(rng);
    view.features.resize(n, vc.dim);
    for (int i = 0; i < n; ++i) {
      for (int q = 0; q < vc.dim; ++q) {
        double x = map(signal[i], q) + config.noise * gauss(rng);
        if (config.binary_features) x = x > 0.5 ? 1.0 : 0.0;
        view.features(i, q) = x;
      }
    }

    view.mask.assign(n, true);
    net.views.push_back(std::move(view));
  }
  net.labels = std::move(labels);

  std::vector<double> pdr;
  for (const SynthViewConfig& vc : config.views) pdr.push_back(vc.pdr);
  return ApplyPdr(net, pdr, rng());
}

MultiplexNetwork ApplyPdr(const MultiplexNetwork& network,
                          const std::vector<double>& ratio,
                          std::uint64_t seed) {
  const int n = network.n;
  if (static_cast<int>(ratio.size()) != network.t()) {
    throw Error("shape_mismatch", "need one pdr per view (got " +
                                      std::to_string(ratio.size()) + ")");
  }
  for (double r : ratio) {
    if (!(r >= 0.0 && r < 1.0))
      throw Error("invalid_config", "pdr must lie in [0, 1)");
  }
  MultiplexNetwork out = network;
  std::vector<int> present_views(n, 0);
  for (const ViewData& v : out.views)
    for (int i = 0; i < n; ++i) present_views[i] += v.mask[i] ? 1 : 0;

  std::mt19937_64 rng(seed);
  for (int s = 0; s < out.t(); ++s) {
    ViewData& v = out.views[s];
    const int target = MissingCount(ratio[s], n);
    int missing = n - v.present_count();
    if (missing >= target) continue;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i : order) {
      if (missing == target) break;
      if (!v.mask[i] || present_views[i] <= 1) continue;
      v.mask[i] = false;
      v.features.row(i).setZero();
      --present_views[i];
      ++missing;
    }
    if (missing < target) {
      throw Error("pdr_infeasible",
                  "view " + std::to_string(s) + ": cannot mask " +
                      std::to_string(target) +
                      " rows while keeping every node present in some view");
    }
    if (missing >= n) {
      throw Error("pdr_infeasible",
                  "view " + std::to_string(s) + " would have no present nodes");
    }
  }
  return out;
}

double MeasuredPdr(const ViewData& view) {
  if (view.mask.empty()) return 0.0;
  return 1.0 - static_cast<double>(view.present_count()) /
                   static_cast<double>(view.mask.size());
}

MultiplexNetwork MinMaxScaleFeatures(const MultiplexNetwork& network) {
  MultiplexNetwork out = network;
  for (ViewData& v : out.views) {
    for (int c = 0; c < v.dim(); ++c) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int i = 0; i < out.n; ++i) {
        if (!v.mask[i]) continue;
        lo = std::min(lo, v.features(i, c));
        hi = std::max(hi, v.features(i, c));
      }
      for (int i = 0; i < out.n; ++i) {
        if (!v.mask[i]) continue;
        v.features(i, c) = hi > lo ? (v.features(i, c) - lo) / (hi - lo) : 0.0;
      }
    }
  }
  return out;
}

}  // namespace dpmne
