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

#ifndef DPMNE_TESTS_TEST_UTIL_H_
#define DPMNE_TESTS_TEST_UTIL_H_

#include "dpmne/graph_model.h"

namespace dpmne::testing {

// 3 nodes, 2 views; node 2 is missing from view 1.
inline MultiplexNetwork TinyNetwork() {
  MultiplexNetwork net;
  net.n = 3;
  ViewData a;
  a.features.resize(3, 2);
  a.features << 1, 0, 0, 1, 1, 1;
  a.mask = {true, true, true};
  a.adjacency = AdjacencyFromEdges(3, {{0, 1}, {1, 2}});
  ViewData b;
  b.features.resize(3, 3);
  b.features << 0.5, 0, 1, 0, 0.25, 0, 0, 0, 0;
  b.mask = {true, true, false};
  b.adjacency = AdjacencyFromEdges(3, {{0, 2}});
  net.views = {a, b};
  net.labels = std::vector<int>{0, 1, 1};
  return net;
}

}  // namespace dpmne::testing

#endif  // DPMNE_TESTS_TEST_UTIL_H_
