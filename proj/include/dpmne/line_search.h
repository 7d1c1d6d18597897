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

#ifndef DPMNE_LINE_SEARCH_H_
#define DPMNE_LINE_SEARCH_H_

#include <cmath>
#include <string>

#include "dpmne/common.h"

namespace dpmne {

struct LineSearchResult {
  bool accepted = false;
  double step = 0.0;
  double loss = 0.0;
};

// Armijo backtracking along the negative gradient. `eval(t)` returns the
// loss at x - t * g (the caller keeps the candidate). The step halves until
//   loss(t) <= loss - armijo * t * ||g||^2.
// Once the predicted decrease t * ||g||^2 drops below the resolution of
// `loss` no representable progress exists and the search reports a
// non-accepted, non-failing result. Exhausting max_halvings before that
// point means the direction is not a descent direction: Error
// ("step_underflow") is thrown with `what` in the message.
template <typename Eval>
LineSearchResult Backtrack(double loss, double grad_sq, double step,
                           double armijo, int max_halvings, Eval&& eval,
                           const std::string& what) {
  LineSearchResult result;
  result.loss = loss;
  result.step = step;
  if (!(grad_sq > 0.0)) return result;
  const double resolution = 1e-15 * (1.0 + std::abs(loss));
  double t = step;
  for (int h = 0; h <= max_halvings; ++h, t *= 0.5) {
    if (t * grad_sq < resolution) {
      result.step = t;
      return result;
    }
    const double trial = eval(t);
    if (std::isfinite(trial) && trial <= loss - armijo * t * grad_sq) {
      result.accepted = true;
      result.step = t;
      result.loss = trial;
      return result;
    }
  }
  throw Error("step_underflow",
              what + ": backtracking failed after " +
                  std::to_string(max_halvings) + " halvings (loss " +
                  std::to_string(loss) + ", |g|^2 " + std::to_string(grad_sq) +
                  ")");
}

}  // namespace dpmne

#endif  // DPMNE_LINE_SEARCH_H_
