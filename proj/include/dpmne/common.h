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

#ifndef DPMNE_COMMON_H_
#define DPMNE_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dpmne {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Per-node presence flags for one view (true = features observed).
using Mask = std::vector<bool>;

// All library failures are reported with an Error. The code is a short
// machine-readable token (e.g. "shape_mismatch"); what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Worker cap from DPMNE_THREADS (unset or 0 means hardware concurrency).
int WorkerCount();

// Runs fn(i) for i in [0, count), spread over at most WorkerCount() threads.
// Each index must touch disjoint state. The first exception is rethrown.
template <typename Fn>
void ParallelFor(int count, Fn&& fn);

}  // namespace dpmne

#include "dpmne/parallel_inl.h"

#endif  // DPMNE_COMMON_H_
