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

#ifndef DPMNE_QUANTIZER_H_
#define DPMNE_QUANTIZER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "dpmne/common.h"

namespace dpmne {

struct BinaryCodes {
  Matrix codes;     // n x d, entries exactly -1 or +1
  Matrix rotation;  // d x d orthogonal
  double quant_loss = 0.0;  // ||C - Y Q||_F^2
  // Loss after each alternation (empty for plain sign binarization).
  std::vector<double> loss_trace;
};

// sign(x) with sign(0) = +1.
Matrix SignCodes(const Matrix& m);

// Direct binarization: C = sign(Y), Q = I.
BinaryCodes BinarizeSign(const Matrix& y);

// Orthogonal Q minimizing ||C - Y Q||_F for fixed C: with Y^T C = U S V^T,
// Q = U V^T. Full singular bases keep the result defined when Y^T C is
// rank deficient.
Matrix ProcrustesRotation(const Matrix& y, const Matrix& codes);

struct ItqConfig {
  int iterations = 50;
  double tolerance = 1e-10;
  // Start from a seeded random orthogonal matrix instead of the identity.
  std::optional<std::uint64_t> random_start;
  // Start from the right singular vectors of Y. The iterates then depend on
  // Y only through its orbit under orthogonal rotation.
  bool principal_start = false;
};

// Iterative quantization: alternate C <- sign(Y Q) and the Procrustes
// update of Q. Ends with a final sign step so C = sign(Y Q) on return.
// Throws Error("invalid_config") for iterations < 1.
BinaryCodes Itq(const Matrix& y, const ItqConfig& config = {});

// Row-major packed bits, bit j of row i = (C_ij + 1) / 2, little-endian
// within each byte, each row padded to a whole byte.
std::vector<std::uint8_t> PackCodes(const Matrix& codes);
Matrix UnpackCodes(const std::vector<std::uint8_t>& bytes, int rows, int cols);

}  // namespace dpmne

#endif  // DPMNE_QUANTIZER_H_
