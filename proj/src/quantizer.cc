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

#include "dpmne/quantizer.h"

#include <random>

namespace dpmne {

Matrix SignCodes(const Matrix& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

BinaryCodes BinarizeSign(const Matrix& y) {
  BinaryCodes out;
  out.codes = SignCodes(y);
  out.rotation = Matrix::Identity(y.cols(), y.cols());
  out.quant_loss = (out.codes - y).squaredNorm();
  return out;
}

Matrix ProcrustesRotation(const Matrix& y, const Matrix& codes) {
  if (y.rows() != codes.rows() || y.cols() != codes.cols())
    throw Error("shape_mismatch", "codes and embedding differ in shape");
  Eigen::JacobiSVD<Matrix> svd(y.transpose() * codes,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

namespace {

Matrix RandomOrthogonal(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) g(r, c) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q;
}

}  // namespace

BinaryCodes Itq(const Matrix& y, const ItqConfig& config) {
  if (config.iterations < 1)
    throw Error("invalid_config", "itq needs at least one iteration");
  const int d = static_cast<int>(y.cols());
  BinaryCodes out;
  if (config.principal_start && config.random_start)
    throw Error("invalid_config", "choose one itq start");
  if (config.principal_start) {
    Eigen::JacobiSVD<Matrix> svd(y, Eigen::ComputeFullV);
    out.rotation = svd.matrixV();
  } else if (config.random_start) {
    out.rotation = RandomOrthogonal(d, *config.random_start);
  } else {
    out.rotation = Matrix::Identity(d, d);
  }
  Matrix projected = y * out.rotation;
  out.codes = SignCodes(projected);
  out.quant_loss = (out.codes - projected).squaredNorm();
  out.loss_trace.push_back(out.quant_loss);
  for (int it = 0; it < config.iterations; ++it) {
    Matrix rotation = ProcrustesRotation(y, out.codes);
    Matrix rotated = y * rotation;
    Matrix codes = SignCodes(rotated);
    const double loss = (codes - rotated).squaredNorm();
    // Both half-steps are exact minimizers; a larger value can only come
    // from rounding, in which case the previous pair is kept.
    if (loss > out.quant_loss) break;
    const double change = out.quant_loss - loss;
    out.rotation = std::move(rotation);
    out.codes = std::move(codes);
    out.quant_loss = loss;
    out.loss_trace.push_back(loss);
    if (change < config.tolerance) break;
  }
  return out;
}

std::vector<std::uint8_t> PackCodes(const Matrix& codes) {
  const auto rows = codes.rows();
  const auto cols = codes.cols();
  const auto stride = (cols + 7) / 8;
  std::vector<std::uint8_t> bytes(rows * stride, 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (codes(i, j) > 0.0)
        bytes[i * stride + j / 8] |= static_cast<std::uint8_t>(1u << (j % 8));
    }
  }
  return bytes;
}

Matrix UnpackCodes(const std::vector<std::uint8_t>& bytes, int rows,
                   int cols) {
  const int stride = (cols + 7) / 8;
  if (static_cast<long>(bytes.size()) != static_cast<long>(rows) * stride)
    throw Error("shape_mismatch", "packed code length does not match shape");
  Matrix codes(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      codes(i, j) = (bytes[i * stride + j / 8] >> (j % 8)) & 1u ? 1.0 : -1.0;
  return codes;
}

}  // namespace dpmne
