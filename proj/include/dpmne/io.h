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

#ifndef DPMNE_IO_H_
#define DPMNE_IO_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dpmne/common.h"
#include "dpmne/eval.h"
#include "dpmne/graph_model.h"
#include "dpmne/quantizer.h"
#include "dpmne/trainer.h"

namespace dpmne {

// On-disk layout of a network, all text with LF endings:
//
//   manifest.txt        format=1, n=, t=, optional labels=, and per view
//                       view<s>.dim=, view<s>.features=, view<s>.edges=,
//                       view<s>.mask=  (paths relative to the manifest)
//   features            n rows of d_s tab-separated reals, zeros on
//                       missing rows
//   edges               one "u<TAB>v" pair per line, 0-indexed, undirected
//   mask                one node id per line listing the MISSING nodes
//   labels              one "node<TAB>label" pair per line
//
// Numbers are written with %.17g.

// Parses a manifest and the files it names, then validates the result.
// Parse failures throw Error("parse_error") with file:line:column; missing
// files throw Error("io_error"); a declared dim that disagrees with the
// feature file throws Error("dimension_mismatch") naming the view.
MultiplexNetwork LoadNetwork(const std::filesystem::path& manifest);

// Writes the canonical form into `dir` (created if needed) and returns the
// manifest path.
std::filesystem::path SaveNetwork(const MultiplexNetwork& network,
                                  const std::filesystem::path& dir);

// "%.17g".
std::string FormatDouble(double v);

// node_id then d tab-separated values per line.
void SaveEmbeddings(const Matrix& y, const std::filesystem::path& path);
Matrix LoadEmbeddings(const std::filesystem::path& path);

// Writes the +-1 matrix as TSV and the packed bits next to it.
void SaveCodes(const BinaryCodes& codes, const std::filesystem::path& tsv_path,
               const std::filesystem::path& bin_path);

std::vector<int> LoadLabels(const std::filesystem::path& path, int n);

struct Checkpoint {
  EmbeddingState state;
  Hyperparams hyper;
};

// JSON archive holding Y, every B^s and H^s, autoencoder parameters,
// hyperparameters, step lengths and the objective trace. Doubles round-trip
// exactly.
void SaveCheckpoint(const EmbeddingState& state, const Hyperparams& hyper,
                    const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Tab-separated table with a header row.
void WriteSweepTable(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path);
void WriteSweepTable(const std::vector<SweepRow>& rows, std::ostream& out);
// Long format: ratio, method, metric, mean, std.
void WriteSweepLong(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path);

// Cora (cora.content + cora.cites) as a two-view network. The citation
// view's features are each paper's 0/1 link row; the attribute view joins
// papers sharing at least `min_shared_attributes` words.
MultiplexNetwork LoadCora(const std::filesystem::path& dir,
                          int min_shared_attributes = 1);

}  // namespace dpmne

#endif  // DPMNE_IO_H_
