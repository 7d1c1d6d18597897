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

#include "dpmne/io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace dpmne {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream OpenIn(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path.string());
  return in;
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  return out;
}

[[noreturn]] void ParseFail(const fs::path& file, int line, int column,
                            const std::string& what) {
  throw Error("parse_error", file.string() + ":" + std::to_string(line) + ":" +
                                 std::to_string(column) + ": " + what);
}

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> SplitTabs(std::string_view line) {
  std::vector<Token> out;
  size_t start = 0;
  while (start <= line.size()) {
    size_t end = line.find('\t', start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back({line.substr(start, end - start), static_cast<int>(start) + 1});
    start = end + 1;
  }
  return out;
}

// Reads lines, dropping a trailing CR. Blank lines are skipped by callers.
template <typename Fn>
void ForEachLine(const fs::path& path, Fn&& fn) {
  std::ifstream in = OpenIn(path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(number, std::string_view(line));
  }
}

double ParseReal(const fs::path& file, int line, const Token& tok) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || tok.text.empty())
    ParseFail(file, line, tok.column,
              "expected a real number, got '" + std::string(tok.text) + "'");
  return v;
}

long ParseInt(const fs::path& file, int line, const Token& tok) {
  long v = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || tok.text.empty())
    ParseFail(file, line, tok.column,
              "expected an integer, got '" + std::string(tok.text) + "'");
  return v;
}

bool Blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

int NodeId(const fs::path& file, int line, const Token& tok, int n) {
  const long id = ParseInt(file, line, tok);
  if (id < 0 || id >= n)
    ParseFail(file, line, tok.column,
              "node id " + std::to_string(id) + " outside [0, " +
                  std::to_string(n) + ")");
  return static_cast<int>(id);
}

Matrix ReadFeatures(const fs::path& path, int n, int dim, int view) {
  Matrix x(n, dim);
  int row = 0;
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    if (row >= n) ParseFail(path, line, 1, "more than n feature rows");
    std::vector<Token> toks = SplitTabs(text);
    if (static_cast<int>(toks.size()) != dim) {
      throw Error("dimension_mismatch",
                  "view " + std::to_string(view) + ": " + path.string() + ":" +
                      std::to_string(line) + " has " +
                      std::to_string(toks.size()) + " columns, manifest says " +
                      std::to_string(dim));
    }
    for (int c = 0; c < dim; ++c) x(row, c) = ParseReal(path, line, toks[c]);
    ++row;
  });
  if (row != n) {
    throw Error("dimension_mismatch", "view " + std::to_string(view) + ": " +
                                          path.string() + " has " +
                                          std::to_string(row) +
                                          " rows, expected " +
                                          std::to_string(n));
  }
  return x;
}

std::vector<std::pair<int, int>> ReadEdges(const fs::path& path, int n) {
  std::vector<std::pair<int, int>> edges;
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    if (toks.size() != 2) ParseFail(path, line, 1, "expected 'u<TAB>v'");
    edges.emplace_back(NodeId(path, line, toks[0], n),
                       NodeId(path, line, toks[1], n));
  });
  return edges;
}

Mask ReadMissing(const fs::path& path, int n) {
  Mask mask(n, true);
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    if (toks.size() != 1) ParseFail(path, line, 1, "expected one node id");
    mask[NodeId(path, line, toks[0], n)] = false;
  });
  return mask;
}

std::map<std::string, std::pair<std::string, int>> ReadManifest(
    const fs::path& path) {
  std::map<std::string, std::pair<std::string, int>> kv;
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text) || text.front() == '#') return;
    const size_t eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
      ParseFail(path, line, 1, "expected key=value");
    kv[std::string(text.substr(0, eq))] = {std::string(text.substr(eq + 1)),
                                           line};
  });
  return kv;
}

json MatrixToJson(const Matrix& m) {
  std::vector<double> data(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(data.data(), m.rows(), m.cols()) = m;
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw Error("parse_error", "checkpoint matrix size mismatch");
  Matrix m(rows, cols);
  m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                    Eigen::RowMajor>>(data.data(), rows, cols);
  return m;
}

json LayerToJson(const DenseLayer& l) {
  return json{{"weight", MatrixToJson(l.weight)},
              {"bias", MatrixToJson(l.bias)},
              {"activation", ActivationName(l.activation)}};
}

DenseLayer LayerFromJson(const json& j) {
  DenseLayer l;
  l.weight = MatrixFromJson(j.at("weight"));
  l.bias = MatrixFromJson(j.at("bias"));
  l.activation = ParseActivation(j.at("activation").get<std::string>());
  return l;
}

json HyperToJson(const Hyperparams& h) {
  return json{{"alpha", h.alpha},
              {"beta", h.beta},
              {"lambda", h.lambda},
              {"dim", h.dim},
              {"max_iters", h.max_iters},
              {"y_steps", h.y_steps},
              {"h_steps", h.h_steps},
              {"y_learning_rate", h.y_learning_rate},
              {"h_learning_rate", h.h_learning_rate},
              {"encoder_widths", h.encoder_widths},
              {"hidden_activation", ActivationName(h.hidden_activation)},
              {"output_activation", ActivationName(h.output_activation)},
              {"proximity_weights", h.proximity.weights},
              {"proximity_normalize", h.proximity.normalize},
              {"early_stop_tol", h.early_stop_tol},
              {"early_stop_patience", h.early_stop_patience},
              {"seed", h.seed}};
}

Hyperparams HyperFromJson(const json& j) {
  Hyperparams h;
  h.alpha = j.at("alpha");
  h.beta = j.at("beta");
  h.lambda = j.at("lambda");
  h.dim = j.at("dim");
  h.max_iters = j.at("max_iters");
  h.y_steps = j.at("y_steps");
  h.h_steps = j.at("h_steps");
  h.y_learning_rate = j.at("y_learning_rate");
  h.h_learning_rate = j.at("h_learning_rate");
  h.encoder_widths = j.at("encoder_widths").get<std::vector<int>>();
  h.hidden_activation = ParseActivation(j.at("hidden_activation"));
  h.output_activation = ParseActivation(j.at("output_activation"));
  h.proximity.weights = j.at("proximity_weights").get<std::vector<double>>();
  h.proximity.normalize = j.at("proximity_normalize");
  h.early_stop_tol = j.at("early_stop_tol");
  h.early_stop_patience = j.at("early_stop_patience");
  h.seed = j.at("seed");
  return h;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MultiplexNetwork LoadNetwork(const fs::path& manifest) {
  const auto kv = ReadManifest(manifest);
  const fs::path base = manifest.parent_path();
  auto get = [&](const std::string& key) -> const std::pair<std::string, int>& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw Error("parse_error",
                  manifest.string() + ": missing key '" + key + "'");
    return it->second;
  };
  auto get_int = [&](const std::string& key) {
    const auto& [value, line] = get(key);
    const size_t col = key.size() + 2;
    return ParseInt(manifest, line, {value, static_cast<int>(col)});
  };
  if (get("format").first != "1")
    throw Error("parse_error", manifest.string() + ": unsupported format '" +
                                   get("format").first + "'");
  MultiplexNetwork net;
  const long n = get_int("n");
  const long t = get_int("t");
  if (n < 1 || t < 1)
    throw Error("parse_error", manifest.string() + ": n and t must be >= 1");
  net.n = static_cast<int>(n);
  for (int s = 0; s < t; ++s) {
    const std::string prefix = "view" + std::to_string(s) + ".";
    const long dim = get_int(prefix + "dim");
    if (dim < 1)
      throw Error("dimension_mismatch",
                  "view " + std::to_string(s) + ": dim must be >= 1");
    ViewData v;
    v.features = ReadFeatures(base / get(prefix + "features").first, net.n,
                              static_cast<int>(dim), s);
    v.adjacency =
        AdjacencyFromEdges(net.n, ReadEdges(base / get(prefix + "edges").first, net.n));
    v.mask = ReadMissing(base / get(prefix + "mask").first, net.n);
    net.views.push_back(std::move(v));
  }
  if (kv.count("labels"))
    net.labels = LoadLabels(base / get("labels").first, net.n);
  ValidateOrThrow(net);
  return net;
}

fs::path SaveNetwork(const MultiplexNetwork& network, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path manifest = dir / "manifest.txt";
  std::ofstream m = OpenOut(manifest);
  m << "format=1\n"
    << "n=" << network.n << "\n"
    << "t=" << network.t() << "\n";
  if (network.labels) m << "labels=labels.tsv\n";
  for (int s = 0; s < network.t(); ++s) {
    const ViewData& v = network.views[s];
    const std::string stem = "view" + std::to_string(s);
    m << stem << ".dim=" << v.dim() << "\n"
      << stem << ".features=" << stem << ".features.tsv\n"
      << stem << ".edges=" << stem << ".edges.tsv\n"
      << stem << ".mask=" << stem << ".missing.txt\n";

    std::ofstream f = OpenOut(dir / (stem + ".features.tsv"));
    for (Eigen::Index i = 0; i < v.features.rows(); ++i) {
      for (Eigen::Index c = 0; c < v.features.cols(); ++c) {
        if (c) f << '\t';
        f << FormatDouble(v.features(i, c));
      }
      f << '\n';
    }
    std::ofstream e = OpenOut(dir / (stem + ".edges.tsv"));
    for (auto [a, b] : EdgesFromAdjacency(v.adjacency)) e << a << '\t' << b << '\n';
    std::ofstream k = OpenOut(dir / (stem + ".missing.txt"));
    for (int i = 0; i < network.n; ++i)
      if (!v.mask[i]) k << i << '\n';
  }
  if (network.labels) {
    std::ofstream l = OpenOut(dir / "labels.tsv");
    for (int i = 0; i < network.n; ++i) l << i << '\t' << (*network.labels)[i] << '\n';
  }
  return manifest;
}

void SaveEmbeddings(const Matrix& y, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    out << i;
    for (Eigen::Index c = 0; c < y.cols(); ++c) out << '\t' << FormatDouble(y(i, c));
    out << '\n';
  }
}

Matrix LoadEmbeddings(const fs::path& path) {
  std::vector<std::vector<double>> rows;
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    const long id = ParseInt(path, line, toks[0]);
    if (id != static_cast<long>(rows.size()))
      ParseFail(path, line, 1, "node ids must be 0..n-1 in order");
    std::vector<double> row;
    for (size_t c = 1; c < toks.size(); ++c) row.push_back(ParseReal(path, line, toks[c]));
    if (!rows.empty() && row.size() != rows.front().size())
      ParseFail(path, line, 1, "ragged embedding row");
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw Error("parse_error", path.string() + ": empty file");
  Matrix y(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t c = 0; c < rows[i].size(); ++c) y(i, c) = rows[i][c];
  return y;
}

void SaveCodes(const BinaryCodes& codes, const fs::path& tsv_path,
               const fs::path& bin_path) {
  {
    std::ofstream out = OpenOut(tsv_path);
    for (Eigen::Index i = 0; i < codes.codes.rows(); ++i) {
      out << i;
      for (Eigen::Index c = 0; c < codes.codes.cols(); ++c)
        out << '\t' << (codes.codes(i, c) > 0.0 ? "1" : "-1");
      out << '\n';
    }
  }
  const std::vector<std::uint8_t> bytes = PackCodes(codes.codes);
  std::ofstream bin = OpenOut(bin_path);
  bin.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<int> LoadLabels(const fs::path& path, int n) {
  std::vector<int> labels(n, -1);
  ForEachLine(path, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    if (toks.size() != 2) ParseFail(path, line, 1, "expected 'node<TAB>label'");
    const int node = NodeId(path, line, toks[0], n);
    const long label = ParseInt(path, line, toks[1]);
    if (label < 0) ParseFail(path, line, toks[1].column, "negative label");
    labels[node] = static_cast<int>(label);
  });
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0)
      throw Error("parse_error", path.string() + ": node " + std::to_string(i) +
                                     " has no label");
  }
  return labels;
}

void SaveCheckpoint(const EmbeddingState& state, const Hyperparams& hyper,
                    const fs::path& path) {
  json views = json::array();
  for (size_t s = 0; s < state.basis.size(); ++s) {
    json enc = json::array(), dec = json::array();
    for (const DenseLayer& l : state.autoencoders[s].encoder) enc.push_back(LayerToJson(l));
    for (const DenseLayer& l : state.autoencoders[s].decoder) dec.push_back(LayerToJson(l));
    views.push_back(json{{"basis", MatrixToJson(state.basis[s])},
                         {"hidden", MatrixToJson(state.hidden[s])},
                         {"encoder", enc},
                         {"decoder", dec},
                         {"learning_rate", state.h_learning_rates.at(s)}});
  }
  json doc{{"format", 1},
           {"hyperparams", HyperToJson(hyper)},
           {"y", MatrixToJson(state.y)},
           {"views", views},
           {"objective_trace", state.objective_trace},
           {"y_learning_rate", state.y_learning_rate},
           {"iterations", state.iterations},
           {"stall_count", state.stall_count}};
  std::ofstream out = OpenOut(path);
  out << doc.dump() << '\n';
}

Checkpoint LoadCheckpoint(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  json doc;
  try {
    in >> doc;
    if (doc.at("format") != 1)
      throw Error("parse_error", path.string() + ": unsupported checkpoint format");
    Checkpoint cp;
    cp.hyper = HyperFromJson(doc.at("hyperparams"));
    cp.state.y = MatrixFromJson(doc.at("y"));
    for (const json& v : doc.at("views")) {
      cp.state.basis.push_back(MatrixFromJson(v.at("basis")));
      cp.state.hidden.push_back(MatrixFromJson(v.at("hidden")));
      AutoencoderParams ae;
      for (const json& l : v.at("encoder")) ae.encoder.push_back(LayerFromJson(l));
      for (const json& l : v.at("decoder")) ae.decoder.push_back(LayerFromJson(l));
      ae.CheckShapes();
      cp.state.autoencoders.push_back(std::move(ae));
      cp.state.h_learning_rates.push_back(v.at("learning_rate"));
    }
    cp.state.objective_trace = doc.at("objective_trace").get<std::vector<double>>();
    cp.state.y_learning_rate = doc.at("y_learning_rate");
    cp.state.iterations = doc.at("iterations");
    cp.state.stall_count = doc.at("stall_count");
    return cp;
  } catch (const json::exception& e) {
    throw Error("parse_error", path.string() + ": " + e.what());
  }
}

void WriteSweepTable(const std::vector<SweepRow>& rows, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  WriteSweepTable(rows, out);
}

void WriteSweepTable(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "ratio\tmethod\tmicro_f1_mean\tmicro_f1_std\tmacro_f1_mean\tmacro_f1_std\n";
  for (const SweepRow& r : rows) {
    out << FormatDouble(r.ratio) << '\t' << MethodName(r.method) << '\t'
        << FormatDouble(r.metrics.micro_f1.mean) << '\t'
        << FormatDouble(r.metrics.micro_f1.std) << '\t'
        << FormatDouble(r.metrics.macro_f1.mean) << '\t'
        << FormatDouble(r.metrics.macro_f1.std) << '\n';
  }
}

void WriteSweepLong(const std::vector<SweepRow>& rows, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  out << "ratio\tmethod\tmetric\tmean\tstd\n";
  for (const SweepRow& r : rows) {
    const std::pair<const char*, MeanStd> metrics[] = {
        {"micro_f1", r.metrics.micro_f1}, {"macro_f1", r.metrics.macro_f1}};
    for (const auto& [name, value] : metrics) {
      out << FormatDouble(r.ratio) << '\t' << MethodName(r.method) << '\t'
          << name << '\t' << FormatDouble(value.mean) << '\t'
          << FormatDouble(value.std) << '\n';
    }
  }
}

MultiplexNetwork LoadCora(const fs::path& dir, int min_shared_attributes) {
  if (min_shared_attributes < 1)
    throw Error("invalid_config", "min_shared_attributes must be >= 1");
  const fs::path content = dir / "cora.content";
  const fs::path cites = dir / "cora.cites";
  // cora.content: paper_id, binary word attributes, class label.
  std::unordered_map<std::string, int> index;
  std::map<std::string, int> classes;
  std::vector<std::vector<double>> attrs;
  std::vector<std::string> class_of;
  ForEachLine(content, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    if (toks.size() < 3) ParseFail(content, line, 1, "too few columns");
    if (!attrs.empty() && toks.size() - 2 != attrs.front().size())
      ParseFail(content, line, 1, "ragged attribute row");
    index.emplace(std::string(toks.front().text), static_cast<int>(attrs.size()));
    std::vector<double> row;
    for (size_t c = 1; c + 1 < toks.size(); ++c) row.push_back(ParseReal(content, line, toks[c]));
    attrs.push_back(std::move(row));
    class_of.emplace_back(toks.back().text);
    classes.emplace(class_of.back(), 0);
  });
  int next = 0;
  for (auto& [name, id] : classes) id = next++;
  const int n = static_cast<int>(attrs.size());
  if (n == 0) throw Error("parse_error", content.string() + ": no papers");

  std::vector<std::pair<int, int>> citations;
  ForEachLine(cites, [&](int line, std::string_view text) {
    if (Blank(text)) return;
    std::vector<Token> toks = SplitTabs(text);
    if (toks.size() != 2) ParseFail(cites, line, 1, "expected two paper ids");
    auto a = index.find(std::string(toks[0].text));
    auto b = index.find(std::string(toks[1].text));
    // The public dump cites a handful of papers absent from cora.content.
    if (a == index.end() || b == index.end()) return;
    citations.emplace_back(a->second, b->second);
  });

  MultiplexNetwork net;
  net.n = n;
  ViewData citation;
  citation.adjacency = AdjacencyFromEdges(n, citations);
  citation.features = Matrix(citation.adjacency);
  citation.mask.assign(n, true);

  ViewData attribute;
  const int d = static_cast<int>(attrs.front().size());
  attribute.features.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) attribute.features(i, c) = attrs[i][c];
  const Matrix shared = attribute.features * attribute.features.transpose();
  std::vector<std::pair<int, int>> links;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (shared(i, j) >= min_shared_attributes) links.emplace_back(i, j);
  attribute.adjacency = AdjacencyFromEdges(n, links);
  attribute.mask.assign(n, true);

  // Papers with neither a citation nor any attribute carry no data in the
  // respective view.
  for (int i = 0; i < n; ++i) {
    if (citation.features.row(i).sum() == 0.0) citation.mask[i] = false;
    if (attribute.features.row(i).sum() == 0.0) attribute.mask[i] = false;
  }
  for (int i = 0; i < n; ++i)
    if (!citation.mask[i] && !attribute.mask[i]) attribute.mask[i] = true;

  net.views.push_back(std::move(citation));
  net.views.push_back(std::move(attribute));
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = classes.at(class_of[i]);
  net.labels = std::move(labels);
  ValidateOrThrow(net);
  return net;
}

}  // namespace dpmne
