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

// Command-line front end: synth, train, binarize, eval, sweep-pdr, tune.
//
// Failures print one line "error: <code>: <message>" to stderr and exit
// nonzero (2 for bad arguments, 1 otherwise).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpmne/eval.h"
#include "dpmne/graph_model.h"
#include "dpmne/io.h"
#include "dpmne/quantizer.h"
#include "dpmne/trainer.h"

namespace fs = std::filesystem;

namespace dpmne {
namespace {

// Hyperparameter flags shared by train, sweep-pdr and tune.
struct HyperFlags {
  Hyperparams hyper;
  std::vector<int> layers = {200};
  std::string hidden = "tanh";
  std::string output = "sigmoid";
  int order = 5;
  bool scale_features = false;

  void Add(CLI::App* app) {
    app->add_option("--alpha", hyper.alpha, "subspace weight")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--beta", hyper.beta, "Laplacian weight")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--lambda", hyper.lambda, "regularization weight")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--dim", hyper.dim, "embedding dimension")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--max-iters", hyper.max_iters, "outer iterations")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--layers", layers, "encoder widths, comma separated")
        ->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--hidden-activation", hidden)
        ->check(CLI::IsMember({"identity", "sigmoid", "tanh"}))
        ->capture_default_str();
    app->add_option("--output-activation", output)
        ->check(CLI::IsMember({"identity", "sigmoid", "tanh"}))
        ->capture_default_str();
    app->add_option("--y-steps", hyper.y_steps)->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--h-steps", hyper.h_steps)->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--order", order, "proximity order")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_flag("--normalize", hyper.proximity.normalize,
                  "symmetric degree normalization of the adjacency");
    app->add_option("--early-stop-tol", hyper.early_stop_tol)
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--seed", hyper.seed)->capture_default_str();
    app->add_flag("--scale-features", scale_features,
                  "min-max scale every feature column to [0, 1] after loading");
  }

  MultiplexNetwork Load(const std::string& manifest) const {
    MultiplexNetwork net = LoadNetwork(manifest);
    return scale_features ? MinMaxScaleFeatures(net) : net;
  }

  Hyperparams Resolve() {
    hyper.encoder_widths = layers;
    hyper.hidden_activation = ParseActivation(hidden);
    hyper.output_activation = ParseActivation(output);
    hyper.proximity.weights = ProximityConfig::DefaultWeights(order);
    hyper.Check();
    return hyper;
  }
};

struct ProtocolFlags {
  EvalProtocol protocol;

  void Add(CLI::App* app) {
    app->add_option("--train-frac", protocol.train_fraction)
        ->capture_default_str();
    app->add_option("--repeats", protocol.repeats)->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--eval-seed", protocol.seed)->capture_default_str();
    app->add_option("--l2", protocol.l2)->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }

  const EvalProtocol& Resolve() {
    protocol.Check();
    return protocol;
  }
};

MultiplexNetwork RequireLabels(MultiplexNetwork net) {
  if (!net.labels) throw Error("missing_labels", "manifest has no labels entry");
  return net;
}

void PrintReport(const MetricsReport& r, bool classify) {
  auto line = [](const char* name, const MeanStd& m) {
    std::cout << name << '\t' << FormatDouble(m.mean) << '\t'
              << FormatDouble(m.std) << '\n';
  };
  if (classify) {
    line("micro_f1", r.micro_f1);
    line("macro_f1", r.macro_f1);
  } else {
    line("clustering_accuracy", r.clustering_accuracy);
  }
}

std::vector<double> ParseList(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("invalid_argument", what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw Error("invalid_argument", what + ": empty list");
  return out;
}

// {"alpha=0.1,1", "beta=0,0.1"}; omitted axes keep the base value.
HyperGrid ParseGrid(const std::vector<std::string>& axes, const Hyperparams& base) {
  HyperGrid grid{{base.alpha}, {base.beta}, {base.lambda}};
  for (const std::string& part : axes) {
    const size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw Error("invalid_argument", "grid: expected name=values in '" + part + "'");
    const std::string name = part.substr(0, eq);
    std::vector<double> values = ParseList(part.substr(eq + 1), "grid " + name);
    for (double v : values)
      if (v < 0) throw Error("invalid_argument", "grid " + name + ": negative value");
    if (name == "alpha") grid.alphas = values;
    else if (name == "beta") grid.betas = values;
    else if (name == "lambda") grid.lambdas = values;
    else throw Error("invalid_argument", "grid: unknown axis '" + name + "'");
  }
  return grid;
}

int Run(int argc, char** argv) {
  CLI::App app{"Multiplex network embedding with partial data"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // synth
  SynthConfig synth;
  int synth_views = 2, synth_dim = 32;
  double synth_intra = 0.05, synth_inter = 0.005, synth_pdr = 0.0;
  std::string synth_out;
  CLI::App* cmd_synth = app.add_subcommand("synth", "generate a planted-partition multiplex network");
  cmd_synth->add_option("--out", synth_out, "output directory")->required();
  cmd_synth->add_option("--n", synth.n)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_synth->add_option("--communities", synth.communities)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_synth->add_option("--views", synth_views)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_synth->add_option("--dim", synth_dim, "feature dimension per view")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd_synth->add_option("--intra", synth_intra)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd_synth->add_option("--inter", synth_inter)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd_synth->add_option("--pdr", synth_pdr, "partial data ratio per view")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd_synth->add_option("--noise", synth.noise)->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd_synth->add_option("--feature-flip", synth.feature_flip)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd_synth->add_flag("--binary", synth.binary_features, "0/1 features");
  cmd_synth->add_option("--seed", synth.seed)->capture_default_str();

  // train
  HyperFlags train_flags;
  std::string train_manifest, train_out, train_resume;
  CLI::App* cmd_train = app.add_subcommand("train", "learn node embeddings");
  cmd_train->add_option("--manifest", train_manifest)->required();
  cmd_train->add_option("--out", train_out, "output directory")->required();
  cmd_train->add_option("--resume", train_resume,
                        "continue from a checkpoint for --max-iters more iterations");
  train_flags.Add(cmd_train);

  // binarize
  std::string bin_embeddings, bin_out, bin_start = "identity";
  bool bin_itq = false;
  ItqConfig itq;
  CLI::App* cmd_bin = app.add_subcommand("binarize", "turn embeddings into binary codes");
  cmd_bin->add_option("--embeddings", bin_embeddings)->required()->check(CLI::ExistingFile);
  cmd_bin->add_option("--out", bin_out, "output prefix (.tsv and .bin)")->required();
  cmd_bin->add_flag("--itq", bin_itq, "rotate before binarizing");
  cmd_bin->add_option("--iters", itq.iterations)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_bin->add_option("--start", bin_start, "itq start rotation")
      ->check(CLI::IsMember({"identity", "principal"}))->capture_default_str();

  // eval
  std::string eval_embeddings, eval_labels, eval_manifest, eval_task = "classify";
  ProtocolFlags eval_flags;
  CLI::App* cmd_eval = app.add_subcommand("eval", "score embeddings against labels");
  cmd_eval->add_option("--embeddings", eval_embeddings)->required()->check(CLI::ExistingFile);
  CLI::Option* labels_opt = cmd_eval->add_option("--labels", eval_labels)->check(CLI::ExistingFile);
  CLI::Option* manifest_opt =
      cmd_eval->add_option("--manifest", eval_manifest, "take labels from a manifest")
          ->check(CLI::ExistingFile);
  labels_opt->excludes(manifest_opt);
  cmd_eval->add_option("--task", eval_task)->check(CLI::IsMember({"classify", "cluster"}))
      ->capture_default_str();
  eval_flags.Add(cmd_eval);

  // sweep-pdr
  HyperFlags sweep_flags;
  ProtocolFlags sweep_protocol;
  SweepOptions sweep_options;
  std::string sweep_manifest, sweep_ratios = "0,0.1,0.2,0.3,0.4",
                              sweep_methods = "dpmne,zero-fill,knn-fill", sweep_out,
                              sweep_long;
  CLI::App* cmd_sweep = app.add_subcommand("sweep-pdr", "compare methods across partial data ratios");
  cmd_sweep->add_option("--manifest", sweep_manifest)->required()->check(CLI::ExistingFile);
  cmd_sweep->add_option("--ratios", sweep_ratios)->capture_default_str();
  cmd_sweep->add_option("--methods", sweep_methods)->capture_default_str();
  cmd_sweep->add_option("--knn", sweep_options.knn)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_sweep->add_option("--pdr-seed", sweep_options.pdr_seed)->capture_default_str();
  cmd_sweep->add_option("--out", sweep_out, "table path (default: stdout)");
  cmd_sweep->add_option("--long", sweep_long, "also write the long-format table here");
  sweep_flags.Add(cmd_sweep);
  sweep_protocol.Add(cmd_sweep);

  // tune
  HyperFlags tune_flags;
  ProtocolFlags tune_protocol;
  std::string tune_manifest, tune_out;
  std::vector<std::string> tune_grid;
  int tune_folds = 5;
  CLI::App* cmd_tune = app.add_subcommand("tune", "cross-validate alpha, beta and lambda");
  cmd_tune->add_option("--manifest", tune_manifest)->required()->check(CLI::ExistingFile);
  cmd_tune->add_option("--grid", tune_grid, "axes, e.g. alpha=0.1,1 beta=0,0.1 lambda=0.01")
      ->required();
  cmd_tune->add_option("--folds", tune_folds)->check(CLI::Range(2, 1000))->capture_default_str();
  cmd_tune->add_option("--out", tune_out, "write every grid score here");
  tune_flags.Add(cmd_tune);
  tune_protocol.Add(cmd_tune);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: invalid_argument: " << msg << '\n';
    return 2;
  }

  if (cmd_synth->parsed()) {
    synth.views.assign(synth_views, SynthViewConfig{synth_intra, synth_inter, synth_dim, synth_pdr});
    const fs::path manifest = SaveNetwork(SynthGenerate(synth), synth_out);
    std::cout << manifest.string() << '\n';
  } else if (cmd_train->parsed()) {
    Hyperparams hyper = train_flags.Resolve();
    MultiplexNetwork net = train_flags.Load(train_manifest);
    EmbeddingState state;
    if (train_resume.empty()) {
      state = Train(net, hyper);
    } else {
      Checkpoint ckpt = LoadCheckpoint(train_resume);
      const int more = hyper.max_iters;
      hyper = ckpt.hyper;
      state = std::move(ckpt.state);
      ValidateOrThrow(net);
      Resume(state, net, BuildProximity(net, hyper.proximity), hyper, more);
    }
    fs::create_directories(train_out);
    SaveCheckpoint(state, hyper, fs::path(train_out) / "checkpoint.json");
    SaveEmbeddings(state.y, fs::path(train_out) / "embeddings.tsv");
    std::ofstream trace(fs::path(train_out) / "objective.tsv", std::ios::binary);
    trace << "iteration\tobjective\n";
    for (size_t i = 0; i < state.objective_trace.size(); ++i)
      trace << i << '\t' << FormatDouble(state.objective_trace[i]) << '\n';
    std::cout << "iterations\t" << state.iterations << "\nobjective\t"
              << FormatDouble(state.objective_trace.back()) << '\n';
  } else if (cmd_bin->parsed()) {
    itq.principal_start = bin_start == "principal";
    if (!bin_itq && (cmd_bin->count("--iters") || cmd_bin->count("--start")))
      throw Error("invalid_argument", "--iters and --start need --itq");
    const Matrix y = LoadEmbeddings(bin_embeddings);
    BinaryCodes codes = bin_itq ? Itq(y, itq) : BinarizeSign(y);
    SaveCodes(codes, bin_out + ".tsv", bin_out + ".bin");
    std::cout << "quant_loss\t" << FormatDouble(codes.quant_loss) << '\n';
  } else if (cmd_eval->parsed()) {
    if (eval_labels.empty() && eval_manifest.empty())
      throw Error("invalid_argument", "eval needs --labels or --manifest");
    const EvalProtocol& protocol = eval_flags.Resolve();
    const Matrix y = LoadEmbeddings(eval_embeddings);
    const std::vector<int> labels =
        eval_labels.empty() ? *RequireLabels(LoadNetwork(eval_manifest)).labels
                            : LoadLabels(eval_labels, static_cast<int>(y.rows()));
    if (static_cast<Eigen::Index>(labels.size()) != y.rows())
      throw Error("dimension_mismatch", "labels and embeddings disagree on n");
    MetricsReport report;
    if (eval_task == "classify") {
      report = ClassifyF1(y, labels, protocol);
    } else {
      const int k = *std::max_element(labels.begin(), labels.end()) + 1;
      std::vector<double> acc;
      for (int r = 0; r < protocol.repeats; ++r)
        acc.push_back(ClusterAccuracy(y, labels, k, protocol.seed + r));
      report.clustering_accuracy = Summarize(acc);
    }
    PrintReport(report, eval_task == "classify");
  } else if (cmd_sweep->parsed()) {
    const Hyperparams hyper = sweep_flags.Resolve();
    const EvalProtocol& protocol = sweep_protocol.Resolve();
    const std::vector<double> ratios = ParseList(sweep_ratios, "--ratios");
    std::vector<Method> methods;
    {
      std::stringstream ss(sweep_methods);
      std::string item;
      while (std::getline(ss, item, ',')) methods.push_back(ParseMethod(item));
    }
    MultiplexNetwork net = RequireLabels(sweep_flags.Load(sweep_manifest));
    std::vector<SweepRow> rows = PdrSweep(net, ratios, methods, hyper, protocol, sweep_options);
    if (!sweep_long.empty()) WriteSweepLong(rows, sweep_long);
    if (sweep_out.empty()) {
      WriteSweepTable(rows, std::cout);
    } else {
      WriteSweepTable(rows, sweep_out);
    }
  } else if (cmd_tune->parsed()) {
    const Hyperparams base = tune_flags.Resolve();
    const EvalProtocol& protocol = tune_protocol.Resolve();
    const HyperGrid grid = ParseGrid(tune_grid, base);
    MultiplexNetwork net = RequireLabels(tune_flags.Load(tune_manifest));
    CrossValidationResult cv = CrossValidate(net, grid, base, tune_folds, protocol);
    if (!tune_out.empty()) {
      std::ofstream out(tune_out, std::ios::binary);
      if (!out) throw Error("io_error", "cannot write " + tune_out);
      out << "alpha\tbeta\tlambda\tmicro_f1\n";
      for (const GridScore& s : cv.scores)
        out << FormatDouble(s.hyper.alpha) << '\t' << FormatDouble(s.hyper.beta) << '\t'
            << FormatDouble(s.hyper.lambda) << '\t' << FormatDouble(s.micro_f1) << '\n';
    }
    std::cout << "alpha\t" << FormatDouble(cv.best.alpha) << "\nbeta\t"
              << FormatDouble(cv.best.beta) << "\nlambda\t"
              << FormatDouble(cv.best.lambda) << '\n';
  }
  return 0;
}

}  // namespace
}  // namespace dpmne

int main(int argc, char** argv) {
  try {
    return dpmne::Run(argc, argv);
  } catch (const dpmne::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return e.code() == "invalid_argument" || e.code() == "invalid_config" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
  }
  return 1;
}
