#include "limase/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "limase/dataset.hpp"
#include "limase/error.hpp"
#include "limase/external.hpp"
#include "limase/forest.hpp"
#include "limase/kernel_shap.hpp"
#include "limase/limase.hpp"
#include "limase/mlp.hpp"
#include "limase/parallel.hpp"
#include "limase/shapley.hpp"
#include "limase/sp.hpp"
#include "limase/synth.hpp"
#include "limase/viz.hpp"

namespace limase::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["data"] = c.data;
  j["target"] = c.target;
  j["task"] = c.task;
  j["model"] = c.model;
  j["explainer"] = c.explainer;
  j["sigma"] = c.sigma > 0.0 ? Json(c.sigma) : Json("auto");
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["class"] = c.class_index >= 0 ? Json(c.class_index) : Json("predicted");
  j["max_depth"] = c.max_depth;
  j["min_samples_leaf"] = c.min_samples_leaf;
  j["instance"] = c.instance;
  j["count"] = c.count;
  j["trees"] = c.trees;
  j["model_depth"] = c.model_depth;
  j["hidden"] = c.hidden;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["kernel_samples"] = c.kernel_samples;
  j["background"] = c.background;
  j["sign_mode"] = c.sign_mode;
  j["threads"] = c.threads;
  return j;
}

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Thrown for bad flag combinations; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      const auto v = std::stoul(part);
      if (v == 0) throw UsageError("hidden layer widths must be positive");
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse hidden widths '" + text + "'");
    }
  }
  return out;
}

enum class ModelKind { kTree, kForest, kMlp, kExternal, kFile };

ModelKind model_kind(const std::string& spec) {
  if (spec == "tree") return ModelKind::kTree;
  if (spec == "forest") return ModelKind::kForest;
  if (spec == "mlp") return ModelKind::kMlp;
  if (spec.rfind("external:", 0) == 0) return ModelKind::kExternal;
  if (spec.rfind("file:", 0) == 0) return ModelKind::kFile;
  throw UsageError("unknown model spec '" + spec +
                   "' (expected tree, forest, mlp, external:<cmd> or file:<path>)");
}

Dataset load_dataset(const RunConfig& c) {
  if (c.data.empty()) throw UsageError("--data is required");
  if (c.target.empty()) throw UsageError("--target is required");
  return load_csv(c.data, c.target, parse_task_kind(c.task));
}

std::unique_ptr<BlackBoxModel> train_model(const RunConfig& c, const Dataset& data,
                                           ModelKind kind) {
  RandomStream rng(c.seed);
  switch (kind) {
    case ModelKind::kTree: {
      if (data.task().is_classification()) {
        throw UsageError("the tree model is a regressor; use forest or mlp for classification");
      }
      const std::vector<double> w(data.num_rows(), 1.0);
      return std::make_unique<DecisionTree>(
          fit_tree(data.rows(), data.target(), w, TreeParams{c.model_depth, 1, 0.0}));
    }
    case ModelKind::kForest: {
      ForestParams p;
      p.n_trees = c.trees;
      p.tree = TreeParams{c.model_depth, 1, 0.0};
      p.threads = c.threads;
      return std::make_unique<ForestModel>(fit_random_forest(data, p, rng));
    }
    case ModelKind::kMlp: {
      MlpParams p;
      p.hidden = parse_widths(c.hidden);
      p.epochs = c.epochs;
      p.learning_rate = c.learning_rate;
      return std::make_unique<MlpModel>(fit_mlp(data, p, rng));
    }
    default:
      throw UsageError("model spec '" + c.model + "' cannot be trained");
  }
}

std::unique_ptr<BlackBoxModel> resolve_model(const RunConfig& c, const Dataset& data) {
  const auto kind = model_kind(c.model);
  std::unique_ptr<BlackBoxModel> model;
  if (kind == ModelKind::kExternal) {
    model = attach_external(c.model.substr(9), data.num_features(), data.task());
  } else if (kind == ModelKind::kFile) {
    model = model_from_json(read_json(c.model.substr(5)));
  } else {
    model = train_model(c, data, kind);
  }
  if (model->num_features() != data.num_features()) {
    throw UsageError("model expects " + std::to_string(model->num_features()) +
                     " features, dataset has " + std::to_string(data.num_features()));
  }
  if (!(model->task() == data.task())) {
    throw UsageError("model task does not match the dataset task");
  }
  return model;
}

LimaseConfig limase_config(const RunConfig& c) {
  LimaseConfig lc;
  lc.n_samples = c.n_samples;
  if (c.sigma > 0.0) {
    lc.sigma = c.sigma;
    lc.sigma_mode = SigmaMode::kAbsolute;
  } else if (c.sigma < 0.0) {
    throw UsageError("--sigma must be positive (or 0 for the automatic width)");
  }
  lc.tree_params = TreeParams{c.max_depth, c.min_samples_leaf, 0.0};
  lc.seed = c.seed;
  if (c.class_index >= 0) lc.class_index = c.class_index;
  lc.validate();
  return lc;
}

// `count` distinct row indices chosen by the seed, in ascending order.
std::vector<std::size_t> pick_rows(std::size_t n, std::size_t count, std::uint64_t seed,
                                   std::uint64_t stream) {
  if (count > n) {
    throw UsageError("requested " + std::to_string(count) + " instances but the dataset has " +
                     std::to_string(n) + " rows");
  }
  RandomStream rng(derive_seed(seed, stream));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix background_rows(const Dataset& data, const RunConfig& c) {
  const auto idx = pick_rows(data.num_rows(), std::min(c.background, data.num_rows()), c.seed, 2);
  Matrix bg(0, data.num_features());
  for (auto i : idx) bg.append_row(data.row(i));
  return bg;
}

KernelShapOptions kernel_options(const RunConfig& c) {
  KernelShapOptions o;
  if (c.kernel_samples != "exact") {
    try {
      o.budget = std::stoul(c.kernel_samples);
    } catch (const std::logic_error&) {
      throw UsageError("--kernel-samples must be a count or 'exact'");
    }
  }
  if (c.class_index >= 0) o.class_index = c.class_index;
  return o;
}

struct Context {
  RunConfig config;
  Dataset data;
  std::unique_ptr<BlackBoxModel> model;
  LimaseConfig limase;
  Matrix background;
  KernelShapOptions kernel;
};

Context make_context(const RunConfig& c) {
  auto data = load_dataset(c);
  auto lc = limase_config(c);
  auto model = resolve_model(c, data);
  Matrix bg;
  if (c.explainer == "kernelshap" || c.command == "bench") bg = background_rows(data, c);
  return Context{c, std::move(data), std::move(model), lc, std::move(bg), kernel_options(c)};
}

struct Explained {
  ShapExplanation explanation;
  std::optional<LimaseResult> limase;
};

// `ordinal` selects the per-instance seed: derive_seed(seed, ordinal).
Explained explain_row(const Context& ctx, std::size_t row, std::size_t ordinal) {
  const auto x = ctx.data.row(row);
  const auto& c = ctx.config;
  std::optional<int> cls;
  if (c.class_index >= 0) cls = c.class_index;
  if (c.explainer == "limase") {
    LimaseConfig local = ctx.limase;
    local.seed = derive_seed(c.seed, ordinal);
    auto r = limase_explain(*ctx.model, x, ctx.data.features(), local);
    auto e = r.explanation;
    return {std::move(e), std::move(r)};
  }
  if (c.explainer == "treeshap") {
    if (const auto* tree = dynamic_cast<const DecisionTree*>(ctx.model.get())) {
      if (cls) throw UsageError("--class does not apply to a regression tree");
      return {tree_shap(*tree, x), std::nullopt};
    }
    if (const auto* forest = dynamic_cast<const ForestModel*>(ctx.model.get())) {
      return {forest_shap(*forest, x, cls), std::nullopt};
    }
    throw UsageError("--explainer treeshap needs a tree or forest model");
  }
  if (c.explainer == "kernelshap") {
    RandomStream rng(derive_seed(c.seed, ordinal));
    return {kernel_shap(*ctx.model, x, ctx.background, ctx.kernel, rng), std::nullopt};
  }
  throw UsageError("unknown explainer '" + c.explainer +
                   "' (expected limase, treeshap or kernelshap)");
}

Json explained_json(const Explained& ex, const Dataset& data, bool timing) {
  return ex.limase ? to_json(*ex.limase, data.feature_names(), timing)
                   : to_json(ex.explanation, data.feature_names(), timing);
}

fs::path prepare_out(const RunConfig& c) {
  fs::path out(c.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

SignMode sign_mode(const RunConfig& c) {
  if (c.sign_mode == "absolute") return SignMode::kAbsolute;
  if (c.sign_mode == "literal") return SignMode::kLiteral;
  throw UsageError("--sign-mode must be absolute or literal");
}

int cmd_inspect(const RunConfig& c, std::ostream& out) {
  const auto data = load_dataset(c);
  auto j = dataset_summary(data);
  out << j.dump(2) << '\n';
  if (c.out != ".") write_json(j, prepare_out(c) / "inspect.json");
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const auto data = load_dataset(c);
  const auto kind = model_kind(c.model);
  if (kind == ModelKind::kExternal || kind == ModelKind::kFile) {
    throw UsageError("train needs --model tree, forest or mlp");
  }
  const auto start = Clock::now();
  auto model = train_model(c, data, kind);
  const double seconds = seconds_since(start);

  const auto pred = model->predict(data.rows());
  Json summary;
  if (data.task().is_classification()) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < pred.cols(); ++k) {
        if (pred(i, k) > pred(i, best)) best = k;
      }
      hits += static_cast<double>(best) == data.target()[i];
    }
    summary["accuracy"] = static_cast<double>(hits) / static_cast<double>(data.num_rows());
  } else {
    std::vector<double> fitted(data.num_rows());
    for (std::size_t i = 0; i < fitted.size(); ++i) fitted[i] = pred(i, 0);
    const std::vector<double> ones(fitted.size(), 1.0);
    summary["r2"] = weighted_r2(fitted, data.target(), ones);
  }
  summary["rows"] = data.num_rows();
  summary["train_seconds"] = seconds;

  Json j;
  if (const auto* t = dynamic_cast<const DecisionTree*>(model.get())) j = limase::to_json(*t);
  if (const auto* f = dynamic_cast<const ForestModel*>(model.get())) j = limase::to_json(*f);
  if (const auto* m = dynamic_cast<const MlpModel*>(model.get())) j = limase::to_json(*m);
  j["training_summary"] = summary;
  j["config"] = to_json(c);
  write_json(j, prepare_out(c) / "model.json");
  out << summary.dump() << '\n';
  return 0;
}

int cmd_explain(const RunConfig& c, std::ostream& out) {
  const auto ctx = make_context(c);
  if (c.instance >= ctx.data.num_rows()) {
    throw UsageError("--instance " + std::to_string(c.instance) + " out of range (" +
                     std::to_string(ctx.data.num_rows()) + " rows)");
  }
  const auto ex = explain_row(ctx, c.instance, c.instance);
  const auto dir = prepare_out(c);
  auto j = explained_json(ex, ctx.data, c.timing);
  j["instance_index"] = c.instance;
  j["config"] = to_json(c);
  write_json(j, dir / "explanation.json");
  render_svg(build_force_plot(ex.explanation, ctx.data.features()), dir / "force.svg");
  out << "explained instance " << c.instance << " with " << c.explainer << " in "
      << ex.explanation.elapsed_ms << " ms -> " << (dir / "explanation.json").string() << '\n';
  return 0;
}

// Explanations of `rows` as a matrix, in row order.
ExplanationMatrix explain_rows(const Context& ctx, const std::vector<std::size_t>& rows) {
  std::vector<std::optional<ShapExplanation>> results(rows.size());
  std::vector<std::string> errors(rows.size());
  parallel_for(rows.size(), ctx.config.threads, [&](std::size_t k) {
    try {
      results[k] = explain_row(ctx, rows[k], rows[k]).explanation;
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& err) {
      errors[k] = err.what();
    }
  });
  ExplanationMatrix m;
  m.instance_ids = rows;
  std::string failures;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (results[k]) {
      m.values.append_row(results[k]->phi);
    } else {
      failures += "\n  instance " + std::to_string(rows[k]) + ": " + errors[k];
    }
  }
  if (!failures.empty()) throw ModelError("explanations failed:" + failures);
  return m;
}

Matrix gather_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
  Matrix x(0, data.num_features());
  for (auto i : rows) x.append_row(data.row(i));
  return x;
}

int cmd_global(const RunConfig& c, std::ostream& out) {
  const auto ctx = make_context(c);
  const auto rows = pick_rows(ctx.data.num_rows(), c.count, c.seed, 1);
  const auto start = Clock::now();
  const auto m = explain_rows(ctx, rows);
  const double seconds = seconds_since(start);
  const auto dir = prepare_out(c);

  auto j = to_json(m, ctx.data.feature_names());
  j["explainer"] = c.explainer;
  j["config"] = to_json(c);
  write_json(j, dir / "matrix.json");
  render_svg(build_summary_plot(m, gather_rows(ctx.data, rows), ctx.data.features()),
             dir / "summary.svg");
  Json timing{{"explainer", c.explainer}, {"instances", rows.size()}, {"seconds", seconds}};
  if (c.timing) write_json(timing, dir / "timing.json");
  out << timing.dump() << '\n';
  return 0;
}

int cmd_sp(const RunConfig& c, std::ostream& out) {
  if (c.budget < 1) throw UsageError("--budget must be >= 1");
  if (c.explainer != "limase") throw UsageError("sp runs on limase explanations");
  const auto ctx = make_context(c);
  const auto rows = pick_rows(ctx.data.num_rows(), std::min(c.count, ctx.data.num_rows()), c.seed, 1);
  const auto start = Clock::now();
  auto res = sp_explain(*ctx.model, ctx.data, rows, ctx.limase, c.budget, c.threads, sign_mode(c));
  const double seconds = seconds_since(start);
  const auto dir = prepare_out(c);

  auto j = to_json(res.pick);
  std::vector<std::size_t> picked_ids;
  for (auto k : res.pick.selected) picked_ids.push_back(res.matrix.instance_ids[k]);
  j["selected_instances"] = picked_ids;
  j["sample_instances"] = rows;
  j["config"] = to_json(c);
  write_json(j, dir / "sp.json");

  ExplanationMatrix picked;
  picked.instance_ids = picked_ids;
  for (auto k : res.pick.selected) picked.values.append_row(res.matrix.values.row(k));
  render_svg(build_summary_plot(picked, gather_rows(ctx.data, picked_ids), ctx.data.features()),
             dir / "summary.svg");
  Json timing{{"explainer", "limase"}, {"instances", rows.size()}, {"seconds", seconds}};
  if (c.timing) write_json(timing, dir / "timing.json");
  out << "picked " << picked_ids.size() << " of " << rows.size() << " instances in " << seconds
      << " s\n";
  return 0;
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
  const auto kind = model_kind(c.model);
  if (kind == ModelKind::kTree || kind == ModelKind::kForest) {
    throw UsageError("bench compares explainers on a non-tree black box; use mlp or external:");
  }
  RunConfig bc = c;
  bc.explainer = "limase";
  auto ctx = make_context(bc);
  if (ctx.data.num_rows() < 100) throw UsageError("bench needs a dataset with at least 100 rows");
  if (dynamic_cast<const ForestModel*>(ctx.model.get()) ||
      dynamic_cast<const DecisionTree*>(ctx.model.get())) {
    throw UsageError("bench compares explainers on a non-tree black box; use mlp or external:");
  }
  const auto rows = pick_rows(ctx.data.num_rows(), std::min(c.count, ctx.data.num_rows()), c.seed, 1);
  const auto batch = gather_rows(ctx.data, rows);

  auto time_limase = [&](const Matrix& x) {
    const auto start = Clock::now();
    const auto outcomes = limase_explain_batch(*ctx.model, x, ctx.data.features(), ctx.limase, c.threads);
    for (const auto& o : outcomes) {
      if (!o.ok()) throw ModelError("limase failed during bench: " + o.error);
    }
    return seconds_since(start);
  };
  auto time_kernel = [&](const Matrix& x) {
    const auto start = Clock::now();
    parallel_for(x.rows(), c.threads, [&](std::size_t i) {
      RandomStream rng(derive_seed(c.seed, i));
      kernel_shap(*ctx.model, x.row(i), ctx.background, ctx.kernel, rng);
    });
    return seconds_since(start);
  };

  Matrix single(0, ctx.data.num_features());
  single.append_row(batch.row(0));
  const double lim1 = time_limase(single);
  const double ker1 = time_kernel(single);
  const double limn = time_limase(batch);
  const double kern = time_kernel(batch);

  Json j;
  j["single"] = {{"instances", 1}, {"limase_seconds", lim1}, {"kernelshap_seconds", ker1},
                 {"speedup", ker1 / lim1}};
  j["batch"] = {{"instances", rows.size()}, {"limase_seconds", limn}, {"kernelshap_seconds", kern},
                {"speedup", kern / limn}};
  j["kernel_samples"] = c.kernel_samples;
  j["background_rows"] = ctx.background.rows();
  j["n_samples"] = c.n_samples;
  j["config"] = to_json(c);
  write_json(j, prepare_out(c) / "bench.json");
  out << j["single"].dump() << '\n' << j["batch"].dump() << '\n';
  return 0;
}

int cmd_synth(const RunConfig& c, std::ostream& out) {
  SynthSpec spec;
  spec.rows = c.rows;
  spec.features = c.features;
  spec.informative = std::min(c.informative, c.features);
  spec.noise = c.noise;
  spec.n_classes = c.classes;
  spec.seed = c.seed;
  const auto data = make_synthetic(spec);
  const fs::path path(c.csv);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_csv(data, path);
  out << "wrote " << data.num_rows() << " rows x " << data.num_features() << " features to "
      << path.string() << " (target column '" << data.target_name() << "')\n";
  return 0;
}

void add_shared_options(CLI::App& app, RunConfig& c) {
  app.add_option("--data", c.data, "CSV file with a header row");
  app.add_option("--target", c.target, "Name of the target column");
  app.add_option("--task", c.task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  app.add_option("--model", c.model, "tree | forest | mlp | external:<cmd> | file:<model.json>");
  app.add_option("--explainer", c.explainer, "limase | treeshap | kernelshap")
      ->check(CLI::IsMember({"limase", "treeshap", "kernelshap"}));
  app.add_option("--sigma", c.sigma, "Kernel width in standardized units (0 = automatic, 5)");
  app.add_option("--n-samples", c.n_samples, "Perturbations per explanation");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--budget", c.budget, "Submodular pick budget G");
  app.add_option("--class", c.class_index, "Class to explain (default: predicted class)");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  app.add_option("--max-depth", c.max_depth, "Surrogate tree depth");
  app.add_option("--min-samples-leaf", c.min_samples_leaf, "Surrogate minimum leaf size");
  app.add_option("--instance", c.instance, "Row index to explain");
  app.add_option("--count", c.count, "Number of instances for global, sp and bench");
  app.add_option("--trees", c.trees, "Random forest size");
  app.add_option("--model-depth", c.model_depth, "Depth of the tree/forest black box");
  app.add_option("--hidden", c.hidden, "MLP hidden widths, comma separated");
  app.add_option("--epochs", c.epochs, "MLP training epochs");
  app.add_option("--lr", c.learning_rate, "MLP learning rate");
  app.add_option("--kernel-samples", c.kernel_samples, "Kernel baseline coalitions or 'exact'");
  app.add_option("--background", c.background, "Kernel baseline background rows");
  app.add_flag("--timing", c.timing, "Record wall-clock times in the outputs");
  app.add_option("--sign-mode", c.sign_mode, "absolute | literal attribution signs in sp")
      ->check(CLI::IsMember({"absolute", "literal"}));
  app.add_option("--rows", c.rows, "synth: rows");
  app.add_option("--features", c.features, "synth: features");
  app.add_option("--informative", c.informative, "synth: informative features");
  app.add_option("--noise", c.noise, "synth: target noise");
  app.add_option("--classes", c.classes, "synth: classes (0 = regression)");
  app.add_option("--csv", c.csv, "synth: output CSV path");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Local surrogate Shapley explanations for black-box models", "limase"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  add_shared_options(app, config);
  app.fallthrough();
  app.require_subcommand(1);
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"inspect", "Print dataset statistics as JSON"},
      {"train", "Train a black-box model and write model.json"},
      {"explain", "Explain one instance (explanation.json, force.svg)"},
      {"global", "Explain --count random instances (matrix.json, summary.svg)"},
      {"sp", "Submodular pick over explained instances (sp.json, summary.svg)"},
      {"bench", "Time limase against the kernel baseline (bench.json)"},
      {"synth", "Write a synthetic dataset to --csv"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    const auto& cmd = config.command;
    if (cmd == "inspect") return cmd_inspect(config, out);
    if (cmd == "train") return cmd_train(config, out);
    if (cmd == "explain") return cmd_explain(config, out);
    if (cmd == "global") return cmd_global(config, out);
    if (cmd == "sp") return cmd_sp(config, out);
    if (cmd == "bench") return cmd_bench(config, out);
    if (cmd == "synth") return cmd_synth(config, out);
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace limase::cli
