#include "miss_cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "miss/binarizer.hpp"
#include "miss/common.hpp"
#include "miss/cross_validation.hpp"
#include "miss/csv.hpp"
#include "miss/metrics.hpp"
#include "miss/model.hpp"
#include "miss/solver.hpp"

namespace miss::cli {
namespace {

// Bad invocations detected after parsing; they exit with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataFlags {
  std::string data;
  std::string label;
  std::string discretizer = "quantile";
  int n_bins = 3;
  std::uint64_t seed = 0;
};

struct SolveFlags {
  int max_coef = 5;
  int max_bias = 20;
  int max_size = 5;
  int min_size = 0;
  double c0 = 1e-6;
  double timeout = 5400.0;
  double gap_tol = 0.0;
  long node_limit = -1;
  std::size_t rfa = 0;
  std::vector<std::string> force_include;
  std::vector<std::string> force_exclude;
  int threads = 1;
};

struct Flags {
  DataFlags data;
  SolveFlags solve;
  std::string model;
  std::string out;
  std::string format = "text";
  std::size_t folds = 5;
  bool proba = false;
};

std::shared_ptr<spdlog::logger> MakeLogger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, /*force_flush=*/true);
  auto logger = std::make_shared<spdlog::logger>("miss", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::info);
  if (const char* env = std::getenv("MISS_LOG")) {
    const std::string_view level(env);
    if (level == "debug") {
      logger->set_level(spdlog::level::debug);
    } else if (level != "info" && !level.empty()) {
      logger->warn("MISS_LOG={} is not one of info, debug; using info", level);
    }
  }
  return logger;
}

void AddDataFlags(CLI::App* cmd, DataFlags* f, bool label_required) {
  cmd->add_option("--data", f->data, "Input CSV")->required();
  auto* label = cmd->add_option("--label", f->label, "Label column");
  if (label_required) label->required();
  cmd->add_option("--discretizer", f->discretizer, "Numeric binning")
      ->check(CLI::IsMember({"uniform", "quantile", "kmeans"}))
      ->capture_default_str();
  cmd->add_option("--n-bins", f->n_bins, "Intervals per numeric feature")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  cmd->add_option("--seed", f->seed, "Seed for binning, oversampling and folds")->capture_default_str();
}

void AddSolveFlags(CLI::App* cmd, SolveFlags* f) {
  cmd->add_option("--max-coef", f->max_coef, "Coefficients lie in [-max-coef, max-coef]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-bias", f->max_bias, "Biases lie in [-max-bias, max-bias]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-size", f->max_size, "Most features with nonzero points")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--min-size", f->min_size, "Fewest features with nonzero points")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--c0", f->c0, "Penalty per used feature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--timeout", f->timeout, "Solver time limit in seconds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--gap-tol", f->gap_tol, "Stop once the optimality gap is at most this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--node-limit", f->node_limit, "Stop after this many nodes (negative: none)")
      ->capture_default_str();
  cmd->add_option("--rfa", f->rfa, "Pre-select this many binary features (0: off)")
      ->capture_default_str();
  cmd->add_option("--force-include", f->force_include, "Binary features that must be used");
  cmd->add_option("--force-exclude", f->force_exclude, "Binary features that must not be used");
  cmd->add_option("--threads", f->threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

RawTable LoadTraining(const DataFlags& f) {
  const std::vector<std::string> header = ReadCsvHeader(f.data);
  if (std::find(header.begin(), header.end(), f.label) == header.end()) {
    throw UsageError("label column '" + f.label + "' not found in " + f.data);
  }
  CsvOptions options;
  options.label_column = f.label;
  return LoadCsv(f.data, options);
}

// Column kinds follow the schema so that inference cannot disagree with it.
CsvOptions OptionsFor(const BinarizationSchema& schema, const std::string& label) {
  CsvOptions options;
  options.label_column = label;
  options.require_training_shape = false;
  for (const FeatureSpec& feature : schema.features) {
    options.kinds[feature.name] = feature.is_numeric() ? ColumnKind::kNumeric : ColumnKind::kCategorical;
  }
  return options;
}

MissModel LoadModel(const std::string& path) {
  MissModel model = Deserialize(ReadFile(path));
  if (!model.binarizer()) throw Error(path + ": model carries no binarizer");
  return model;
}

PipelineConfig MakePipeline(const Flags& f, spdlog::logger& log) {
  if (f.solve.min_size > f.solve.max_size) throw UsageError("--min-size exceeds --max-size");
  if (f.solve.threads > 1) log.debug("the solver is single-threaded; --threads {} has no effect", f.solve.threads);
  PipelineConfig cfg;
  cfg.strategy = ParseBinningStrategy(f.data.discretizer);
  cfg.n_bins = f.data.n_bins;
  cfg.seed = f.data.seed;
  cfg.rfa_features = f.solve.rfa;
  cfg.force_include = f.solve.force_include;
  cfg.force_exclude = f.solve.force_exclude;
  SolverConfig& s = cfg.solver;
  s.c0 = f.solve.c0;
  s.constraints.lambda_min = -f.solve.max_coef;
  s.constraints.lambda_max = f.solve.max_coef;
  s.constraints.bias_min = -f.solve.max_bias;
  s.constraints.bias_max = f.solve.max_bias;
  s.constraints.r_min = f.solve.min_size;
  s.constraints.r_max = f.solve.max_size;
  s.time_limit_seconds = f.solve.timeout;
  s.gap_tolerance = f.solve.gap_tol;
  s.node_limit = f.solve.node_limit;
  s.seed = f.data.seed;
  s.progress = [&log](const ProgressEvent& e) { log.info("{}", FormatProgress(e)); };
  cfg.log = [&log](std::string_view line) { log.info("{}", line); };
  return cfg;
}

int CmdBinarize(const Flags& f, std::ostream& out, spdlog::logger& log) {
  CsvOptions options;
  options.label_column = f.data.label;
  options.require_training_shape = false;
  const RawTable table = LoadCsv(f.data.data, options);
  const BinarizationSchema schema =
      FitBinarizer(table, ParseBinningStrategy(f.data.discretizer), f.data.n_bins, f.data.seed);
  for (const auto& w : schema.warnings) log.warn("{}", w);
  const std::string json = schema.ToJson();
  if (f.out.empty()) {
    out << json;
  } else {
    WriteFile(f.out, json);
    for (const auto& name : schema.BinaryFeatureNames()) out << name << '\n';
  }
  return kExitSuccess;
}

int CmdTrain(const Flags& f, std::ostream& out, spdlog::logger& log) {
  const RawTable table = LoadTraining(f.data);
  const PipelineConfig cfg = MakePipeline(f, log);
  const auto start = std::chrono::steady_clock::now();
  const TrainOutcome trained = TrainPipeline(table, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string json = Serialize(trained.model);
  WriteFile(f.out, json);

  if (f.format == "json") {
    out << json;
  } else {
    out << RenderScorecard(trained.model, f.format == "markdown" ? ScorecardFormat::kMarkdown
                                                                 : ScorecardFormat::kText);
  }
  const SolveResult& r = trained.result;
  char line[256];
  std::snprintf(line, sizeof(line),
                "objective=%.9g loss=%.9g gap=%.6g size=%d status=%s nodes=%ld wall_time=%.2fs\n",
                r.v_max, r.loss, r.gap, ModelSize(r.lambda), std::string(ToString(r.status)).c_str(),
                r.stats.nodes_processed, wall);
  out << line;
  log.info("model written to {}", f.out);
  return kExitSuccess;
}

int CmdCv(const Flags& f, std::ostream& out, spdlog::logger& log) {
  if (f.folds < 2) throw UsageError("--folds must be at least 2");
  const RawTable table = LoadTraining(f.data);
  const CvReport report = CrossValidate(table, MakePipeline(f, log), f.folds);
  const std::string json = report.ToJson();
  if (!f.out.empty()) WriteFile(f.out, json);
  out << (f.format == "json" ? json : report.ToText());
  return kExitSuccess;
}

int CmdPredict(const Flags& f, std::ostream& out, spdlog::logger&) {
  const MissModel model = LoadModel(f.model);
  if (std::filesystem::file_size(f.data.data) == 0) return kExitSuccess;
  const RawTable table = LoadCsv(f.data.data, OptionsFor(*model.binarizer(), ""));
  if (table.num_rows() == 0) return kExitSuccess;
  const BinaryDataset ds = model.Encode(table);

  out << "prediction";
  if (f.proba) {
    for (const auto& c : model.class_names()) out << ',' << CsvEscape("p_" + c);
  }
  out << '\n';
  char cell[32];
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    out << CsvEscape(model.class_names()[static_cast<std::size_t>(model.Predict(ds.row(i)))]);
    if (f.proba) {
      for (double p : model.PredictProba(ds.row(i))) {
        std::snprintf(cell, sizeof(cell), "%.17g", p);
        out << ',' << cell;
      }
    }
    out << '\n';
  }
  return kExitSuccess;
}

int CmdEvaluate(const Flags& f, std::ostream& out, spdlog::logger&) {
  const MissModel model = LoadModel(f.model);
  const std::vector<std::string> header = ReadCsvHeader(f.data.data);
  if (std::find(header.begin(), header.end(), f.data.label) == header.end()) {
    throw UsageError("label column '" + f.data.label + "' not found in " + f.data.data);
  }
  CsvOptions options = OptionsFor(*model.binarizer(), f.data.label);
  options.require_training_shape = true;
  const RawTable table = LoadCsv(f.data.data, options);
  const BinaryDataset ds = model.Encode(table);
  const std::size_t n = ds.num_samples();
  const std::size_t k = model.num_classes();
  std::vector<int> pred(n);
  RealMatrix probs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = model.Predict(ds.row(i));
    const std::vector<double> p = model.PredictProba(ds.row(i));
    for (std::size_t c = 0; c < k; ++c) probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = p[c];
  }
  const ObjectiveValue obj = Objective(model, ds);
  nlohmann::ordered_json doc;
  doc["n"] = n;
  doc["f1"] = WeightedF1(ds.labels(), pred, k);
  doc["auc"] = WeightedOvrAuc(ds.labels(), probs, k);
  doc["ece"] = ExpectedCalibrationError(ds.labels(), probs, k);
  doc["loss"] = obj.loss;
  doc["objective"] = obj.value;
  const std::string json = doc.dump(2) + "\n";
  if (!f.out.empty()) WriteFile(f.out, json);
  if (f.format == "json") {
    out << json;
  } else {
    char line[200];
    std::snprintf(line, sizeof(line), "n=%zu f1=%.4f auc=%.4f ece=%.4f loss=%.6f objective=%.6f\n", n,
                  doc["f1"].get<double>(), doc["auc"].get<double>(), doc["ece"].get<double>(),
                  obj.loss, obj.value);
    out << line;
  }
  return kExitSuccess;
}

int CmdExport(const Flags& f, std::ostream& out, spdlog::logger&) {
  const MissModel model = Deserialize(ReadFile(f.model));
  std::string text;
  if (f.format == "json") {
    text = Serialize(model);
  } else {
    text = RenderScorecard(model, f.format == "markdown" ? ScorecardFormat::kMarkdown
                                                         : ScorecardFormat::kText);
  }
  if (f.out.empty()) {
    out << text;
  } else {
    WriteFile(f.out, text);
  }
  return kExitSuccess;
}

void AddFormat(CLI::App* cmd, std::string* format, std::vector<std::string> allowed) {
  cmd->add_option("--format", *format, "Output format")
      ->check(CLI::IsMember(std::move(allowed)))
      ->capture_default_str();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = MakeLogger(err);
  Flags f;
  CLI::App app{"Multiclass integer scoring systems: binarize, train, cv, predict, evaluate, export"};
  app.require_subcommand(1, 1);

  auto* binarize = app.add_subcommand("binarize", "Fit the binarizer and write its schema JSON");
  AddDataFlags(binarize, &f.data, /*label_required=*/false);
  binarize->add_option("--out", f.out, "Schema JSON path (stdout when absent)");

  auto* train = app.add_subcommand("train", "Train a scoring system and write the model JSON");
  AddDataFlags(train, &f.data, true);
  AddSolveFlags(train, &f.solve);
  train->add_option("--out", f.out, "Model JSON path")->required();
  AddFormat(train, &f.format, {"text", "markdown", "json"});

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  AddDataFlags(cv, &f.data, true);
  AddSolveFlags(cv, &f.solve);
  cv->add_option("--folds", f.folds, "Number of folds (at least 2)")->capture_default_str();
  cv->add_option("--out", f.out, "Report JSON path");
  AddFormat(cv, &f.format, {"text", "json"});

  auto* predict = app.add_subcommand("predict", "Predict classes for a CSV (CSV on stdout)");
  predict->add_option("--model", f.model, "Model JSON")->required();
  predict->add_option("--data", f.data.data, "Input CSV")->required();
  predict->add_flag("--proba", f.proba, "Append one probability column per class");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on labelled data");
  evaluate->add_option("--model", f.model, "Model JSON")->required();
  evaluate->add_option("--data", f.data.data, "Input CSV")->required();
  evaluate->add_option("--label", f.data.label, "Label column")->required();
  evaluate->add_option("--out", f.out, "Metrics JSON path");
  AddFormat(evaluate, &f.format, {"text", "json"});

  auto* exporter = app.add_subcommand("export", "Render a model as a scorecard or JSON");
  exporter->add_option("--model", f.model, "Model JSON")->required();
  exporter->add_option("--out", f.out, "Output path (stdout when absent)");
  AddFormat(exporter, &f.format, {"text", "markdown", "json"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (binarize->parsed()) return CmdBinarize(f, out, *log);
    if (train->parsed()) return CmdTrain(f, out, *log);
    if (cv->parsed()) return CmdCv(f, out, *log);
    if (predict->parsed()) return CmdPredict(f, out, *log);
    if (evaluate->parsed()) return CmdEvaluate(f, out, *log);
    if (exporter->parsed()) return CmdExport(f, out, *log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace miss::cli
