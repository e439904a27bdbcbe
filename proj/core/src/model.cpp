#include "miss/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "miss/loss.hpp"

namespace miss {
namespace {

using nlohmann::json;

constexpr int kModelSchemaVersion = 1;

template <typename Matrix>
int ModelSizeImpl(const Matrix& lambda) {
  int used = 0;
  for (Eigen::Index j = 1; j < lambda.rows(); ++j) {
    for (Eigen::Index k = 0; k < lambda.cols(); ++k) {
      if (lambda(j, k) != 0) {
        ++used;
        break;
      }
    }
  }
  return used;
}

std::string Pad(const std::string& text, std::size_t width, bool left_align) {
  if (text.size() >= width) return text;
  std::string padding(width - text.size(), ' ');
  return left_align ? text + padding : padding + text;
}

}  // namespace

MissModel::MissModel(IntMatrix lambda, std::vector<std::string> feature_names,
                     std::vector<std::string> class_names, ModelMeta meta,
                     std::optional<BinarizationSchema> binarizer)
    : lambda_(std::move(lambda)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)),
      meta_(meta),
      binarizer_(std::move(binarizer)) {
  if (class_names_.empty()) throw Error("model: no classes");
  if (static_cast<std::size_t>(lambda_.rows()) != feature_names_.size() + 1 ||
      static_cast<std::size_t>(lambda_.cols()) != class_names_.size()) {
    throw Error("model: coefficient matrix shape does not match names");
  }
  if (meta_.lambda_min > meta_.lambda_max || meta_.bias_min > meta_.bias_max) {
    throw Error("model: empty coefficient box");
  }
  for (Eigen::Index k = 0; k < lambda_.cols(); ++k) {
    const int b = lambda_(0, k);
    if (b < meta_.bias_min || b > meta_.bias_max) {
      throw Error("model: bias " + std::to_string(b) + " outside [" +
                  std::to_string(meta_.bias_min) + ", " + std::to_string(meta_.bias_max) + "]");
    }
    for (Eigen::Index j = 1; j < lambda_.rows(); ++j) {
      const int v = lambda_(j, k);
      if (v < meta_.lambda_min || v > meta_.lambda_max) {
        throw Error("model: coefficient " + std::to_string(v) + " outside [" +
                    std::to_string(meta_.lambda_min) + ", " + std::to_string(meta_.lambda_max) +
                    "]");
      }
    }
  }
  if (ModelSize(lambda_) > meta_.r_max) throw Error("model: model size exceeds r_max");
  if (!(meta_.optimality_gap >= 0.0 && meta_.optimality_gap <= 1.0)) {
    throw Error("model: optimality gap outside [0, 1]");
  }
  if (!(meta_.c0 > 0.0)) throw Error("model: c0 must be positive");
  if (binarizer_ && binarizer_->BinaryFeatureNames().size() < feature_names_.size()) {
    throw Error("model: binarizer emits fewer columns than the model uses");
  }
}

BinaryDataset MissModel::Encode(const RawTable& table) const {
  if (!binarizer_) throw Error("model: no binarizer to encode raw data");
  const BinaryDataset all = ApplyBinarizer(table, *binarizer_, class_names_);
  const std::vector<std::string>& emitted = all.feature_names();
  std::vector<std::size_t> columns;
  for (const std::string& name : feature_names_) {
    const auto it = std::find(emitted.begin(), emitted.end(), name);
    if (it == emitted.end()) throw Error("model: binarizer does not emit feature '" + name + "'");
    columns.push_back(static_cast<std::size_t>(it - emitted.begin()));
  }
  return all.SelectFeatures(columns);
}

void MissModel::CheckDimension(std::span<const std::uint8_t> x) const {
  if (x.size() != num_features()) {
    throw Error("model: expected " + std::to_string(num_features()) + " features, got " +
                std::to_string(x.size()));
  }
}

std::vector<long> MissModel::Scores(std::span<const std::uint8_t> x) const {
  CheckDimension(x);
  std::vector<long> scores(num_classes());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    long s = lambda_(0, static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j]) s += lambda_(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(k));
    }
    scores[k] = s;
  }
  return scores;
}

int MissModel::Predict(std::span<const std::uint8_t> x) const { return ArgMax(Scores(x)); }

std::vector<double> MissModel::PredictProba(std::span<const std::uint8_t> x) const {
  auto scores = Scores(x);
  std::vector<double> real(scores.begin(), scores.end());
  return Softmax(real);
}

bool operator==(const MissModel& a, const MissModel& b) {
  return a.lambda_.rows() == b.lambda_.rows() && a.lambda_.cols() == b.lambda_.cols() &&
         a.lambda_ == b.lambda_ && a.feature_names_ == b.feature_names_ &&
         a.class_names_ == b.class_names_ && a.meta_ == b.meta_ && a.binarizer_ == b.binarizer_;
}

int ModelSize(const IntMatrix& lambda) { return ModelSizeImpl(lambda); }
int ModelSize(const RealMatrix& lambda) { return ModelSizeImpl(lambda); }

std::vector<double> Softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = std::exp(scores[k] - m);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

int ArgMax(std::span<const long> scores) {
  int best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

ObjectiveValue Objective(const MissModel& model, const BinaryDataset& ds) {
  if (ds.num_features() != model.num_features() || ds.num_classes() != model.num_classes()) {
    throw Error("objective: dataset shape does not match model");
  }
  ObjectiveValue out;
  out.loss = LossValue(model.lambda().cast<double>(), ds);
  out.penalty = model.meta().c0 * ModelSize(model.lambda());
  out.value = out.loss + out.penalty;
  return out;
}

std::string RenderScorecard(const MissModel& model, ScorecardFormat format) {
  const auto& lambda = model.lambda();
  const std::size_t k_count = model.num_classes();

  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < model.num_features(); ++j) {
    const auto row = static_cast<Eigen::Index>(j + 1);
    if ((lambda.row(row).array() == 0).all()) continue;
    std::vector<std::string> cells{model.feature_names()[j]};
    for (std::size_t k = 0; k < k_count; ++k) {
      cells.push_back(std::to_string(lambda(row, static_cast<Eigen::Index>(k))));
    }
    rows.push_back(std::move(cells));
  }
  std::vector<std::string> bias{"+ bias"};
  for (std::size_t k = 0; k < k_count; ++k) {
    bias.push_back(std::to_string(lambda(0, static_cast<Eigen::Index>(k))));
  }
  std::vector<std::string> score{"Score:"};
  for (std::size_t k = 0; k < k_count; ++k) score.emplace_back("= ....");

  std::vector<std::string> header{"Binary feature"};
  for (const auto& name : model.class_names()) header.push_back(name);

  std::ostringstream out;
  if (format == ScorecardFormat::kMarkdown) {
    auto emit = [&](const std::vector<std::string>& cells) {
      out << "|";
      for (const auto& cell : cells) out << " " << cell << " |";
      out << "\n";
    };
    emit(header);
    out << "|---|";
    for (std::size_t k = 0; k < k_count; ++k) out << "---:|";
    out << "\n";
    for (const auto& row : rows) emit(row);
    emit(bias);
    emit(score);
    return out.str();
  }

  std::vector<std::size_t> widths(k_count + 1, 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) widths[c] = std::max(widths[c], cells[c].size());
  };
  measure(header);
  for (const auto& row : rows) measure(row);
  measure(bias);
  measure(score);

  std::size_t total = 0;
  for (auto w : widths) total += w + 2;
  const std::string rule(total, '-');
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << Pad(cells[c], widths[c], c == 0) << (c + 1 < cells.size() ? "  " : "");
    }
    out << "\n";
  };
  emit(header);
  out << rule << "\n";
  for (const auto& row : rows) emit(row);
  emit(bias);
  out << rule << "\n";
  emit(score);
  return out.str();
}

std::string Serialize(const MissModel& model) {
  const auto& lambda = model.lambda();
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["classes"] = model.class_names();
  json features = json::array();
  for (std::size_t j = 0; j < model.num_features(); ++j) {
    std::vector<int> points;
    for (Eigen::Index k = 0; k < lambda.cols(); ++k) {
      points.push_back(lambda(static_cast<Eigen::Index>(j + 1), k));
    }
    features.push_back({{"name", model.feature_names()[j]}, {"points", points}});
  }
  doc["features"] = std::move(features);
  std::vector<int> bias;
  for (Eigen::Index k = 0; k < lambda.cols(); ++k) bias.push_back(lambda(0, k));
  doc["bias"] = bias;
  const auto& m = model.meta();
  doc["meta"] = {{"c0", m.c0},
                 {"lambda_min", m.lambda_min},
                 {"lambda_max", m.lambda_max},
                 {"bias_min", m.bias_min},
                 {"bias_max", m.bias_max},
                 {"r_max", m.r_max},
                 {"objective", m.objective},
                 {"loss", m.loss},
                 {"optimality_gap", m.optimality_gap},
                 {"seed", m.seed}};
  if (model.binarizer()) doc["binarizer"] = json::parse(model.binarizer()->ToJson());
  return doc.dump(2) + "\n";
}

MissModel Deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("model: malformed JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("schema_version")) {
      throw Error("model: missing schema_version");
    }
    if (doc.at("schema_version").get<int>() != kModelSchemaVersion) {
      throw Error("model: unsupported schema_version " + doc.at("schema_version").dump());
    }
    auto classes = doc.at("classes").get<std::vector<std::string>>();
    const auto& features = doc.at("features");
    auto bias = doc.at("bias").get<std::vector<int>>();
    if (bias.size() != classes.size()) throw Error("model: bias length does not match classes");

    IntMatrix lambda(static_cast<Eigen::Index>(features.size() + 1),
                     static_cast<Eigen::Index>(classes.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < classes.size(); ++k) lambda(0, static_cast<Eigen::Index>(k)) = bias[k];
    for (std::size_t j = 0; j < features.size(); ++j) {
      names.push_back(features[j].at("name").get<std::string>());
      auto points = features[j].at("points").get<std::vector<int>>();
      if (points.size() != classes.size()) {
        throw Error("model: feature '" + names.back() + "' has wrong number of points");
      }
      for (std::size_t k = 0; k < classes.size(); ++k) {
        lambda(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(k)) = points[k];
      }
    }

    const auto& m = doc.at("meta");
    ModelMeta meta;
    meta.c0 = m.at("c0").get<double>();
    meta.lambda_min = m.at("lambda_min").get<int>();
    meta.lambda_max = m.at("lambda_max").get<int>();
    meta.bias_min = m.at("bias_min").get<int>();
    meta.bias_max = m.at("bias_max").get<int>();
    meta.r_max = m.at("r_max").get<int>();
    meta.objective = m.value("objective", 0.0);
    meta.loss = m.value("loss", 0.0);
    meta.optimality_gap = m.value("optimality_gap", 1.0);
    meta.seed = m.value("seed", std::uint64_t{0});

    std::optional<BinarizationSchema> binarizer;
    if (doc.contains("binarizer")) binarizer = BinarizationSchema::FromJson(doc["binarizer"].dump());
    return MissModel(std::move(lambda), std::move(names), std::move(classes), meta,
                     std::move(binarizer));
  } catch (const json::exception& e) {
    throw Error(std::string("model: ") + e.what());
  }
}

}  // namespace miss
