#ifndef CDRKIT_MODEL_HPP
#define CDRKIT_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdrkit/baselines.hpp"
#include "cdrkit/neural.hpp"
#include "cdrkit/normalizer.hpp"
#include "cdrkit/optimizer.hpp"
#include "cdrkit/prep.hpp"
#include "cdrkit/types.hpp"

namespace cdrkit {

enum class ModelKind { Mfnv, Markov, ClassifierRnn, RegressorRnn };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Mfnv: return "mfnv";
    case ModelKind::Markov: return "markov";
    case ModelKind::ClassifierRnn: return "cls-rnn";
    case ModelKind::RegressorRnn: return "reg-rnn";
  }
  return "?";
}

inline ModelKind model_kind_from(const std::string& s) {
  if (s == "mfnv") return ModelKind::Mfnv;
  if (s == "markov") return ModelKind::Markov;
  if (s == "cls-rnn") return ModelKind::ClassifierRnn;
  if (s == "reg-rnn") return ModelKind::RegressorRnn;
  throw FormatError("unknown model kind: " + s);
}

/// Everything a training run needs; the seed is always recorded so any run
/// can be reproduced bit for bit.
struct TrainingConfig {
  PrepConfig prep{PrepMethod::M3, 0, 3600, 0, 0};
  NormKind normalizer = NormKind::MinMax;
  bool std_divisor = false;
  OptimizerConfig opt{};
  LossKind loss = LossKind::Mse;
  int batch_size = 1;
  int epochs = 200;
  bool stateful = true;
  std::uint64_t seed = 42;
  double split = 0.5;
  int markov_order = 2;
  int embed_dim = 16;
  int cls_hidden = 64;
  int reg_hidden1 = 32;
  int reg_hidden2 = 32;
  int patience = 20;        // early stop after this many epochs without progress
  double min_delta = 1e-6;  // smallest loss improvement that counts

  void validate() const {
    if (batch_size < 1) throw Error("config: batch size must be >= 1");
    if (epochs < 1) throw Error("config: epochs must be >= 1");
    if (!(split > 0.0 && split < 1.0)) throw Error("config: split must be in (0, 1)");
    opt.validate();
  }
};

struct TrainingSummary {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int epochs_run = 0;
  std::size_t train_samples = 0;
  bool degenerate_axis = false;
  std::vector<std::pair<int, double>> loss_log;  // (epoch, mean loss)
};

/// A trained, storable model: parameters, the normalizer (regressor), the
/// vocabulary (classifier), tower coordinates for label models, and the full
/// configuration that produced it.
struct PersistedModel {
  int format_version = 1;
  ModelKind kind = ModelKind::RegressorRnn;
  std::string source_user;
  TrainingConfig config;
  TrainingSummary summary;
  std::map<std::string, std::pair<double, double>> label_coords;
  std::vector<std::string> vocabulary;  // classifier only, sorted

  std::optional<FrequencyTable> mfnv;
  std::optional<MarkovModel> markov;
  std::optional<ClassifierNet> classifier;
  std::optional<RegressorNet> regressor;
  NormalizerParams normalizer;  // regressor only

  std::size_t vocab_index(const std::string& label) const {
    auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), label);
    if (it == vocabulary.end() || *it != label)
      throw VocabularyError("unknown location label: " + label);
    return static_cast<std::size_t>(it - vocabulary.begin());
  }
};

/// Predicted next label for the label-based models (baselines, classifier).
inline std::string predict_label(const PersistedModel& model,
                                 const std::vector<LocationEvent>& history) {
  if (history.empty()) throw Error("predict: empty history");
  switch (model.kind) {
    case ModelKind::Mfnv:
      return predict_mfnv(*model.mfnv, history.back().label);
    case ModelKind::Markov: {
      std::vector<std::string> labels;
      labels.reserve(history.size());
      for (const auto& ev : history) labels.push_back(ev.label);
      return predict_markov(*model.markov, labels);
    }
    case ModelKind::ClassifierRnn: {
      std::vector<std::size_t> idx;
      idx.reserve(history.size());
      for (const auto& ev : history) idx.push_back(model.vocab_index(ev.label));
      const Vec probs = classifier_forward(*model.classifier, idx);
      std::size_t best = 0;
      for (std::size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;
      return model.vocabulary[best];
    }
    case ModelKind::RegressorRnn:
      throw Error("predict_label: regressor has no label output");
  }
  throw Error("predict_label: bad model kind");
}

/// Next-location coordinates for any model kind. The regressor normalizes the
/// history, runs the network and denormalizes its output; label models map
/// their predicted label onto its tower.
inline std::pair<double, double> predict_next(const PersistedModel& model,
                                              const std::vector<LocationEvent>& history) {
  if (history.empty()) throw Error("predict_next: empty history");
  if (model.kind == ModelKind::RegressorRnn) {
    std::vector<Vec> xs;
    xs.reserve(history.size());
    for (const auto& ev : history) {
      auto [x, y] = normalize(model.normalizer, ev.lat, ev.lon);
      xs.push_back({x, y});
    }
    const Vec out = regressor_forward(*model.regressor, xs);
    return denormalize(model.normalizer, out[0], out[1]);
  }
  return baseline_predict_coords(predict_label(model, history), model.label_coords);
}

}  // namespace cdrkit

#endif  // CDRKIT_MODEL_HPP
