#ifndef CDRKIT_PIPELINE_HPP
#define CDRKIT_PIPELINE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdrkit/log.hpp"
#include "cdrkit/model.hpp"
#include "cdrkit/prep.hpp"

namespace cdrkit {

/// Hidden/cell state of every recurrent layer at one instant; the classifier
/// uses h1/c1 only.
struct RnnStateSnapshot {
  Vec h1, c1, h2, c2;
};

/// Training instrumentation. All hooks are optional; they exist so tests can
/// verify the stateful contract and the chronological feeding order without
/// touching trainer internals.
struct TrainHooks {
  std::function<void(int epoch)> on_epoch_start;
  std::function<void(int epoch, int batch, const std::vector<std::size_t>& sample_indices,
                     const RnnStateSnapshot& entering)>
      on_batch_start;
  std::function<void(int epoch, int batch, const RnnStateSnapshot& leaving)> on_batch_end;
  std::function<void(int epoch, std::size_t sample, double loss)> on_sample_loss;
};

namespace detail {

// shared epoch/batch loop: chronological order, no shuffling, optional state
// carry across batches (reset at every epoch start), divergence guard and
// loss-plateau early stopping.
template <typename ForwardBackward, typename SnapshotFn, typename ResetFn>
inline TrainingSummary run_training_loop(std::size_t n_samples, const TrainingConfig& cfg,
                                         Optimizer& opt,
                                         const std::vector<std::span<double>>& params,
                                         const std::vector<std::span<double>>& grad_spans,
                                         const std::function<void()>& zero_grads,
                                         ForwardBackward&& forward_backward,
                                         SnapshotFn&& snapshot, ResetFn&& reset_state,
                                         const TrainHooks* hooks) {
  TrainingSummary summary;
  summary.train_samples = n_samples;
  double best = std::numeric_limits<double>::infinity();
  double first_sample_loss = -1.0;  // explosion baseline, before any update
  int since_best = 0;
  std::vector<double> best_params;  // snapshot of the best epoch's parameters
  auto snapshot_params = [&] {
    best_params.clear();
    for (const auto& p : params) best_params.insert(best_params.end(), p.begin(), p.end());
  };
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    reset_state();  // each epoch sees the same initial condition
    if (hooks && hooks->on_epoch_start) hooks->on_epoch_start(epoch);
    double epoch_loss = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n_samples;
         start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(n_samples, start + static_cast<std::size_t>(cfg.batch_size));
      if (!cfg.stateful) reset_state();  // every batch starts from the zero state
      if (hooks && hooks->on_batch_start) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < end; ++i) idx.push_back(i);
        hooks->on_batch_start(epoch, batch_index, idx, snapshot());
      }
      zero_grads();
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const double loss = forward_backward(i, scale);
        if (!std::isfinite(loss))
          throw DivergenceError("training diverged: non-finite loss at epoch " +
                                std::to_string(epoch) + ", sample " + std::to_string(i));
        if (first_sample_loss < 0.0) first_sample_loss = loss;
        epoch_loss += loss;
        if (hooks && hooks->on_sample_loss) hooks->on_sample_loss(epoch, i, loss);
      }
      clip_global_norm(grad_spans, 5.0);
      opt.step(params, grad_spans);
      if (hooks && hooks->on_batch_end) hooks->on_batch_end(epoch, batch_index, snapshot());
    }
    epoch_loss /= static_cast<double>(n_samples);
    if (epoch == 0) summary.initial_loss = epoch_loss;
    logging::debug("epoch " + std::to_string(epoch) + " loss " + std::to_string(epoch_loss));
    summary.loss_log.emplace_back(epoch, epoch_loss);
    summary.final_loss = epoch_loss;
    summary.epochs_run = epoch + 1;
    if (!std::isfinite(epoch_loss) ||
        epoch_loss > 1e6 * std::max(first_sample_loss, 1e-12))
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                            " (loss " + std::to_string(epoch_loss) + ")");
    if (best - epoch_loss > cfg.min_delta) {
      best = epoch_loss;
      since_best = 0;
      snapshot_params();
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  // hand back the best epoch seen, not whatever the last update left behind
  if (!best_params.empty()) {
    std::size_t k = 0;
    for (const auto& p : params)
      for (double& v : p) v = best_params[k++];
    summary.final_loss = best;
  }
  logging::info("training done: " + std::to_string(summary.epochs_run) + " epochs, loss " +
                std::to_string(summary.initial_loss) + " -> " +
                std::to_string(summary.final_loss));
  return summary;
}

inline std::map<std::string, std::pair<double, double>> collect_label_coords(
    const std::vector<LocationEvent>& events) {
  std::map<std::string, std::pair<double, double>> coords;
  for (const auto& ev : events) coords.emplace(ev.label, std::make_pair(ev.lat, ev.lon));
  return coords;
}

/// Training subsequences for the baseline fits: the gap/stay-segmented
/// trajectories when the prep method defines them, otherwise the whole
/// training sequence as one piece.
inline std::vector<std::vector<LocationEvent>> baseline_sequences(
    const std::vector<LocationEvent>& train_events, const PrepConfig& prep) {
  if (prep.uses_t())
    return detail::segment(train_events, prep.settle_timespan(), prep.gap_timespan());
  return {train_events};
}

}  // namespace detail

/// Train the coordinate regressor on a user's first-`split` fraction of
/// events: prepare, fit the normalizer on the training samples only, then run
/// the epoch loop over samples in strict chronological order.
inline PersistedModel train_regressor(const UserProfile& profile, const TrainingConfig& cfg,
                                      const TrainHooks* hooks = nullptr) {
  cfg.validate();
  auto [train_events, test_events] = split_train_test(profile.events, cfg.split);
  (void)test_events;
  PreparedDataset train = prepare(train_events, cfg.prep, profile.user_id);

  std::vector<std::pair<double, double>> coords;
  for (const auto& s : train.samples) {
    for (const auto& ev : s.input) coords.emplace_back(ev.lat, ev.lon);
    coords.emplace_back(s.target.lat, s.target.lon);
  }
  const NormalizerParams norm = fit_normalizer(coords, cfg.normalizer, cfg.std_divisor);
  if (norm.any_degenerate())
    logging::warn("normalizer: a coordinate axis never moves in the training data; "
                  "it maps to a constant");

  // normalized inputs/targets, fixed for the whole run
  std::vector<std::vector<Vec>> xs(train.samples.size());
  std::vector<Vec> ys(train.samples.size());
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    for (const auto& ev : train.samples[i].input) {
      auto [x, y] = normalize(norm, ev.lat, ev.lon);
      xs[i].push_back({x, y});
    }
    auto [tx, ty] = normalize(norm, train.samples[i].target.lat, train.samples[i].target.lon);
    ys[i] = {tx, ty};
  }

  const Activation act =
      cfg.normalizer == NormKind::MinMax ? Activation::Relu : Activation::Linear;
  Rng rng(cfg.seed);
  RegressorNet net(static_cast<std::size_t>(cfg.reg_hidden1),
                   static_cast<std::size_t>(cfg.reg_hidden2), act);
  net.init_random(rng);
  RegressorNet grads(static_cast<std::size_t>(cfg.reg_hidden1),
                     static_cast<std::size_t>(cfg.reg_hidden2), act);

  std::vector<std::span<double>> params, grad_spans;
  net.collect(params);
  grads.collect(grad_spans);
  Optimizer opt(cfg.opt);

  LstmState s1(net.l1.hidden_size), s2(net.l2.hidden_size);
  auto snapshot = [&] { return RnnStateSnapshot{s1.h, s1.c, s2.h, s2.c}; };
  auto reset_state = [&] {
    s1.reset();
    s2.reset();
  };
  auto zero_grads = std::function<void()>([&] {
    for (auto& g : grad_spans) std::fill(g.begin(), g.end(), 0.0);
  });
  auto forward_backward = [&](std::size_t i, double scale) {
    if (!cfg.stateful) {
      s1.reset();
      s2.reset();
    }
    return regressor_loss_grad(net, xs[i], ys[i], cfg.loss, &s1, &s2, grads, scale);
  };

  PersistedModel model;
  model.kind = ModelKind::RegressorRnn;
  model.source_user = profile.user_id;
  model.config = cfg;
  model.summary = detail::run_training_loop(train.samples.size(), cfg, opt, params, grad_spans,
                                            zero_grads, forward_backward, snapshot, reset_state,
                                            hooks);
  model.summary.degenerate_axis = norm.any_degenerate();
  model.normalizer = norm;
  model.regressor = std::move(net);
  model.label_coords = detail::collect_label_coords(train_events);
  return model;
}

/// Train the label classifier on fixed-width windows (method 2) over the
/// training events. The vocabulary is the training labels only; evaluation
/// filters unknown test locations against it.
inline PersistedModel train_classifier(const UserProfile& profile, const TrainingConfig& cfg,
                                       const TrainHooks* hooks = nullptr) {
  cfg.validate();
  if (cfg.prep.w < 2) throw Error("classifier: window length w >= 2 required");
  auto [train_events, test_events] = split_train_test(profile.events, cfg.split);
  (void)test_events;
  PreparedDataset train = prep_method2(train_events, cfg.prep.w);

  std::set<std::string> vocab_set;
  for (const auto& ev : train_events) vocab_set.insert(ev.label);
  std::vector<std::string> vocabulary(vocab_set.begin(), vocab_set.end());
  auto index_of = [&](const std::string& label) {
    return static_cast<std::size_t>(
        std::lower_bound(vocabulary.begin(), vocabulary.end(), label) - vocabulary.begin());
  };

  std::vector<std::vector<std::size_t>> xs(train.samples.size());
  std::vector<std::size_t> ys(train.samples.size());
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    for (const auto& ev : train.samples[i].input) xs[i].push_back(index_of(ev.label));
    ys[i] = index_of(train.samples[i].target.label);
  }

  Rng rng(cfg.seed);
  ClassifierNet net(vocabulary.size(), static_cast<std::size_t>(cfg.embed_dim),
                    static_cast<std::size_t>(cfg.cls_hidden));
  net.init_random(rng);
  ClassifierNet grads(vocabulary.size(), static_cast<std::size_t>(cfg.embed_dim),
                      static_cast<std::size_t>(cfg.cls_hidden));

  std::vector<std::span<double>> params, grad_spans;
  net.collect(params);
  grads.collect(grad_spans);
  Optimizer opt(cfg.opt);

  LstmState st(net.lstm.hidden_size);
  auto snapshot = [&] { return RnnStateSnapshot{st.h, st.c, {}, {}}; };
  auto reset_state = [&] { st.reset(); };
  auto zero_grads = std::function<void()>([&] {
    for (auto& g : grad_spans) std::fill(g.begin(), g.end(), 0.0);
  });
  auto forward_backward = [&](std::size_t i, double scale) {
    if (!cfg.stateful) st.reset();
    return classifier_loss_grad(net, xs[i], ys[i], &st, grads, scale);
  };

  PersistedModel model;
  model.kind = ModelKind::ClassifierRnn;
  model.source_user = profile.user_id;
  model.config = cfg;
  model.summary = detail::run_training_loop(train.samples.size(), cfg, opt, params, grad_spans,
                                            zero_grads, forward_backward, snapshot, reset_state,
                                            hooks);
  model.vocabulary = std::move(vocabulary);
  model.classifier = std::move(net);
  model.label_coords = detail::collect_label_coords(train_events);
  return model;
}

/// Fit one of the two traditional predictors on the training split.
inline PersistedModel train_baseline(const UserProfile& profile, ModelKind kind,
                                     const TrainingConfig& cfg) {
  cfg.validate();
  if (kind != ModelKind::Mfnv && kind != ModelKind::Markov)
    throw Error("train_baseline: kind must be mfnv or markov");
  auto [train_events, test_events] = split_train_test(profile.events, cfg.split);
  (void)test_events;
  const auto sequences = detail::baseline_sequences(train_events, cfg.prep);

  PersistedModel model;
  model.kind = kind;
  model.source_user = profile.user_id;
  model.config = cfg;
  if (kind == ModelKind::Mfnv)
    model.mfnv = fit_mfnv(sequences);
  else
    model.markov = fit_markov(sequences, cfg.markov_order);
  model.label_coords = detail::collect_label_coords(train_events);
  model.summary.train_samples =
      kind == ModelKind::Mfnv ? model.mfnv->transitions : model.markov->transitions;
  return model;
}

struct TestSet {
  PreparedDataset data;
  std::size_t removed_unknown = 0;
};

/// The preparation a model's test data must have been built with: the
/// classifier always consumes fixed-width windows, everything else follows
/// the training prep config.
inline PrepConfig effective_test_prep(const PersistedModel& model) {
  if (model.kind == ModelKind::ClassifierRnn) {
    PrepConfig p;
    p.method = PrepMethod::M2;
    p.w = model.config.prep.w;
    return p;
  }
  return model.config.prep;
}

/// The model's own test view of a profile: the chronological remainder of the
/// split, prepared exactly as the model was trained, with unknown locations
/// filtered out for the classifier only.
inline TestSet make_test_set(const UserProfile& profile, const PersistedModel& model) {
  auto [train_events, test_events] = split_train_test(profile.events, model.config.split);
  (void)train_events;
  TestSet out;
  if (model.kind == ModelKind::ClassifierRnn) {
    PreparedDataset prepared = prep_method2(test_events, model.config.prep.w);
    prepared.source_user = profile.user_id;
    std::set<std::string> known(model.vocabulary.begin(), model.vocabulary.end());
    auto filtered = filter_unknown(prepared, known);
    out.data = std::move(filtered.kept);
    out.removed_unknown = filtered.removed;
  } else {
    out.data = prepare(test_events, model.config.prep, profile.user_id);
  }
  return out;
}

/// Per-epoch training log as delimited text (epoch, loss).
inline std::string format_loss_log(const TrainingSummary& summary) {
  std::string out = "epoch,loss\n";
  for (const auto& [epoch, loss] : summary.loss_log)
    out += std::to_string(epoch) + "," + format_double(loss) + "\n";
  return out;
}

}  // namespace cdrkit

#endif  // CDRKIT_PIPELINE_HPP
