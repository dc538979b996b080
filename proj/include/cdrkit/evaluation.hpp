#ifndef CDRKIT_EVALUATION_HPP
#define CDRKIT_EVALUATION_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cdrkit/geo.hpp"
#include "cdrkit/pipeline.hpp"
#include "cdrkit/text.hpp"

namespace cdrkit {

/// Per-sample haversine errors plus aggregates. exact_label_matches counts
/// samples where a label model predicted the target tower itself (always 0
/// for the regressor, which is scored by distance alone).
struct EvaluationReport {
  std::string model_kind;
  PrepConfig prep;
  std::vector<double> distances_m;
  double mean_m = 0.0;
  double median_m = 0.0;
  double max_m = 0.0;
  std::size_t samples = 0;
  std::size_t removed_unknown = 0;
  std::size_t exact_label_matches = 0;
  bool has_labels = false;

  double label_accuracy() const {
    return samples == 0 ? 0.0
                        : static_cast<double>(exact_label_matches) / static_cast<double>(samples);
  }
};

namespace detail {

inline EvaluationReport aggregate_distances(std::vector<double> distances) {
  EvaluationReport r;
  r.samples = distances.size();
  double sum = 0.0;
  r.max_m = 0.0;
  for (double d : distances) {
    sum += d;
    r.max_m = std::max(r.max_m, d);
  }
  r.mean_m = sum / static_cast<double>(distances.size());
  std::vector<double> sorted = distances;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  r.median_m = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  r.distances_m = std::move(distances);
  return r;
}

}  // namespace detail

/// Score a model on test samples prepared with its own prep config.
/// `enforce_prep` may be dropped when several models share one test basis
/// (the comparison table) and the caller vouches for the samples.
inline EvaluationReport evaluate(const PersistedModel& model, const PreparedDataset& test,
                                 std::size_t removed_unknown = 0, bool enforce_prep = true) {
  if (test.samples.empty()) throw InsufficientDataError("evaluate: empty test set");
  if (enforce_prep && !(test.config == effective_test_prep(model)))
    throw Error("evaluate: test set prepared with a different config than the model");
  std::vector<double> distances;
  distances.reserve(test.samples.size());
  std::size_t exact = 0;
  const bool labelled = model.kind != ModelKind::RegressorRnn;
  for (const auto& s : test.samples) {
    const auto [plat, plon] = predict_next(model, s.input);
    distances.push_back(haversine_m(plat, plon, s.target.lat, s.target.lon));
    if (labelled && predict_label(model, s.input) == s.target.label) ++exact;
  }
  EvaluationReport r = detail::aggregate_distances(std::move(distances));
  r.model_kind = to_string(model.kind);
  r.prep = test.config;
  r.removed_unknown = removed_unknown;
  r.exact_label_matches = exact;
  r.has_labels = labelled;
  return r;
}

struct ThresholdCurve {
  std::vector<std::pair<double, double>> points;  // (distance m, accuracy)
};

/// accuracy(d) = fraction of samples with error <= d (inclusive boundary).
inline ThresholdCurve threshold_curve(const EvaluationReport& report,
                                      const std::vector<double>& thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] <= 0.0) throw Error("threshold_curve: thresholds must be positive");
    if (i && thresholds[i] < thresholds[i - 1]) throw Error("threshold_curve: thresholds must be sorted");
  }
  ThresholdCurve curve;
  for (double d : thresholds) {
    std::size_t hit = 0;
    for (double dist : report.distances_m)
      if (dist <= d) ++hit;
    curve.points.emplace_back(
        d, static_cast<double>(hit) / static_cast<double>(report.distances_m.size()));
  }
  return curve;
}

struct GridCell {
  std::int64_t t = 0;  // seconds
  int w = 0;
  bool ok = false;
  double mean_m = 0.0;
  std::string note;
};

struct GridSearchResult {
  std::vector<GridCell> cells;  // row-major, t outer, w inner
  std::optional<std::size_t> argmin;

  const GridCell* best() const { return argmin ? &cells[*argmin] : nullptr; }
};

/// First cell attaining the grid minimum, scanning in row-major order.
inline std::optional<std::size_t> argmin_cell(const std::vector<GridCell>& cells) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].ok) continue;
    if (!best || cells[i].mean_m < cells[*best].mean_m) best = i;
  }
  return best;
}

/// Full train+evaluate of the regressor per (t, w) cell, each with a seed
/// derived deterministically from (base seed, t, w). Cells failing on
/// insufficient data are recorded as absent, not fatal. The search is
/// per-user; cells are independent and may run on `jobs` threads.
inline GridSearchResult grid_search(const UserProfile& profile,
                                    const std::vector<std::int64_t>& t_values,
                                    const std::vector<int>& w_values, const TrainingConfig& base,
                                    int jobs = 1) {
  if (t_values.empty() || w_values.empty()) throw Error("grid_search: empty grid");
  GridSearchResult out;
  out.cells.resize(t_values.size() * w_values.size());
  auto run_cell = [&](std::size_t idx) {
    const std::int64_t t = t_values[idx / w_values.size()];
    const int w = w_values[idx % w_values.size()];
    GridCell cell;
    cell.t = t;
    cell.w = w;
    TrainingConfig cfg = base;
    cfg.prep.method = PrepMethod::M4;  // the only method consuming both knobs
    cfg.prep.t = t;
    cfg.prep.t_settle = 0;
    cfg.prep.t_gap = 0;
    cfg.prep.w = w;
    cfg.seed = mix_seed(base.seed, t, w);
    try {
      const PersistedModel model = train_regressor(profile, cfg);
      const TestSet test = make_test_set(profile, model);
      cell.mean_m = evaluate(model, test.data, test.removed_unknown).mean_m;
      cell.ok = true;
    } catch (const InsufficientDataError& e) {
      cell.note = e.what();
    }
    out.cells[idx] = std::move(cell);
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < out.cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int n = std::min<int>(jobs, static_cast<int>(out.cells.size()));
    for (int i = 0; i < n; ++i)
      workers.emplace_back([&] {
        for (std::size_t idx = next.fetch_add(1); idx < out.cells.size();
             idx = next.fetch_add(1))
          run_cell(idx);
      });
    for (auto& th : workers) th.join();
  }

  out.argmin = argmin_cell(out.cells);
  return out;
}

/// Long-format grid table, plot-ready: t, w, mean_error_m.
inline std::string format_grid(const GridSearchResult& grid) {
  std::string out = "t_seconds,w,mean_error_m\n";
  for (const auto& c : grid.cells) {
    out += std::to_string(c.t) + "," + std::to_string(c.w) + ",";
    out += c.ok ? format_double(c.mean_m) : std::string("NA");
    out.push_back('\n');
  }
  return out;
}

struct CompareRow {
  std::string model;
  bool ok = false;
  double mean_m = 0.0;
  double median_m = 0.0;
  double max_m = 0.0;
  std::size_t samples = 0;
  std::size_t removed_unknown = 0;
  double label_accuracy = 0.0;
  bool has_labels = false;
  std::string error;
};

/// One row per model kind. Every model trains on the same chronological
/// split and is scored on the same shared test samples (prepared with the
/// run's prep config); the classifier's samples are additionally filtered
/// against its training vocabulary, with the removals reported. Failures are
/// reported per row, never fatal for the table.
inline std::vector<CompareRow> compare_models(const UserProfile& profile,
                                              const TrainingConfig& base, int jobs = 1) {
  const ModelKind kinds[] = {ModelKind::Mfnv, ModelKind::Markov, ModelKind::ClassifierRnn,
                             ModelKind::RegressorRnn};
  auto [train_events, test_events] = split_train_test(profile.events, base.split);
  (void)train_events;
  const PreparedDataset shared = prepare(test_events, base.prep, profile.user_id);

  std::vector<CompareRow> rows(4);
  auto run_row = [&](std::size_t i) {
    CompareRow row;
    row.model = to_string(kinds[i]);
    try {
      PersistedModel model;
      switch (kinds[i]) {
        case ModelKind::Mfnv:
        case ModelKind::Markov: model = train_baseline(profile, kinds[i], base); break;
        case ModelKind::ClassifierRnn: model = train_classifier(profile, base); break;
        case ModelKind::RegressorRnn: model = train_regressor(profile, base); break;
      }
      EvaluationReport rep;
      if (kinds[i] == ModelKind::ClassifierRnn) {
        std::set<std::string> known(model.vocabulary.begin(), model.vocabulary.end());
        const auto filtered = filter_unknown(shared, known);
        rep = evaluate(model, filtered.kept, filtered.removed, /*enforce_prep=*/false);
      } else {
        rep = evaluate(model, shared, 0, /*enforce_prep=*/false);
      }
      row.ok = true;
      row.mean_m = rep.mean_m;
      row.median_m = rep.median_m;
      row.max_m = rep.max_m;
      row.samples = rep.samples;
      row.removed_unknown = rep.removed_unknown;
      row.label_accuracy = rep.label_accuracy();
      row.has_labels = rep.has_labels;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows[i] = std::move(row);
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int n = std::min<int>(jobs, 4);
    for (int i = 0; i < n; ++i)
      workers.emplace_back([&] {
        for (std::size_t idx = next.fetch_add(1); idx < rows.size(); idx = next.fetch_add(1))
          run_row(idx);
      });
    for (auto& th : workers) th.join();
  }
  return rows;
}

inline std::string format_compare(const std::vector<CompareRow>& rows) {
  std::string out =
      "model,mean_error_m,median_error_m,max_error_m,samples,removed_unknown,label_accuracy,"
      "error\n";
  for (const auto& r : rows) {
    out += r.model + ",";
    if (r.ok) {
      out += format_double(r.mean_m) + "," + format_double(r.median_m) + "," +
             format_double(r.max_m) + "," + std::to_string(r.samples) + "," +
             std::to_string(r.removed_unknown) + ",";
      out += r.has_labels ? format_double(r.label_accuracy) : std::string("NA");
      out += ",";
    } else {
      out += "NA,NA,NA,0,0,NA," + r.error;
    }
    out.push_back('\n');
  }
  return out;
}

/// Per-sample prediction trace plus a line-geometry file for map overlays.
inline std::string format_trace(const PersistedModel& model, const PreparedDataset& test) {
  std::string out = "history_len,target_lat,target_lon,pred_lat,pred_lon,distance_m\n";
  for (const auto& s : test.samples) {
    const auto [plat, plon] = predict_next(model, s.input);
    const double d = haversine_m(plat, plon, s.target.lat, s.target.lon);
    out += std::to_string(s.input.size()) + "," + format_double(s.target.lat) + "," +
           format_double(s.target.lon) + "," + format_double(plat) + "," + format_double(plon) +
           "," + format_double(d) + "\n";
  }
  return out;
}

inline std::string format_lines(const PersistedModel& model, const PreparedDataset& test) {
  std::string out = "kind,order,lat,lon\n";
  std::size_t i = 0;
  for (const auto& s : test.samples) {
    out += "actual," + std::to_string(i) + "," + format_double(s.target.lat) + "," +
           format_double(s.target.lon) + "\n";
    ++i;
  }
  i = 0;
  for (const auto& s : test.samples) {
    const auto [plat, plon] = predict_next(model, s.input);
    out += "predicted," + std::to_string(i) + "," + format_double(plat) + "," +
           format_double(plon) + "\n";
    ++i;
  }
  return out;
}

inline std::string format_report(const EvaluationReport& r) {
  std::string out = "key,value\n";
  out += "model," + r.model_kind + "\n";
  out += "samples," + std::to_string(r.samples) + "\n";
  out += "removed_unknown," + std::to_string(r.removed_unknown) + "\n";
  out += "mean_error_m," + format_double(r.mean_m) + "\n";
  out += "median_error_m," + format_double(r.median_m) + "\n";
  out += "max_error_m," + format_double(r.max_m) + "\n";
  if (r.has_labels) out += "label_accuracy," + format_double(r.label_accuracy()) + "\n";
  return out;
}

inline std::string format_curve(const ThresholdCurve& curve) {
  std::string out = "threshold_m,accuracy\n";
  for (const auto& [d, acc] : curve.points)
    out += format_double(d) + "," + format_double(acc) + "\n";
  return out;
}

}  // namespace cdrkit

#endif  // CDRKIT_EVALUATION_HPP
