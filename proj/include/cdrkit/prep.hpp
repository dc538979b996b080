#ifndef CDRKIT_PREP_HPP
#define CDRKIT_PREP_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "cdrkit/text.hpp"
#include "cdrkit/types.hpp"

namespace cdrkit {

enum class PrepMethod { M1, M2, M3, M4 };

inline const char* to_string(PrepMethod m) {
  switch (m) {
    case PrepMethod::M1: return "m1";
    case PrepMethod::M2: return "m2";
    case PrepMethod::M3: return "m3";
    case PrepMethod::M4: return "m4";
  }
  return "?";
}

/// Preparation hyperparameters. `w` is the window length in events (m2/m4),
/// `t` the settlement/gap timespan in seconds (m3/m4). The same `t` serves
/// both the stay-collapse and the gap-slice roles unless t_settle/t_gap
/// override it separately.
struct PrepConfig {
  PrepMethod method = PrepMethod::M3;
  int w = 0;
  std::int64_t t = 0;
  std::int64_t t_settle = 0;  // 0 -> use t
  std::int64_t t_gap = 0;     // 0 -> use t

  std::int64_t settle_timespan() const { return t_settle > 0 ? t_settle : t; }
  std::int64_t gap_timespan() const { return t_gap > 0 ? t_gap : t; }

  bool uses_w() const { return method == PrepMethod::M2 || method == PrepMethod::M4; }
  bool uses_t() const { return method == PrepMethod::M3 || method == PrepMethod::M4; }

  void validate() const {
    if (uses_w() && w < 2) throw Error("prep: w must be >= 2 for m2/m4");
    if (uses_t() && settle_timespan() <= 0)
      throw Error("prep: t must be > 0 for m3/m4");
  }

  friend bool operator==(const PrepConfig&, const PrepConfig&) = default;
};

struct Sample {
  std::vector<LocationEvent> input;  // non-empty, strictly precedes target
  LocationEvent target;
};

struct PreparedDataset {
  std::vector<Sample> samples;  // chronological in their targets
  PrepConfig config;
  std::string source_user;
  std::size_t dropped_singletons = 0;  // length-1 subsequences with no formable target
};

/// Every input has length 1: sample i is ([seq_i], seq_{i+1}).
inline PreparedDataset prep_method1(const std::vector<LocationEvent>& seq) {
  if (seq.size() < 2) throw InsufficientDataError("m1 needs at least 2 events");
  PreparedDataset out;
  out.config.method = PrepMethod::M1;
  out.samples.reserve(seq.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    out.samples.push_back({{seq[i]}, seq[i + 1]});
  return out;
}

/// Fixed window of length w shifted one step at a time: n-w+1 samples,
/// inputs of length w-1 with the window's final event as target.
inline PreparedDataset prep_method2(const std::vector<LocationEvent>& seq, int w) {
  if (w < 2) throw Error("m2: w must be >= 2");
  if (seq.size() < static_cast<std::size_t>(w))
    throw InsufficientDataError("m2 needs at least w events");
  PreparedDataset out;
  out.config.method = PrepMethod::M2;
  out.config.w = w;
  const std::size_t n = seq.size(), uw = static_cast<std::size_t>(w);
  out.samples.reserve(n - uw + 1);
  for (std::size_t i = 0; i + uw <= n; ++i) {
    Sample s;
    s.input.assign(seq.begin() + i, seq.begin() + i + uw - 1);
    s.target = seq[i + uw - 1];
    out.samples.push_back(std::move(s));
  }
  return out;
}

/// Collapse each maximal run of consecutive same-label events to its first
/// and last occurrence when the dwell spans at least t seconds, else to the
/// first occurrence only. A zero-length dwell counts as shorter than t.
inline std::vector<LocationEvent> collapse_stays(const std::vector<LocationEvent>& seq,
                                                 std::int64_t t) {
  if (t <= 0) throw Error("collapse_stays: t must be > 0");
  std::vector<LocationEvent> out;
  std::size_t i = 0;
  while (i < seq.size()) {
    std::size_t j = i;
    while (j + 1 < seq.size() && seq[j + 1].label == seq[i].label) ++j;
    out.push_back(seq[i]);
    if (j > i && seq[j].t - seq[i].t >= t) out.push_back(seq[j]);
    i = j + 1;
  }
  return out;
}

/// Split after every event whose successor is more than t seconds away.
/// The pieces concatenate back to the input; none is empty.
inline std::vector<std::vector<LocationEvent>> slice_by_gap(const std::vector<LocationEvent>& seq,
                                                            std::int64_t t) {
  if (t <= 0) throw Error("slice_by_gap: t must be > 0");
  std::vector<std::vector<LocationEvent>> out;
  std::vector<LocationEvent> cur;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    cur.push_back(seq[i]);
    const bool gap = i + 1 < seq.size() && seq[i + 1].t - seq[i].t > t;
    if (gap) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace detail {

/// Stay-collapse then gap-slice; the raw trajectory pieces of m3/m4.
inline std::vector<std::vector<LocationEvent>> segment(const std::vector<LocationEvent>& seq,
                                                       std::int64_t t_settle, std::int64_t t_gap) {
  return slice_by_gap(collapse_stays(seq, t_settle), t_gap);
}

}  // namespace detail

/// Settlement-time collapse plus gap slicing; each resulting piece of length
/// >= 2 yields one sample (all-but-last -> last). Length-1 pieces carry no
/// target and are dropped (counted in dropped_singletons).
inline PreparedDataset prep_method3(const std::vector<LocationEvent>& seq, std::int64_t t_settle,
                                    std::int64_t t_gap) {
  if (seq.size() < 2) throw InsufficientDataError("m3 needs at least 2 events");
  PreparedDataset out;
  out.config.method = PrepMethod::M3;
  out.config.t = t_settle;
  out.config.t_settle = t_settle;
  out.config.t_gap = t_gap;
  for (auto& piece : detail::segment(seq, t_settle, t_gap)) {
    if (piece.size() < 2) {
      ++out.dropped_singletons;
      continue;
    }
    Sample s;
    s.target = piece.back();
    piece.pop_back();
    s.input = std::move(piece);
    out.samples.push_back(std::move(s));
  }
  if (out.samples.empty())
    throw InsufficientDataError("m3: no subsequence of length >= 2");
  return out;
}

inline PreparedDataset prep_method3(const std::vector<LocationEvent>& seq, std::int64_t t) {
  return prep_method3(seq, t, t);
}

/// Hybrid of m3 and m2: trajectory pieces no longer than w stay intact (one
/// sample each); longer pieces are re-cut with the fixed window so that no
/// input exceeds w-1 events.
inline PreparedDataset prep_method4(const std::vector<LocationEvent>& seq, std::int64_t t_settle,
                                    std::int64_t t_gap, int w) {
  if (w < 2) throw Error("m4: w must be >= 2");
  if (seq.size() < 2) throw InsufficientDataError("m4 needs at least 2 events");
  PreparedDataset out;
  out.config.method = PrepMethod::M4;
  out.config.w = w;
  out.config.t = t_settle;
  out.config.t_settle = t_settle;
  out.config.t_gap = t_gap;
  for (auto& piece : detail::segment(seq, t_settle, t_gap)) {
    if (piece.size() < 2) {
      ++out.dropped_singletons;
      continue;
    }
    if (piece.size() <= static_cast<std::size_t>(w)) {
      Sample s;
      s.target = piece.back();
      piece.pop_back();
      s.input = std::move(piece);
      out.samples.push_back(std::move(s));
    } else {
      auto windows = prep_method2(piece, w);
      for (auto& s : windows.samples) out.samples.push_back(std::move(s));
    }
  }
  if (out.samples.empty())
    throw InsufficientDataError("m4: no subsequence of length >= 2");
  return out;
}

inline PreparedDataset prep_method4(const std::vector<LocationEvent>& seq, std::int64_t t, int w) {
  return prep_method4(seq, t, t, w);
}

/// Dispatch on the configured method.
inline PreparedDataset prepare(const std::vector<LocationEvent>& seq, const PrepConfig& config,
                               const std::string& source_user = {}) {
  config.validate();
  PreparedDataset out;
  switch (config.method) {
    case PrepMethod::M1: out = prep_method1(seq); break;
    case PrepMethod::M2: out = prep_method2(seq, config.w); break;
    case PrepMethod::M3:
      out = prep_method3(seq, config.settle_timespan(), config.gap_timespan());
      break;
    case PrepMethod::M4:
      out = prep_method4(seq, config.settle_timespan(), config.gap_timespan(), config.w);
      break;
  }
  out.config = config;
  out.source_user = source_user;
  return out;
}

/// Chronological split: first ceil(ratio*n) items train, remainder test.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_test(const std::vector<T>& items,
                                                           double ratio) {
  if (items.empty()) throw InsufficientDataError("split: empty input");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split: ratio must be in (0, 1)");
  const auto k = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(items.size())));
  std::vector<T> train(items.begin(), items.begin() + k);
  std::vector<T> test(items.begin() + k, items.end());
  return {std::move(train), std::move(test)};
}

struct FilterResult {
  PreparedDataset kept;
  std::size_t removed = 0;
};

/// Drop test samples whose input or target mentions a label outside the
/// training vocabulary. Classification pipelines only; a regressor can place
/// its output anywhere, so no filtering applies there.
inline FilterResult filter_unknown(const PreparedDataset& test,
                                   const std::set<std::string>& known_labels) {
  if (known_labels.empty()) throw Error("filter_unknown: empty known-label set");
  FilterResult out;
  out.kept.config = test.config;
  out.kept.source_user = test.source_user;
  out.kept.dropped_singletons = test.dropped_singletons;
  for (const auto& s : test.samples) {
    bool ok = known_labels.count(s.target.label) > 0;
    for (const auto& ev : s.input)
      if (ok && known_labels.count(ev.label) == 0) ok = false;
    if (ok)
      out.kept.samples.push_back(s);
    else
      ++out.removed;
  }
  return out;
}

/// One sample per line for inspection: input events as t@label@lat@lon joined
/// by '|', a tab, then the target event. The in-memory form is authoritative.
inline std::string format_prepared(const PreparedDataset& ds) {
  std::string out = "input_events\ttarget\n";
  auto fmt_ev = [](const LocationEvent& e) {
    return std::to_string(e.t) + "@" + e.label + "@" + format_double(e.lat) + "@" +
           format_double(e.lon);
  };
  for (const auto& s : ds.samples) {
    for (std::size_t i = 0; i < s.input.size(); ++i) {
      if (i) out.push_back('|');
      out += fmt_ev(s.input[i]);
    }
    out.push_back('\t');
    out += fmt_ev(s.target);
    out.push_back('\n');
  }
  return out;
}

}  // namespace cdrkit

#endif  // CDRKIT_PREP_HPP
