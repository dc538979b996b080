#ifndef CDRKIT_BASELINES_HPP
#define CDRKIT_BASELINES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdrkit/types.hpp"

namespace cdrkit {

/// Successor statistics for one context. last_pos is the position of the most
/// recent training transition producing this successor; ties in count break
/// toward the more recently observed label, then the lexicographically
/// smaller one, so predictions are reproducible.
struct NextStat {
  std::uint64_t count = 0;
  std::uint64_t last_pos = 0;
};

using NextCounts = std::map<std::string, NextStat>;

namespace detail {

inline const std::string* argmax_next(const NextCounts& dist) {
  const std::string* best = nullptr;
  const NextStat* bs = nullptr;
  for (const auto& [label, stat] : dist) {
    if (!best || stat.count > bs->count ||
        (stat.count == bs->count && stat.last_pos > bs->last_pos)) {
      best = &label;
      bs = &stat;
    }
    // equal count and recency keeps the earlier (smaller) label: map order
  }
  return best;
}

inline std::vector<std::vector<std::string>> to_labels(
    const std::vector<std::vector<LocationEvent>>& seqs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) {
    std::vector<std::string> labels;
    labels.reserve(s.size());
    for (const auto& ev : s) labels.push_back(ev.label);
    out.push_back(std::move(labels));
  }
  return out;
}

}  // namespace detail

/// Per-location table of next-visit frequencies, plus the global successor
/// table used as the fallback for locations never seen as a context.
struct FrequencyTable {
  std::map<std::string, NextCounts> table;
  NextCounts global;
  std::uint64_t transitions = 0;
};

/// Count every adjacent pair inside each training subsequence; pairs never
/// cross subsequence boundaries.
inline FrequencyTable fit_mfnv(const std::vector<std::vector<std::string>>& train) {
  FrequencyTable ft;
  std::uint64_t pos = 0;
  for (const auto& seq : train) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      ++pos;
      auto& stat = ft.table[seq[i]][seq[i + 1]];
      ++stat.count;
      stat.last_pos = pos;
      auto& g = ft.global[seq[i + 1]];
      ++g.count;
      g.last_pos = pos;
      ++ft.transitions;
    }
  }
  if (ft.transitions == 0) throw InsufficientDataError("fit_mfnv: no transitions in training data");
  return ft;
}

inline FrequencyTable fit_mfnv(const std::vector<std::vector<LocationEvent>>& train) {
  return fit_mfnv(detail::to_labels(train));
}

/// Most frequent next label after `current`; the globally most frequent
/// successor when `current` was never seen as a context.
inline std::string predict_mfnv(const FrequencyTable& ft, const std::string& current) {
  if (ft.table.empty()) throw Error("predict_mfnv: empty table");
  auto it = ft.table.find(current);
  const NextCounts& dist = it != ft.table.end() ? it->second : ft.global;
  return *detail::argmax_next(dist);
}

/// Markov chain over the last k visited labels. States of every order
/// 1..k are kept so an unseen state can back off to a shorter context,
/// bottoming out at the global successor table.
struct MarkovModel {
  int order = 1;
  std::vector<std::map<std::string, NextCounts>> by_order;  // index o-1 -> order-o states
  NextCounts global;
  std::uint64_t transitions = 0;

  /// Normalized next-label distribution of one state, summing to 1.
  static std::map<std::string, double> distribution(const NextCounts& counts) {
    std::uint64_t total = 0;
    for (const auto& [label, stat] : counts) total += stat.count;
    std::map<std::string, double> probs;
    for (const auto& [label, stat] : counts)
      probs[label] = static_cast<double>(stat.count) / static_cast<double>(total);
    return probs;
  }
};

namespace detail {

inline std::string state_key(const std::vector<std::string>& labels, std::size_t first,
                             std::size_t count) {
  std::string key;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) key.push_back('\x1f');
    key += labels[first + i];
  }
  return key;
}

}  // namespace detail

inline MarkovModel fit_markov(const std::vector<std::vector<std::string>>& train, int order) {
  if (order < 1) throw Error("fit_markov: order must be >= 1");
  MarkovModel m;
  m.order = order;
  m.by_order.resize(static_cast<std::size_t>(order));
  std::uint64_t pos = 0;
  for (const auto& seq : train) {
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      ++pos;
      auto& g = m.global[seq[i + 1]];
      ++g.count;
      g.last_pos = pos;
      ++m.transitions;
      for (int o = 1; o <= order; ++o) {
        if (i + 1 < static_cast<std::size_t>(o)) break;
        const std::size_t first = i + 1 - static_cast<std::size_t>(o);
        auto& stat = m.by_order[o - 1][detail::state_key(seq, first, o)][seq[i + 1]];
        ++stat.count;
        stat.last_pos = pos;
      }
    }
  }
  if (m.transitions == 0)
    throw InsufficientDataError("fit_markov: no state with a successor");
  return m;
}

inline MarkovModel fit_markov(const std::vector<std::vector<LocationEvent>>& train, int order) {
  return fit_markov(detail::to_labels(train), order);
}

/// Argmax next label for the last k history labels, backing off through
/// shorter contexts when the state was never observed.
inline std::string predict_markov(const MarkovModel& m, const std::vector<std::string>& history) {
  if (m.transitions == 0) throw Error("predict_markov: empty model");
  if (history.empty()) throw Error("predict_markov: empty history");
  int o = std::min<int>(m.order, static_cast<int>(history.size()));
  for (; o >= 1; --o) {
    const auto key =
        detail::state_key(history, history.size() - static_cast<std::size_t>(o),
                          static_cast<std::size_t>(o));
    const auto& states = m.by_order[o - 1];
    auto it = states.find(key);
    if (it != states.end()) return *detail::argmax_next(it->second);
  }
  return *detail::argmax_next(m.global);
}

/// Meter-denominated comparison needs coordinates: map the predicted label
/// onto its tower. Every trained label has coordinates by construction.
inline std::pair<double, double> baseline_predict_coords(
    const std::string& predicted_label,
    const std::map<std::string, std::pair<double, double>>& label_coords) {
  auto it = label_coords.find(predicted_label);
  if (it == label_coords.end())
    throw Error("baseline_predict_coords: label without coordinates: " + predicted_label);
  return it->second;
}

}  // namespace cdrkit

#endif  // CDRKIT_BASELINES_HPP
