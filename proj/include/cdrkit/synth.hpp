#ifndef CDRKIT_SYNTH_HPP
#define CDRKIT_SYNTH_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdrkit/rng.hpp"
#include "cdrkit/text.hpp"
#include "cdrkit/types.hpp"

namespace cdrkit {

struct SynthTower {
  double lat = 0.0;
  double lon = 0.0;
};

enum class RoutePolicy { Alternate, RandomPerDay, Fixed };

inline const char* to_string(RoutePolicy p) {
  switch (p) {
    case RoutePolicy::Alternate: return "alternate";
    case RoutePolicy::RandomPerDay: return "random";
    case RoutePolicy::Fixed: return "fixed";
  }
  return "?";
}

/// A reproducible commuter: home anchor, a work anchor served by a small
/// tower cluster (serving cell per call is drawn from it, the way dense urban
/// deployments hand calls between neighbouring cells), one or more routes of
/// intermediate towers, weekday departure/return schedule with jitter, call
/// arrivals while stationary, and per-passage skip noise while moving.
struct CommuterSpec {
  std::string user_id = "09120000001";
  SynthTower home{35.650, 51.250};
  std::vector<SynthTower> work_cluster{{35.760, 51.420}, {35.715, 51.395}, {35.715, 51.445}};
  std::vector<std::vector<SynthTower>> routes{{{35.700, 51.320}}, {{35.650, 51.330}}};
  RoutePolicy policy = RoutePolicy::Alternate;
  bool work_serving_random = true;  // false -> always the first cluster tower

  int days = 30;
  bool weekends_at_home = false;  // true -> Saturday/Sunday spent at home
  int depart_second = 8 * 3600;
  int return_second = 17 * 3600 + 1800;
  int jitter_seconds = 0;
  int leg_seconds = 300;  // travel time between adjacent towers

  double stationary_rate_per_hour = 1.0;
  double moving_extra_rate_per_hour = 0.0;  // extra same-tower calls during a passage
  double skip_probability = 0.0;            // chance a passage goes unobserved

  std::int64_t start_epoch = 1704067200;  // a Monday, 00:00 UTC
  std::int64_t mcc = 432;
  std::int64_t mnc = 35;
  std::uint64_t seed = 42;

  void validate() const {
    if (days < 1) throw Error("synth: days must be >= 1");
    if (routes.empty()) throw Error("synth: at least one route required");
    if (work_cluster.empty()) throw Error("synth: work cluster must not be empty");
    if (stationary_rate_per_hour < 0 || moving_extra_rate_per_hour < 0)
      throw Error("synth: rates must be >= 0");
    if (skip_probability < 0 || skip_probability > 1)
      throw Error("synth: skip probability must be in [0, 1]");
    if (jitter_seconds < 0) throw Error("synth: jitter must be >= 0");
    if (leg_seconds < 1) throw Error("synth: leg seconds must be >= 1");
  }
};

struct SynthOutput {
  std::vector<CdrRecord> records;  // time-ordered, strictly increasing timestamps
  std::vector<CellSite> sites;
};

namespace synth_detail {

struct TimedCall {
  std::int64_t t;
  std::size_t tower;
};

}  // namespace synth_detail

/// Deterministic for a seed. Stationary periods emit repeated same-tower
/// records (the redundancy stay-collapse exists to remove); records are
/// sparse and irregular because only call arrivals are observed.
inline SynthOutput generate(const CommuterSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // tower registry: 0 = home, then the work cluster, then route towers.
  // Exactly coincident coordinates reuse one site, so a route may pass
  // through a tower that also serves an anchor.
  std::vector<SynthTower> towers;
  std::map<std::pair<double, double>, std::size_t> by_coords;
  auto intern = [&](const SynthTower& t) {
    auto [it, fresh] = by_coords.emplace(std::make_pair(t.lat, t.lon), towers.size());
    if (fresh) towers.push_back(t);
    return it->second;
  };
  intern(spec.home);
  std::vector<std::size_t> work_idx;
  for (const auto& t : spec.work_cluster) work_idx.push_back(intern(t));
  std::vector<std::vector<std::size_t>> route_idx;
  for (const auto& route : spec.routes) {
    std::vector<std::size_t> idx;
    for (const auto& t : route) idx.push_back(intern(t));
    route_idx.push_back(std::move(idx));
  }

  std::vector<synth_detail::TimedCall> calls;
  const double per_sec = spec.stationary_rate_per_hour / 3600.0;

  auto emit_stationary = [&](std::int64_t from, std::int64_t to, bool at_work) {
    if (per_sec <= 0.0 || to <= from) return;
    double t = static_cast<double>(from) + rng.exponential(per_sec);
    while (t < static_cast<double>(to)) {
      std::size_t tower = 0;
      if (at_work)
        tower = work_idx[spec.work_serving_random && work_idx.size() > 1
                             ? rng.below(work_idx.size())
                             : 0];
      calls.push_back({static_cast<std::int64_t>(t), tower});
      t += rng.exponential(per_sec);
    }
  };

  auto emit_passage = [&](std::int64_t at, std::size_t tower) {
    const bool skipped = rng.bernoulli(spec.skip_probability);
    const int extras =
        rng.poisson(spec.moving_extra_rate_per_hour * spec.leg_seconds / 3600.0);
    if (skipped) return;
    calls.push_back({at, tower});
    for (int e = 0; e < extras; ++e)
      calls.push_back({at + static_cast<std::int64_t>(rng.uniform(1.0, spec.leg_seconds + 1.0)),
                       tower});
  };

  std::int64_t home_since = spec.start_epoch;
  int commute_counter = 0;
  for (int day = 0; day < spec.days; ++day) {
    const std::int64_t day_start = spec.start_epoch + static_cast<std::int64_t>(day) * 86400;
    const bool weekday = day % 7 < 5;  // horizon starts on a Monday
    if (!weekday && spec.weekends_at_home) continue;

    std::size_t route = 0;
    switch (spec.policy) {
      case RoutePolicy::Alternate: route = commute_counter % route_idx.size(); break;
      case RoutePolicy::RandomPerDay: route = rng.below(route_idx.size()); break;
      case RoutePolicy::Fixed: route = 0; break;
    }
    ++commute_counter;
    const auto& legs = route_idx[route];

    std::int64_t depart = day_start + spec.depart_second;
    std::int64_t back = day_start + spec.return_second;
    if (spec.jitter_seconds > 0) {
      depart += static_cast<std::int64_t>(
          rng.uniform(-double(spec.jitter_seconds), double(spec.jitter_seconds)));
      back += static_cast<std::int64_t>(
          rng.uniform(-double(spec.jitter_seconds), double(spec.jitter_seconds)));
    }

    emit_stationary(home_since, depart, false);
    std::int64_t t = depart;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      t += spec.leg_seconds;
      emit_passage(t, legs[i]);
    }
    const std::int64_t work_arrive = t + spec.leg_seconds;
    emit_stationary(work_arrive, back, true);
    t = back;
    for (std::size_t i = legs.size(); i-- > 0;) {
      t += spec.leg_seconds;
      emit_passage(t, legs[i]);
    }
    home_since = t + spec.leg_seconds;
  }
  emit_stationary(home_since, spec.start_epoch + static_cast<std::int64_t>(spec.days) * 86400,
                  false);

  if (calls.empty()) throw InsufficientDataError("synth: spec produced no records");

  std::stable_sort(calls.begin(), calls.end(),
                   [](const synth_detail::TimedCall& a, const synth_detail::TimedCall& b) {
                     return a.t < b.t;
                   });
  for (std::size_t i = 1; i < calls.size(); ++i)
    if (calls[i].t <= calls[i - 1].t) calls[i].t = calls[i - 1].t + 1;

  SynthOutput out;
  out.sites.reserve(towers.size());
  for (std::size_t i = 0; i < towers.size(); ++i) {
    CellSite s;
    s.mcc = spec.mcc;
    s.mnc = spec.mnc;
    s.lac = 100 + static_cast<std::int64_t>(i) / 16;
    s.cell = 500 + static_cast<std::int64_t>(i);
    s.lat = towers[i].lat;
    s.lon = towers[i].lon;
    out.sites.push_back(s);
  }
  out.records.reserve(calls.size());
  for (const auto& call : calls) {
    CdrRecord r;
    r.user_id = spec.user_id;
    r.timestamp = call.t;
    r.mcc = spec.mcc;
    r.mnc = spec.mnc;
    r.lac = out.sites[call.tower].lac;
    r.cell = out.sites[call.tower].cell;
    out.records.push_back(std::move(r));
  }
  return out;
}

/// The exact CDR file format consumed by ingest.
inline std::string format_cdr_file(const std::vector<CdrRecord>& records, char delim = ',') {
  std::string out = "user_id,date,time,mcc,mnc,lac,cell\n";
  if (delim != ',')
    out = join_fields({"user_id", "date", "time", "mcc", "mnc", "lac", "cell"}, delim) + "\n";
  for (const auto& r : records) {
    const std::int64_t ts = r.timestamp.value_or(0);
    const std::int64_t days = ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
    const std::int64_t sec = ts - days * 86400;
    // civil date from days since epoch (Howard Hinnant's algorithm)
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    const std::int64_t year = y + (m <= 2);

    char date[32], time[32];
    std::snprintf(date, sizeof date, "%04lld-%02u-%02u", static_cast<long long>(year), m, d);
    std::snprintf(time, sizeof time, "%02lld:%02lld:%02lld", static_cast<long long>(sec / 3600),
                  static_cast<long long>(sec / 60 % 60), static_cast<long long>(sec % 60));
    std::vector<std::string> fields{r.user_id,
                                    date,
                                    time,
                                    r.mcc ? std::to_string(*r.mcc) : "",
                                    r.mnc ? std::to_string(*r.mnc) : "",
                                    r.lac ? std::to_string(*r.lac) : "",
                                    r.cell ? std::to_string(*r.cell) : ""};
    out += join_fields(fields, delim) + "\n";
  }
  return out;
}

inline std::string format_cells_file(const std::vector<CellSite>& sites, char delim = ',') {
  std::string out = join_fields({"mcc", "mnc", "lac", "cell", "lat", "lon"}, delim) + "\n";
  for (const auto& s : sites) {
    std::vector<std::string> fields{std::to_string(s.mcc),  std::to_string(s.mnc),
                                    std::to_string(s.lac),  std::to_string(s.cell),
                                    format_double(s.lat), format_double(s.lon)};
    out += join_fields(fields, delim) + "\n";
  }
  return out;
}

}  // namespace cdrkit

#endif  // CDRKIT_SYNTH_HPP
