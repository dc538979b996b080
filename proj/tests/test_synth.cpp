#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <cdrkit/ingest.hpp>
#include <cdrkit/prep.hpp>
#include <cdrkit/synth.hpp>

#include "test_util.hpp"

using namespace cdrkit;

namespace {

// labels per calendar day with runs collapsed, for pattern checks
std::vector<std::vector<std::string>> daily_label_runs(const SynthOutput& out,
                                                       const CommuterSpec& spec) {
  auto table = build_cell_table(out.sites);
  std::vector<std::vector<std::string>> days(spec.days);
  for (const auto& r : out.records) {
    auto ev = resolve_location(r, table);
    REQUIRE(ev.has_value());
    const auto day = (ev->t - spec.start_epoch) / 86400;
    if (day < 0 || day >= spec.days) continue;
    auto& seq = days[static_cast<std::size_t>(day)];
    if (seq.empty() || seq.back() != ev->label) seq.push_back(ev->label);
  }
  return days;
}

}  // namespace

TEST_CASE("generator is deterministic and time-ordered") {
  CommuterSpec spec;
  spec.days = 10;
  spec.seed = 21;
  spec.skip_probability = 0.15;
  spec.policy = RoutePolicy::RandomPerDay;
  spec.jitter_seconds = 600;

  auto a = generate(spec);
  auto b = generate(spec);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(content_equal(a.records[i], b.records[i]));

  for (std::size_t i = 1; i < a.records.size(); ++i)
    CHECK(*a.records[i].timestamp > *a.records[i - 1].timestamp);

  // every emitted tower exists in the site table
  auto table = build_cell_table(a.sites);
  for (const auto& r : a.records) CHECK(resolve_location(r, table).has_value());

  CommuterSpec other = spec;
  other.seed = 22;
  auto c = generate(other);
  bool differs = c.records.size() != a.records.size();
  for (std::size_t i = 0; !differs && i < a.records.size(); ++i)
    differs = !content_equal(a.records[i], c.records[i]);
  CHECK(differs);
}

TEST_CASE("noiseless single-route corpus walks the exact route every day") {
  CommuterSpec spec;
  spec.days = 5;
  spec.policy = RoutePolicy::Fixed;
  spec.work_serving_random = false;
  spec.skip_probability = 0.0;
  spec.moving_extra_rate_per_hour = 0.0;
  spec.stationary_rate_per_hour = 6.0;  // dense enough that every period is observed
  spec.routes = {{{35.700, 51.320}, {35.720, 51.360}}};
  auto out = generate(spec);

  auto table = build_cell_table(out.sites);
  const std::string home = make_location_label(out.sites[0].lac, out.sites[0].cell);
  const std::string work = make_location_label(out.sites[1].lac, out.sites[1].cell);
  const std::string r1 = make_location_label(out.sites[4].lac, out.sites[4].cell);
  const std::string r2 = make_location_label(out.sites[5].lac, out.sites[5].cell);

  const auto days = daily_label_runs(out, spec);
  for (const auto& day : days) {
    REQUIRE(day.size() == 7);
    CHECK(day[0] == home);
    CHECK(day[1] == r1);
    CHECK(day[2] == r2);
    CHECK(day[3] == work);
    CHECK(day[4] == r2);
    CHECK(day[5] == r1);
    CHECK(day[6] == home);
  }
}

TEST_CASE("alternate policy visit counts match per-day arithmetic") {
  CommuterSpec spec;
  spec.days = 30;
  spec.policy = RoutePolicy::Alternate;
  spec.skip_probability = 0.0;
  spec.moving_extra_rate_per_hour = 0.0;
  // two single-tower routes
  spec.routes = {{{35.700, 51.320}}, {{35.650, 51.330}}};
  auto out = generate(spec);

  std::map<std::string, std::size_t> per_tower;
  auto table = build_cell_table(out.sites);
  for (const auto& r : out.records) per_tower[resolve_location(r, table)->label] += 1;

  const std::string route_a = make_location_label(out.sites[4].lac, out.sites[4].cell);
  const std::string route_b = make_location_label(out.sites[5].lac, out.sites[5].cell);
  // route tower is passed twice per commute day that uses it; days alternate
  CHECK(per_tower[route_a] == 2u * 15u);
  CHECK(per_tower[route_b] == 2u * 15u);
}

TEST_CASE("skip-free corpora collapse to the planted trajectory") {
  CommuterSpec spec;
  spec.days = 4;
  spec.policy = RoutePolicy::Fixed;
  spec.work_serving_random = false;
  spec.skip_probability = 0.0;
  spec.stationary_rate_per_hour = 8.0;
  auto out = generate(spec);
  auto table = build_cell_table(out.sites);

  std::vector<LocationEvent> events;
  for (const auto& r : out.records) events.push_back(*resolve_location(r, table));

  // the settled-trip view starts each trip at the departure anchor and ends at
  // the arrival anchor
  auto ds = prep_method3(events, 3600);
  const std::string home = make_location_label(out.sites[0].lac, out.sites[0].cell);
  const std::string work = make_location_label(out.sites[1].lac, out.sites[1].cell);
  std::size_t anchored = 0;
  for (const auto& s : ds.samples) {
    CHECK((s.target.label == home || s.target.label == work));
    anchored += (s.input.front().label == home || s.input.front().label == work) ? 1 : 0;
  }
  CHECK(anchored == ds.samples.size());  // trips run anchor to anchor
  CHECK(ds.samples.size() >= 2 * 4 - 1);
}

TEST_CASE("stationary record volume follows the configured rate") {
  // mean daily stationary calls ~ rate * stationary hours; average over seeds
  // stays within 3 sigma of the analytic expectation
  CommuterSpec base;
  base.days = 7;
  base.policy = RoutePolicy::Fixed;
  base.skip_probability = 1.0;  // suppress passage records entirely
  base.stationary_rate_per_hour = 2.0;

  double total = 0.0;
  const int n_seeds = 100;
  for (int s = 0; s < n_seeds; ++s) {
    CommuterSpec spec = base;
    spec.seed = 1000 + static_cast<std::uint64_t>(s);
    total += static_cast<double>(generate(spec).records.size());
  }
  const double mean_obs = total / n_seeds;

  // stationary time = full horizon minus travel (4 legs of 300 s per day)
  const double hours = (7 * 86400 - 7 * 4 * 300) / 3600.0;
  const double lambda = base.stationary_rate_per_hour * hours;
  const double sigma = std::sqrt(lambda / n_seeds);  // sd of the mean
  CHECK(std::abs(mean_obs - lambda) <= 3.0 * sigma);
}

TEST_CASE("a spec that can produce no records errors") {
  CommuterSpec spec;
  spec.days = 2;
  spec.stationary_rate_per_hour = 0.0;
  spec.skip_probability = 1.0;
  CHECK_THROWS_AS(generate(spec), InsufficientDataError);
}

TEST_CASE("generated files are valid ingest input") {
  testutil::TempDir dir("synthio");
  CommuterSpec spec;
  spec.days = 3;
  auto out = generate(spec);
  testutil::write_file(dir.file("cdr.csv"), format_cdr_file(out.records));
  testutil::write_file(dir.file("cells.csv"), format_cells_file(out.sites));
  auto res = ingest(dir.file("cdr.csv"), dir.file("cells.csv"));
  CHECK(res.summary.parse_rejects == 0);
  CHECK(res.summary.unresolved == 0);
  CHECK(res.summary.events == out.records.size());
  REQUIRE(res.profiles.size() == 1);
  CHECK(res.profiles[0].user_id == "989120000001");
}
