#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <cdrkit/evaluation.hpp>
#include <cdrkit/geo.hpp>
#include <cdrkit/rng.hpp>

#include "test_util.hpp"

using namespace cdrkit;
using testutil::ev;

TEST_CASE("haversine fixed points") {
  CHECK(haversine_m(35.7, 51.4, 35.7, 51.4) == 0.0);

  // antipodal equator pair spans half the circumference
  const double half = std::numbers::pi * kEarthRadiusMeters;
  CHECK(std::abs(haversine_m(0.0, 0.0, 0.0, 180.0) - half) <= 1.0);

  // one degree of meridian arc
  const double arc = std::numbers::pi * kEarthRadiusMeters / 180.0;
  const double got = haversine_m(35.0, 51.0, 36.0, 51.0);
  CHECK(std::abs(got - arc) / arc <= 0.005);
  CHECK(got == doctest::Approx(111195.0).epsilon(0.005));
}

TEST_CASE("haversine is a metric in practice") {
  Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const double la = rng.uniform(-89.0, 89.0), lo = rng.uniform(-179.0, 179.0);
    const double lb = rng.uniform(-89.0, 89.0), lb2 = rng.uniform(-179.0, 179.0);
    const double lc = rng.uniform(-89.0, 89.0), lc2 = rng.uniform(-179.0, 179.0);
    const double ab = haversine_m(la, lo, lb, lb2);
    const double ba = haversine_m(lb, lb2, la, lo);
    const double ac = haversine_m(la, lo, lc, lc2);
    const double cb = haversine_m(lc, lc2, lb, lb2);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-6 * (ac + cb + 1.0));
  }
  // zero iff identical within floating tolerance
  CHECK(haversine_m(10.0, 20.0, 10.0, 20.0) == 0.0);
  CHECK(haversine_m(10.0, 20.0, 10.0, 20.0001) > 0.0);
}

namespace {

// a model that predicts one constant tower everywhere: mfnv fitted on a
// corpus whose every successor is that tower
PersistedModel constant_model(const std::string& label, double lat, double lon) {
  PersistedModel m;
  m.kind = ModelKind::Mfnv;
  m.mfnv = fit_mfnv(std::vector<std::vector<std::string>>{{label, label, label}});
  m.label_coords[label] = {lat, lon};
  return m;
}

PreparedDataset test_samples(const std::vector<LocationEvent>& targets, const PrepConfig& cfg) {
  PreparedDataset ds;
  ds.config = cfg;
  std::int64_t t = 0;
  for (const auto& target : targets) {
    Sample s;
    s.input.push_back(ev(t++, "C", 35.0, 51.0));
    s.target = target;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace

TEST_CASE("evaluate scores predictions in meters") {
  PersistedModel model = constant_model("C", 35.70, 51.40);

  SUBCASE("a predictor that always hits the target has zero error") {
    auto ds = test_samples({ev(100, "C", 35.70, 51.40), ev(200, "C", 35.70, 51.40)},
                           model.config.prep);
    auto rep = evaluate(model, ds);
    CHECK(rep.mean_m == 0.0);
    CHECK(rep.max_m == 0.0);
    CHECK(rep.exact_label_matches == 2);
    CHECK(rep.samples == 2);
  }

  SUBCASE("constant prediction equals the brute-force distance average") {
    Rng rng(2);
    std::vector<LocationEvent> targets;
    double sum = 0.0, mx = 0.0;
    std::vector<double> all;
    for (int i = 0; i < 101; ++i) {
      const double lat = rng.uniform(35.0, 36.0), lon = rng.uniform(51.0, 52.0);
      targets.push_back(ev(i, "T" + std::to_string(i), lat, lon));
      const double d = haversine_m(35.70, 51.40, lat, lon);
      all.push_back(d);
      sum += d;
      mx = std::max(mx, d);
    }
    auto rep = evaluate(model, test_samples(targets, model.config.prep));
    CHECK(rep.mean_m == doctest::Approx(sum / 101.0).epsilon(1e-9));
    CHECK(rep.max_m == doctest::Approx(mx).epsilon(1e-12));
    std::sort(all.begin(), all.end());
    CHECK(rep.median_m == doctest::Approx(all[50]).epsilon(1e-12));
  }

  SUBCASE("empty test set errors") {
    PreparedDataset empty;
    empty.config = model.config.prep;
    CHECK_THROWS_AS(evaluate(model, empty), InsufficientDataError);
  }

  SUBCASE("config mismatch errors") {
    auto ds = test_samples({ev(100, "C", 35.7, 51.4)}, PrepConfig{PrepMethod::M1, 0, 0, 0, 0});
    CHECK_THROWS_AS(evaluate(model, ds), Error);
  }
}

TEST_CASE("threshold_curve counts inclusive hits") {
  PersistedModel model = constant_model("C", 35.70, 51.40);

  SUBCASE("perfect predictor is 1 at every threshold") {
    auto rep = evaluate(model, test_samples({ev(1, "C", 35.7, 51.4), ev(2, "C", 35.7, 51.4)},
                                            model.config.prep));
    auto curve = threshold_curve(rep, {1.0, 100.0, 1000.0});
    for (const auto& [d, acc] : curve.points) CHECK(acc == 1.0);
  }

  SUBCASE("boundary is inclusive") {
    EvaluationReport rep;
    rep.distances_m = {500.0, 500.0, 500.0};
    rep.samples = 3;
    auto curve = threshold_curve(rep, {400.0, 500.0});
    CHECK(curve.points[0].second == 0.0);
    CHECK(curve.points[1].second == 1.0);
  }

  SUBCASE("random distances match a counting oracle and never decrease") {
    Rng rng(3);
    EvaluationReport rep;
    for (int i = 0; i < 500; ++i) rep.distances_m.push_back(rng.uniform(0.0, 10000.0));
    rep.samples = 500;
    std::vector<double> thresholds;
    for (double d = 250.0; d <= 10000.0; d += 250.0) thresholds.push_back(d);
    auto curve = threshold_curve(rep, thresholds);
    double prev = -1.0;
    for (const auto& [d, acc] : curve.points) {
      std::size_t cnt = 0;
      for (double dist : rep.distances_m)
        if (dist <= d) ++cnt;
      CHECK(acc == doctest::Approx(double(cnt) / 500.0).epsilon(1e-12));
      CHECK(acc >= prev);
      prev = acc;
    }
    CHECK(curve.points.back().second == doctest::Approx(1.0));  // max distance < 10 km
  }

  SUBCASE("unsorted or non-positive thresholds error") {
    EvaluationReport rep;
    rep.distances_m = {1.0};
    rep.samples = 1;
    CHECK_THROWS_AS(threshold_curve(rep, {-5.0}), Error);
    CHECK_THROWS_AS(threshold_curve(rep, {100.0, 50.0}), Error);
  }
}

TEST_CASE("argmin scan is invariant to constant shifts") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GridCell> cells;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      GridCell c;
      c.ok = !rng.bernoulli(0.2);
      c.mean_m = rng.uniform(10.0, 5000.0);
      cells.push_back(c);
    }
    auto base = argmin_cell(cells);
    std::vector<GridCell> shifted = cells;
    for (auto& c : shifted) c.mean_m += 777.0;
    CHECK(argmin_cell(shifted) == base);
    if (base) {
      for (const auto& c : cells)
        if (c.ok) CHECK(cells[*base].mean_m <= c.mean_m);
    }
  }
}
