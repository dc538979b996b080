#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include <cdrkit/normalizer.hpp>
#include <cdrkit/rng.hpp>

using namespace cdrkit;

namespace {

using Coords = std::vector<std::pair<double, double>>;

Coords from_lats(const std::vector<double>& lats) {
  Coords out;
  for (double v : lats) out.emplace_back(v, v * 2.0);
  return out;
}

// independent two-pass recomputation
void oracle_stats(const std::vector<double>& xs, double& mn, double& mx, double& mean,
                  double& var) {
  mn = xs[0];
  mx = xs[0];
  double sum = 0.0;
  for (double x : xs) {
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    sum += x;
  }
  mean = sum / double(xs.size());
  var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= double(xs.size());
}

}  // namespace

TEST_CASE("fit_normalizer computes per-axis statistics") {
  SUBCASE("min and max") {
    auto p = fit_normalizer(from_lats({2.0, 4.0, 6.0}), NormKind::MinMax);
    CHECK(p.lat.min == 2.0);
    CHECK(p.lat.max == 6.0);
    CHECK(p.lon.min == 4.0);
    CHECK(p.lon.max == 12.0);
  }

  SUBCASE("population mean and variance") {
    auto p = fit_normalizer(from_lats({1.0, 3.0}), NormKind::Variance);
    CHECK(p.lat.mean == doctest::Approx(2.0));
    CHECK(p.lat.var == doctest::Approx(1.0));
  }

  SUBCASE("random points match the two-pass oracle") {
    Rng rng(1);
    std::vector<double> lats, lons;
    Coords coords;
    for (int i = 0; i < 100; ++i) {
      const double lat = rng.uniform(35.0, 36.0), lon = rng.uniform(51.0, 52.0);
      lats.push_back(lat);
      lons.push_back(lon);
      coords.emplace_back(lat, lon);
    }
    auto p = fit_normalizer(coords, NormKind::Variance);
    double mn, mx, mean, var;
    oracle_stats(lats, mn, mx, mean, var);
    CHECK(p.lat.min == doctest::Approx(mn).epsilon(1e-12));
    CHECK(p.lat.max == doctest::Approx(mx).epsilon(1e-12));
    CHECK(p.lat.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(p.lat.var == doctest::Approx(var).epsilon(1e-12));
    oracle_stats(lons, mn, mx, mean, var);
    CHECK(p.lon.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(p.lon.var == doctest::Approx(var).epsilon(1e-12));
  }

  SUBCASE("fewer than two points errors") {
    CHECK_THROWS_AS(fit_normalizer({{1.0, 2.0}}, NormKind::MinMax), InsufficientDataError);
  }
}

TEST_CASE("transform maps into the normalized space") {
  SUBCASE("min-max endpoints hit exactly 0 and 1") {
    auto p = fit_normalizer(from_lats({2.0, 4.0, 6.0}), NormKind::MinMax);
    CHECK(normalize(p, 2.0, 4.0).first == 0.0);
    CHECK(normalize(p, 4.0, 8.0).first == 0.5);
    CHECK(normalize(p, 6.0, 12.0).first == 1.0);
  }

  SUBCASE("variance scaling divides by the variance as printed") {
    auto p = fit_normalizer(from_lats({1.0, 3.0}), NormKind::Variance);
    CHECK(normalize(p, 1.0, 2.0).first == doctest::Approx(-1.0));
    CHECK(normalize(p, 3.0, 6.0).first == doctest::Approx(1.0));
  }

  SUBCASE("sigma divisor yields unit variance") {
    Rng rng(2);
    Coords coords;
    std::vector<double> lats;
    for (int i = 0; i < 200; ++i) {
      const double lat = rng.uniform(0.0, 10.0);
      lats.push_back(lat);
      coords.emplace_back(lat, lat);
    }
    auto p = fit_normalizer(coords, NormKind::Variance, /*std_divisor=*/true);
    std::vector<double> transformed;
    for (double lat : lats) transformed.push_back(normalize(p, lat, lat).first);
    double mn, mx, mean, var;
    oracle_stats(transformed, mn, mx, mean, var);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("points below the training range go negative but stay finite") {
    auto p = fit_normalizer(from_lats({2.0, 4.0, 6.0}), NormKind::MinMax);
    const double v = normalize(p, 1.0, 2.0).first;
    CHECK(v < 0.0);
    CHECK(std::isfinite(v));
  }

  SUBCASE("transform is strictly monotonic per axis") {
    Rng rng(3);
    for (NormKind kind : {NormKind::MinMax, NormKind::Variance}) {
      auto p = fit_normalizer(from_lats({rng.uniform(0, 1), rng.uniform(2, 3), rng.uniform(4, 5)}),
                              kind);
      double prev = -1e18;
      for (double x = -2.0; x < 8.0; x += 0.37) {
        const double y = normalize(p, x, x).first;
        CHECK(y > prev);
        prev = y;
      }
    }
  }
}

TEST_CASE("inverse_transform is the exact algebraic inverse") {
  SUBCASE("roundtrip on and beyond the training range") {
    Rng rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
      const NormKind kind = trial % 2 ? NormKind::MinMax : NormKind::Variance;
      const bool std_div = trial % 3 == 0;
      Coords coords;
      const int n = 2 + static_cast<int>(rng.below(30));
      for (int i = 0; i < n; ++i)
        coords.emplace_back(rng.uniform(-80.0, 80.0), rng.uniform(-170.0, 170.0));
      auto p = fit_normalizer(coords, kind, std_div);
      if (p.any_degenerate()) continue;
      for (int k = 0; k < 5; ++k) {
        const double lat = rng.uniform(-89.0, 89.0);  // may fall far outside training
        const double lon = rng.uniform(-179.0, 179.0);
        auto [x, y] = normalize(p, lat, lon);
        auto [blat, blon] = denormalize(p, x, y);
        CHECK(std::abs(blat - lat) <= 1e-9);
        CHECK(std::abs(blon - lon) <= 1e-9);
      }
    }
  }

  SUBCASE("min-max inverse of 0 is the training minimum") {
    auto p = fit_normalizer(from_lats({2.0, 4.0, 6.0}), NormKind::MinMax);
    CHECK(denormalize(p, 0.0, 0.0).first == doctest::Approx(2.0));
    CHECK(denormalize(p, 1.0, 1.0).first == doctest::Approx(6.0));
  }

  SUBCASE("variance inverse of 0 is the training mean") {
    auto p = fit_normalizer(from_lats({1.0, 3.0}), NormKind::Variance);
    CHECK(denormalize(p, 0.0, 0.0).first == doctest::Approx(2.0));
  }
}

TEST_CASE("degenerate axes map to a constant and invert to it") {
  Coords coords{{35.5, 51.0}, {35.5, 52.0}, {35.5, 51.5}};  // latitude never moves

  SUBCASE("min-max") {
    auto p = fit_normalizer(coords, NormKind::MinMax);
    CHECK(p.lat.degenerate);
    CHECK(!p.lon.degenerate);
    CHECK(normalize(p, 35.5, 51.0).first == 0.5);
    CHECK(normalize(p, 99.0, 51.0).first == 0.5);
    CHECK(denormalize(p, 0.5, 0.0).first == 35.5);
  }

  SUBCASE("variance scaling") {
    auto p = fit_normalizer(coords, NormKind::Variance);
    CHECK(p.lat.degenerate);
    CHECK(normalize(p, 35.5, 51.0).first == 0.0);
    CHECK(denormalize(p, 0.0, 0.0).first == 35.5);
  }
}
