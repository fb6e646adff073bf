#include "support/properties.hpp"

#include <doctest.h>

using namespace efda;
using namespace efda::testing;

TEST_CASE("posteriors are calibrated on held-out data") {
  const Design d;
  const auto r = calibration_rate(d, 10000, 10000, 200, 11);
  INFO("rate " << r.rate());
  CHECK(r.rate() >= 0.95);
}

TEST_CASE("calibration under the top-label convention") {
  const Design d;
  const auto r = calibration_rate(d, 10000, 10000, 100, 12, 0.03, false);
  CHECK(r.rate() >= 0.95);
}

TEST_CASE("class parameter estimates are consistent") {
  const Design d;
  const auto r = consistency(d, {1000, 10000, 100000}, 200, 13);
  INFO("within " << r.within.rate());
  CHECK(r.within.rate() >= 0.99);
  CHECK(r.decreasing());
}

TEST_CASE("consistency for discrete and gamma families") {
  Design pois;
  pois.spec = FamilySpec::poisson();
  pois.eta = {NaturalParam(std::log(3.0)), NaturalParam(std::log(7.0))};
  pois.alpha = 0.5;
  Design gam;
  gam.spec = FamilySpec::gamma(2.0);
  gam.eta = {NaturalParam(-1.0), NaturalParam(-0.5)};
  for (const auto& d : {pois, gam}) {
    const auto r = consistency(d, {500, 5000, 50000}, 100, 14);
    CHECK(r.within.rate() >= 0.97);
    CHECK(r.decreasing());
  }
}

TEST_CASE("class parameter estimates reach the Cramer-Rao bound") {
  const Design d;
  const auto ratio = efficiency_ratios(d, 10000, 2000, 15);
  for (double r : ratio) {
    INFO("ratio " << r);
    CHECK(r >= 0.9);
    CHECK(r <= 1.15);
  }
}
