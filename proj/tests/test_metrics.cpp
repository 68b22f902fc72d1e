#include <cmath>

#include "doctest.h"
#include "ptychodd/metrics.hpp"
#include "ptychodd/simulate.hpp"

using namespace ptychodd;

TEST_CASE("r_factor is zero on exact data and positive otherwise") {
  ScanGeometry g = make_raster_scan(32, 32, 8, 4);
  auto [mag, ph] = make_test_images(32, 32, 4, 41);
  ComplexField2D sample = make_sample(mag, ph, &g);
  ComplexField2D probe = make_zone_plate_probe(8);
  FrameStack frames = simulate_frames(probe, sample, g);
  DecompositionPlan plan = plan_stripes(g, 2);
  auto parts = partition_frames(frames, plan);

  std::vector<ComplexField2D> subs;
  for (int d = 0; d < plan.D; ++d) subs.push_back(extract(sample, plan.subdomains[d]));
  CHECK(r_factor(subs, parts, probe) < 1e-12);

  std::vector<ComplexField2D> wrong = subs;
  for (auto& x : wrong[0].data()) x *= 1.3;
  CHECK(r_factor(wrong, parts, probe) > 0.01);
}

TEST_CASE("relative_error definition and errors") {
  ComplexField2D a(2, 2, cdouble{1.0, 0.0});
  ComplexField2D b(2, 2, cdouble{1.0, 0.0});
  b.at(0, 0) = {0.0, 0.0};
  // ||a-b|| = 1, ||a|| = 2
  CHECK(relative_error({a}, {b}) == doctest::Approx(0.5).epsilon(1e-12));
  // max over subdomains
  ComplexField2D c(2, 2, cdouble{1.0, 0.0});
  CHECK(relative_error({a, c}, {b, c}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(relative_error({a}, {a, c}), std::invalid_argument);
  ComplexField2D zero(2, 2, cdouble{0.0, 0.0});
  CHECK_THROWS_AS(relative_error({zero}, {a}), std::invalid_argument);
}

TEST_CASE("snr_db formula and sentinel") {
  ComplexField2D truth(2, 2, cdouble{1.0, 0.0});
  CHECK(std::isinf(snr_db(truth, truth)));
  ComplexField2D rec = truth;
  rec.at(0, 0) = {1.1, 0.0};  // diff 0.01, ||rec||^2 = 4.21
  CHECK(snr_db(rec, truth) == doctest::Approx(-10.0 * std::log10(0.01 / 4.21)).epsilon(1e-12));
}

TEST_CASE("speedup report needs a baseline and computes ratios") {
  std::vector<RunTiming> t = {{1, 600, 120.0}, {2, 620, 62.0}, {4, 640, 33.0}};
  SpeedupReport rep = speedup_report(t);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].speedup == doctest::Approx(1.0));
  CHECK(rep.rows[1].speedup == doctest::Approx(120.0 / 62.0));
  CHECK(rep.rows[2].efficiency == doctest::Approx(120.0 / 33.0 / 4.0));
  CHECK_THROWS_AS(speedup_report(std::vector<RunTiming>{{2, 620, 62.0}}), std::invalid_argument);
}

TEST_CASE("virtual seconds sums the per-iteration maxima") {
  ConvergenceRecord a, b;
  a.t_sub_ms = {10.0, 30.0};
  a.t_virtual_ms = 30.0;
  b.t_sub_ms = {25.0, 5.0};
  b.t_virtual_ms = 25.0;
  CHECK(virtual_seconds({a, b}) == doctest::Approx(0.055).epsilon(1e-12));
}
