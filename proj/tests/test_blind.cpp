#include <random>

#include "doctest.h"
#include "ptychodd/blind.hpp"
#include "ptychodd/fft.hpp"
#include "ptychodd/metrics.hpp"
#include "ptychodd/simulate.hpp"

using namespace ptychodd;

namespace {

struct Toy {
  ScanGeometry geometry;
  ComplexField2D sample;
  ComplexField2D probe;
  FrameStack frames;
  RealField2D pin;
};

Toy make_toy(int64_t size, int64_t probe_side, int64_t step, uint64_t seed) {
  Toy t;
  t.geometry = make_raster_scan(size, size, probe_side, step);
  const int64_t border = probe_side / 2;
  auto [mag, ph] = make_test_images(size, size, border, seed);
  t.sample = make_sample(mag, ph, &t.geometry);
  t.probe = make_zone_plate_probe(probe_side);
  t.frames = simulate_frames(t.probe, t.sample, t.geometry);
  t.pin = vacuum_border_mask(size, size, border);
  return t;
}

}  // namespace

TEST_CASE("disk support mask geometry") {
  RealField2D mask = disk_support_mask(16, 3.0);
  CHECK(mask.at(0, 0) == 1.0);   // DC
  CHECK(mask.at(0, 3) == 1.0);
  CHECK(mask.at(0, 4) == 0.0);
  CHECK(mask.at(13, 0) == 1.0);  // wrapped negative frequency -3
  CHECK(mask.at(8, 8) == 0.0);   // Nyquist corner
  double count = 0.0;
  for (double v : mask.data()) count += v;
  CHECK(count > 0.0);
}

TEST_CASE("estimated support captures the requested energy fraction") {
  ComplexField2D probe = make_zone_plate_probe(32);
  RealField2D mask = estimate_support_mask(probe, 0.99);
  ComplexField2D spectrum = fft2_normalized(probe);
  double inside = 0.0, total = 0.0;
  for (int64_t i = 0; i < spectrum.size(); ++i) {
    const double e = std::norm(spectrum[i]);
    total += e;
    if (mask[i] == 1.0) inside += e;
  }
  CHECK(inside >= 0.99 * total);
}

TEST_CASE("blind recovery on a toy problem drives RF down with exact support zeros") {
  Toy toy = make_toy(48, 16, 8, 31);
  DecompositionPlan plan = plan_stripes(toy.geometry, 2);
  BlindConfig cfg;
  cfg.eta = 0.1;
  cfg.r = 1.0e3;  // scaled to the toy's illumination density
  cfg.mu = 2.0e2;
  cfg.gamma = 1.0e-4;
  cfg.max_iters = 300;
  cfg.tol_rf = 1e-4;
  BlindSolver solver(plan, toy.frames, cfg, &toy.pin);
  BlindResult result = solver.run();

  CHECK(result.final_rf < result.records.front().rf);
  CHECK(result.final_rf < 0.05);

  // criterion: Fourier energy outside the mask is exactly zero
  const RealField2D& mask = result.support_mask;
  for (int64_t i = 0; i < result.probe_fourier.size(); ++i)
    if (mask[i] == 0.0) CHECK(result.probe_fourier[i] == cdouble{0.0, 0.0});

  // stored spatial probe is consistent with its masked spectrum
  ComplexField2D back = ifft2_normalized(result.probe_fourier);
  for (int64_t i = 0; i < back.size(); ++i) CHECK(std::abs(back[i] - result.probe[i]) < 1e-12);
}

TEST_CASE("blind solver is deterministic across thread counts") {
  Toy toy = make_toy(48, 16, 8, 32);
  DecompositionPlan plan = plan_stripes(toy.geometry, 2);
  BlindResult results[2];
  int idx = 0;
  for (int threads : {1, 2}) {
    BlindConfig cfg;
    cfg.max_iters = 6;
    cfg.threads = threads;
    BlindSolver solver(plan, toy.frames, cfg, &toy.pin);
    results[idx++] = solver.run();
  }
  for (int64_t i = 0; i < results[0].merged.size(); ++i)
    CHECK(std::abs(results[0].merged[i] - results[1].merged[i]) < 1e-12);
  for (int64_t i = 0; i < results[0].probe.size(); ++i)
    CHECK(std::abs(results[0].probe[i] - results[1].probe[i]) < 1e-12);
}

TEST_CASE("full-spectrum support keeps the constraint inactive but runs") {
  Toy toy = make_toy(48, 16, 8, 33);
  DecompositionPlan plan = plan_stripes(toy.geometry, 2);
  BlindConfig cfg;
  cfg.support_mask = RealField2D(16, 16, 1.0);
  cfg.max_iters = 5;
  BlindSolver solver(plan, toy.frames, cfg, &toy.pin);
  BlindResult result = solver.run();
  CHECK(result.iterations == 5);
  CHECK(std::isfinite(result.final_rf));
}

TEST_CASE("blind config validation") {
  Toy toy = make_toy(48, 16, 8, 34);
  DecompositionPlan plan = plan_stripes(toy.geometry, 2);
  BlindConfig bad;
  bad.mu = 0.0;
  CHECK_THROWS_AS(BlindSolver(plan, toy.frames, bad, &toy.pin), std::invalid_argument);
  BlindConfig wrong_mask;
  wrong_mask.support_mask = RealField2D(8, 8, 1.0);
  CHECK_THROWS_AS(BlindSolver(plan, toy.frames, wrong_mask, &toy.pin), std::invalid_argument);
  BlindConfig nonbinary;
  nonbinary.support_mask = RealField2D(16, 16, 0.5);
  CHECK_THROWS_AS(BlindSolver(plan, toy.frames, nonbinary, &toy.pin), std::invalid_argument);
}
