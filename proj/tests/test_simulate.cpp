#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ptychodd/fft.hpp"
#include "ptychodd/metrics.hpp"
#include "ptychodd/simulate.hpp"

using namespace ptychodd;

TEST_CASE("make_sample elementwise definition and validation") {
  RealField2D mag(4, 4, 1.0), ph(4, 4, 0.0);
  ComplexField2D ones = make_sample(mag, ph);
  for (int64_t i = 0; i < ones.size(); ++i) CHECK(ones[i] == cdouble{1.0, 0.0});

  RealField2D half(4, 4, 0.5), quarter(4, 4, std::numbers::pi / 2.0);
  ComplexField2D imag = make_sample(half, quarter);
  for (int64_t i = 0; i < imag.size(); ++i) {
    CHECK(std::abs(imag[i].real()) < 1e-15);
    CHECK(imag[i].imag() == doctest::Approx(0.5).epsilon(1e-12));
  }

  RealField2D bad_mag(4, 4, 1.5);
  CHECK_THROWS_AS(make_sample(bad_mag, ph), std::invalid_argument);
  RealField2D bad_ph(4, 4, 4.0);
  CHECK_THROWS_AS(make_sample(mag, bad_ph), std::invalid_argument);
  RealField2D other(3, 4, 0.5);
  CHECK_THROWS_AS(make_sample(other, ph), std::invalid_argument);
}

TEST_CASE("make_sample round trip recovers magnitude and phase") {
  auto [mag, ph] = make_test_images(32, 32, 4, 9);
  ComplexField2D sample = make_sample(mag, ph);
  for (int64_t i = 0; i < sample.size(); ++i) {
    if (mag[i] <= 0.0) continue;
    CHECK(std::abs(std::abs(sample[i]) - mag[i]) < 1e-12);
    double a = std::arg(sample[i]);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    CHECK(std::abs(a - ph[i]) < 1e-12);
  }
}

TEST_CASE("test images respect ranges, border, and determinism") {
  auto [mag, ph] = make_test_images(64, 64, 8, 5);
  auto [mag2, ph2] = make_test_images(64, 64, 8, 5);
  for (int64_t i = 0; i < mag.size(); ++i) {
    CHECK(mag[i] >= 0.0);
    CHECK(mag[i] <= 1.0);
    CHECK(ph[i] >= 0.0);
    CHECK(ph[i] <= std::numbers::pi);
    CHECK(mag[i] == mag2[i]);
    CHECK(ph[i] == ph2[i]);
  }
  for (int64_t c = 0; c < 64; ++c) {
    CHECK(mag.at(0, c) == 1.0);
    CHECK(ph.at(0, c) == 0.0);
    CHECK(mag.at(63, c) == 1.0);
  }
  CHECK(mag.at(32, 32) != 1.0);  // interior actually varies
}

TEST_CASE("zone-plate probe: flux, compact support, concentration") {
  const int64_t side = 64;
  ComplexField2D probe = make_zone_plate_probe(side);
  CHECK(probe.norm_sq() ==
        doctest::Approx(3.0e2 * static_cast<double>(side * side)).epsilon(1e-10));
  ComplexField2D unit = make_zone_plate_probe(side, {.total_flux = 2.0});
  CHECK(unit.norm_sq() == doctest::Approx(2.0).epsilon(1e-10));

  // all Fourier energy inside the pupil radius (0.3 * side by default)
  ComplexField2D spectrum = fft2_normalized(probe);
  const double radius = 0.3 * static_cast<double>(side);
  double outside = 0.0, total = 0.0;
  for (int64_t k = 0; k < side; ++k)
    for (int64_t l = 0; l < side; ++l) {
      const double kk = static_cast<double>(std::min(k, side - k));
      const double ll = static_cast<double>(std::min(l, side - l));
      const double e = std::norm(spectrum.at(k, l));
      total += e;
      if (std::sqrt(kk * kk + ll * ll) > radius) outside += e;
    }
  CHECK(outside <= 0.01 * total);

  // spatially concentrated: central disk holds most energy, corners near-empty
  double center = 0.0, corners = 0.0;
  for (int64_t r = 0; r < side; ++r)
    for (int64_t c = 0; c < side; ++c) {
      const double dr = static_cast<double>(r) - side / 2.0;
      const double dc = static_cast<double>(c) - side / 2.0;
      const double e = std::norm(probe.at(r, c));
      if (std::sqrt(dr * dr + dc * dc) <= side / 4.0) center += e;
      if (std::sqrt(dr * dr + dc * dc) >= side * 0.45) corners += e;
    }
  CHECK(center >= 0.5 * total);
  CHECK(corners <= 0.05 * total);

  CHECK_THROWS_AS(make_zone_plate_probe(4), std::invalid_argument);
}

TEST_CASE("simulated frames obey Parseval and ignore global phase") {
  ScanGeometry g = make_raster_scan(32, 32, 8, 4);
  auto [mag, ph] = make_test_images(32, 32, 4, 2);
  ComplexField2D sample = make_sample(mag, ph, &g);
  ComplexField2D probe = make_zone_plate_probe(8);
  FrameStack f = simulate_frames(probe, sample, g);

  double total = 0.0, expect = 0.0;
  for (int64_t j = 0; j < g.frame_count(); ++j) {
    for (double v : f.frames[j].data()) {
      CHECK(v >= 0.0);
      total += v;
    }
    ComplexField2D patch = extract(sample, g.window(j));
    for (int64_t i = 0; i < patch.size(); ++i) expect += std::norm(probe[i] * patch[i]);
  }
  CHECK(total == doctest::Approx(expect).epsilon(1e-12));

  ComplexField2D rotated = sample;
  for (auto& x : rotated.data()) x *= std::polar(1.0, 0.7);
  FrameStack f2 = simulate_frames(probe, rotated, g);
  for (int64_t j = 0; j < g.frame_count(); ++j)
    for (int64_t i = 0; i < f.frames[j].size(); ++i)
      CHECK(f.frames[j][i] == doctest::Approx(f2.frames[j][i]).epsilon(1e-10));
}

TEST_CASE("poisson noise: determinism, limit, nonnegativity, mean") {
  ScanGeometry g = make_raster_scan(16, 16, 8, 4);
  auto [mag, ph] = make_test_images(16, 16, 2, 3);
  ComplexField2D sample = make_sample(mag, ph, &g);
  FrameStack clean = simulate_frames(make_zone_plate_probe(8), sample, g);

  auto [n1, snr1] = add_poisson_noise(clean, NoiseSpec{50.0, 7});
  auto [n2, snr2] = add_poisson_noise(clean, NoiseSpec{50.0, 7});
  CHECK(snr1 == snr2);
  for (size_t j = 0; j < n1.frames.size(); ++j)
    for (int64_t i = 0; i < n1.frames[j].size(); ++i) {
      CHECK(n1.frames[j][i] == n2.frames[j][i]);
      CHECK(n1.frames[j][i] >= 0.0);
    }

  auto [big, snr_big] = add_poisson_noise(clean, NoiseSpec{1e9, 7});
  CHECK(snr_big >= 80.0);

  // per-pixel mean over many draws matches scale*f within 3 sigma
  FrameStack one;
  one.geometry = make_raster_scan(4, 4, 4, 2);
  one.frames.emplace_back(4, 4, 3.7);
  const double scale = 2.0;
  const int draws = 10000;
  double sum = 0.0;
  for (int k = 0; k < draws; ++k) {
    auto [noisy, s] = add_poisson_noise(one, NoiseSpec{scale, static_cast<uint64_t>(k)});
    sum += noisy.frames[0].at(0, 0);
  }
  const double mean = sum / draws;
  const double sigma = std::sqrt(scale * 3.7 / draws) / scale;
  CHECK(std::abs(mean - 3.7) <= 3.0 * sigma);

  CHECK_THROWS_AS(add_poisson_noise(clean, NoiseSpec{0.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(add_poisson_noise(clean, NoiseSpec{1e40, 1}), std::invalid_argument);
}

TEST_CASE("noise calibration hits the target SNR") {
  ScanGeometry g = make_raster_scan(32, 32, 8, 4);
  auto [mag, ph] = make_test_images(32, 32, 4, 4);
  FrameStack clean = simulate_frames(make_zone_plate_probe(8), make_sample(mag, ph, &g), g);
  for (double target : {39.8, 29.9}) {
    const double scale = calibrate_noise_scale(clean, target, 17);
    auto [noisy, achieved] = add_poisson_noise(clean, NoiseSpec{scale, 17});
    CHECK(std::abs(achieved - target) <= 0.5);
  }
}

TEST_CASE("bilinear resize") {
  RealField2D flat(8, 8, 2.5);
  RealField2D up = bilinear_resize(flat, 16, 16);
  for (double v : up.data()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

  RealField2D same = bilinear_resize(flat, 8, 8);
  for (int64_t i = 0; i < same.size(); ++i) CHECK(same[i] == doctest::Approx(flat[i]));

  // a linear ramp stays linear under bilinear interpolation (interior)
  RealField2D ramp(4, 4);
  for (int64_t r = 0; r < 4; ++r)
    for (int64_t c = 0; c < 4; ++c) ramp.at(r, c) = static_cast<double>(c);
  RealField2D wide = bilinear_resize(ramp, 4, 8);
  for (int64_t c = 1; c < 7; ++c)
    CHECK(wide.at(1, c) == doctest::Approx((c + 0.5) / 2.0 - 0.5).epsilon(1e-12));
}
