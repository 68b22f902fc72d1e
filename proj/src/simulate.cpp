#include "ptychodd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ptychodd/fft.hpp"
#include "ptychodd/forward.hpp"
#include "ptychodd/metrics.hpp"

namespace ptychodd {
namespace {

double wrapped_radius(int64_t k, int64_t l, int64_t side) {
  const double kk = static_cast<double>(std::min(k, side - k));
  const double ll = static_cast<double>(std::min(l, side - l));
  return std::sqrt(kk * kk + ll * ll);
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(scale > 0.0)) throw std::invalid_argument("NoiseSpec: scale must be > 0");
}

ComplexField2D make_sample(const RealField2D& magnitude, const RealField2D& phase,
                           const ScanGeometry* geometry) {
  if (!magnitude.same_shape(phase))
    throw std::invalid_argument("make_sample: magnitude/phase shape mismatch");
  ComplexField2D sample(magnitude.height(), magnitude.width());
  for (int64_t i = 0; i < sample.size(); ++i) {
    const double m = magnitude[i];
    const double p = phase[i];
    if (m < 0.0 || m > 1.0) throw std::invalid_argument("make_sample: magnitude outside [0,1]");
    if (p < 0.0 || p > std::numbers::pi)
      throw std::invalid_argument("make_sample: phase outside [0,pi]");
    sample[i] = std::polar(m, p);
  }
  if (geometry) {
    RealField2D coverage = scan_coverage(*geometry);
    if (coverage.height() != sample.height() || coverage.width() != sample.width())
      throw std::invalid_argument("make_sample: geometry does not match image shape");
    for (int64_t i = 0; i < sample.size(); ++i)
      if (coverage[i] == 0.0) sample[i] = {1.0, 0.0};
  }
  return sample;
}

RealField2D vacuum_border_mask(int64_t height, int64_t width, int64_t border) {
  if (border < 0 || 2 * border >= std::min(height, width))
    throw std::invalid_argument("vacuum_border_mask: border too large for image");
  RealField2D mask(height, width, 0.0);
  for (int64_t r = 0; r < height; ++r)
    for (int64_t c = 0; c < width; ++c)
      if (r < border || r >= height - border || c < border || c >= width - border)
        mask.at(r, c) = 1.0;
  return mask;
}

std::pair<RealField2D, RealField2D> make_test_images(int64_t height, int64_t width, int64_t border,
                                                     uint64_t seed) {
  if (border < 0 || 2 * border >= std::min(height, width))
    throw std::invalid_argument("make_test_images: border too large for image");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto blobs = [&](int count, double min_sigma_frac, double max_sigma_frac) {
    RealField2D img(height, width, 0.0);
    for (int b = 0; b < count; ++b) {
      const double cr = unit(rng) * static_cast<double>(height);
      const double cc = unit(rng) * static_cast<double>(width);
      const double sigma =
          (min_sigma_frac + unit(rng) * (max_sigma_frac - min_sigma_frac)) *
          static_cast<double>(std::min(height, width));
      const double amp = 0.3 + 0.7 * unit(rng);
      const double inv = 1.0 / (2.0 * sigma * sigma);
      for (int64_t r = 0; r < height; ++r)
        for (int64_t c = 0; c < width; ++c) {
          const double dr = static_cast<double>(r) - cr;
          const double dc = static_cast<double>(c) - cc;
          img.at(r, c) += amp * std::exp(-(dr * dr + dc * dc) * inv);
        }
    }
    return img;
  };

  auto normalize = [](RealField2D& img, double lo, double hi) {
    double mn = img[0], mx = img[0];
    for (double v : img.data()) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double span = mx > mn ? mx - mn : 1.0;
    for (double& v : img.data()) v = std::clamp(lo + (hi - lo) * (v - mn) / span, lo, hi);
  };

  RealField2D magnitude = blobs(24, 0.03, 0.15);
  RealField2D phase = blobs(24, 0.03, 0.15);
  // Mild texture so the images are not bandlimited to the blob scale.
  const double fr = 2.0 * std::numbers::pi * (3.0 + 4.0 * unit(rng)) / static_cast<double>(height);
  const double fc = 2.0 * std::numbers::pi * (3.0 + 4.0 * unit(rng)) / static_cast<double>(width);
  for (int64_t r = 0; r < height; ++r)
    for (int64_t c = 0; c < width; ++c) {
      const double t = std::sin(fr * static_cast<double>(r)) * std::cos(fc * static_cast<double>(c));
      magnitude.at(r, c) += 0.15 * t;
      phase.at(r, c) += 0.15 * std::cos(fr * static_cast<double>(r) + fc * static_cast<double>(c));
    }
  normalize(magnitude, 0.2, 1.0);
  normalize(phase, 0.0, 0.9 * std::numbers::pi);

  for (int64_t r = 0; r < height; ++r)
    for (int64_t c = 0; c < width; ++c)
      if (r < border || r >= height - border || c < border || c >= width - border) {
        magnitude.at(r, c) = 1.0;
        phase.at(r, c) = 0.0;
      }
  return {std::move(magnitude), std::move(phase)};
}

ComplexField2D make_zone_plate_probe(int64_t side, const ZonePlateParams& params) {
  if (side < 8) throw std::invalid_argument("make_zone_plate_probe: side must be >= 8");
  const double radius = params.pupil_radius > 0.0 ? params.pupil_radius : 0.3 * static_cast<double>(side);
  const double flux =
      params.total_flux > 0.0 ? params.total_flux : 3.0e2 * static_cast<double>(side * side);
  if (params.zones < 1) throw std::invalid_argument("make_zone_plate_probe: zones must be >= 1");

  ComplexField2D spectrum(side, side);
  for (int64_t k = 0; k < side; ++k)
    for (int64_t l = 0; l < side; ++l) {
      const double rho = wrapped_radius(k, l, side);
      if (rho > radius) continue;
      const double t = rho / radius;  // 0 at DC, 1 at pupil edge
      // Binary Fresnel rings, equal-area in rho^2; keep the even zones but
      // never fully extinguish so the pupil interior stays connected.
      const int zone = static_cast<int>(std::floor(static_cast<double>(params.zones) * t * t));
      // Soft pupil edge: a hard cut rings in the sample plane and its exact
      // nulls can leave raster-aligned pixels dark.
      const double soft = std::max(1.0, 0.15 * radius);
      const double edge =
          0.5 * (1.0 + std::cos(std::numbers::pi *
                                std::clamp((rho - (radius - soft)) / soft, 0.0, 1.0)));
      const double amp = (zone % 2 == 0 ? 1.0 : 0.25) * edge;
      const double defocus_phase = params.defocus * t * t;
      // Checkerboard sign centers the spatial probe at (side/2, side/2).
      const double center = (k + l) % 2 == 0 ? 1.0 : -1.0;
      spectrum.at(k, l) = std::polar(amp * center, defocus_phase);
    }

  ComplexField2D probe = ifft2_normalized(spectrum);
  const double norm = probe.norm_sq();
  const double gain = std::sqrt(flux / norm);
  for (auto& x : probe.data()) x *= gain;
  return probe;
}

FrameStack simulate_frames(const ComplexField2D& probe, const ComplexField2D& sample,
                           const ScanGeometry& geometry) {
  return intensity(forward(probe, sample, geometry), geometry);
}

std::pair<FrameStack, double> add_poisson_noise(const FrameStack& frames, const NoiseSpec& spec) {
  spec.validate();
  frames.validate();
  std::mt19937_64 rng(spec.seed);
  FrameStack noisy = frames;
  for (auto& frame : noisy.frames)
    for (double& f : frame.data()) {
      const double mean = spec.scale * f;
      if (mean > 4.0e18)
        throw std::invalid_argument(
            "add_poisson_noise: expected count overflows; use a smaller scale");
      std::poisson_distribution<long long> dist(mean);
      f = static_cast<double>(dist(rng)) / spec.scale;
    }
  const double snr = snr_intensity_db(noisy, frames);
  return {std::move(noisy), snr};
}

double calibrate_noise_scale(const FrameStack& frames, double target_snr_db, uint64_t seed) {
  double lo = 1e-9, hi = 1e12;
  auto measure = [&](double scale) {
    return add_poisson_noise(frames, NoiseSpec{scale, seed}).second;
  };
  if (measure(lo) > target_snr_db || measure(hi) < target_snr_db)
    throw std::invalid_argument("calibrate_noise_scale: target SNR outside reachable range");
  for (int it = 0; it < 80; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (measure(mid) < target_snr_db)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

RealField2D bilinear_resize(const RealField2D& src, int64_t height, int64_t width) {
  if (height < 1 || width < 1) throw std::invalid_argument("bilinear_resize: empty target");
  RealField2D dst(height, width);
  const double sr = static_cast<double>(src.height()) / static_cast<double>(height);
  const double sc = static_cast<double>(src.width()) / static_cast<double>(width);
  for (int64_t r = 0; r < height; ++r)
    for (int64_t c = 0; c < width; ++c) {
      const double y = (static_cast<double>(r) + 0.5) * sr - 0.5;
      const double x = (static_cast<double>(c) + 0.5) * sc - 0.5;
      const int64_t r0 = std::clamp<int64_t>(static_cast<int64_t>(std::floor(y)), 0, src.height() - 1);
      const int64_t c0 = std::clamp<int64_t>(static_cast<int64_t>(std::floor(x)), 0, src.width() - 1);
      const int64_t r1 = std::min(r0 + 1, src.height() - 1);
      const int64_t c1 = std::min(c0 + 1, src.width() - 1);
      const double wy = std::clamp(y - static_cast<double>(r0), 0.0, 1.0);
      const double wx = std::clamp(x - static_cast<double>(c0), 0.0, 1.0);
      dst.at(r, c) = (1.0 - wy) * ((1.0 - wx) * src.at(r0, c0) + wx * src.at(r0, c1)) +
                     wy * ((1.0 - wx) * src.at(r1, c0) + wx * src.at(r1, c1));
    }
  return dst;
}

}  // namespace ptychodd
