#pragma once

#include <cstdint>
#include <utility>

#include "ptychodd/scan.hpp"

namespace ptychodd {

struct NoiseSpec {
  double scale = 1.0;  // photons per unit intensity
  uint64_t seed = 0;

  void validate() const;
};

struct ZonePlateParams {
  double pupil_radius = 0.0;  // pixels in wrapped Fourier coordinates; 0 = 0.3 * side
  int zones = 8;              // Fresnel ring count across the pupil
  double defocus = 0.0;       // quadratic phase, in radians at the pupil edge;
                              // the default keeps the probe recoverable from
                              // the phase-blind amplitude initialization
  double total_flux = 0.0;    // ||w||^2 after normalization; 0 = 3e2 * side^2
                              // (photon-count scale putting the default
                              // penalty weights in their working range)
};

/// Pixel-wise magnitude * exp(i * phase). Magnitude must lie in [0,1], phase
/// in [0,pi]. When a geometry is given, pixels it leaves uncovered are forced
/// to the vacuum value 1.
ComplexField2D make_sample(const RealField2D& magnitude, const RealField2D& phase,
                           const ScanGeometry* geometry = nullptr);

/// Deterministic procedural test imagery: smooth Gaussian blobs plus a mild
/// sinusoidal texture, seeded. A border of `border` pixels is held at
/// magnitude 1 / phase 0 (vacuum) on all four sides.
std::pair<RealField2D, RealField2D> make_test_images(int64_t height, int64_t width, int64_t border,
                                                     uint64_t seed);

/// 0/1 mask marking the `border`-pixel frame around the image.
RealField2D vacuum_border_mask(int64_t height, int64_t width, int64_t border);

/// Synthetic focused zone-plate probe: circular pupil with binary Fresnel
/// rings and quadratic defocus phase, back-transformed to the sample plane.
/// All Fourier energy lies inside the pupil radius by construction.
ComplexField2D make_zone_plate_probe(int64_t side, const ZonePlateParams& params = {});

/// Noiseless intensity data |F(w o S_j u)|^2.
FrameStack simulate_frames(const ComplexField2D& probe, const ComplexField2D& sample,
                           const ScanGeometry& geometry);

/// Per-pixel Poisson(scale * f) / scale with a single seeded stream over the
/// stack; returns the noisy frames and the achieved intensity SNR in dB.
std::pair<FrameStack, double> add_poisson_noise(const FrameStack& frames, const NoiseSpec& spec);

/// Bisection on the Poisson scale until the measured intensity SNR hits
/// `target_snr_db` (same evaluation seed throughout, so the search is
/// deterministic).
double calibrate_noise_scale(const FrameStack& frames, double target_snr_db, uint64_t seed);

/// Bilinear magnification/minification of a real image.
RealField2D bilinear_resize(const RealField2D& src, int64_t height, int64_t width);

}  // namespace ptychodd
