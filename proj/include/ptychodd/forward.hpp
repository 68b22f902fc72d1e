#pragma once

#include "ptychodd/scan.hpp"

namespace ptychodd {

/// Exit-wave frames: frame j = F(probe o image|window_j), unitary DFT.
std::vector<ComplexField2D> forward(const ComplexField2D& probe, const ComplexField2D& image,
                                    const ScanGeometry& geometry);

/// True adjoint of forward: sum_j embed(conj(probe) o F*(frame_j), window_j).
ComplexField2D adjoint(const ComplexField2D& probe, const std::vector<ComplexField2D>& frames,
                       const ScanGeometry& geometry);

/// Diagonal of A*A: image-shaped sum_j embed(|probe|^2, window_j).
RealField2D illumination_density(const ComplexField2D& probe, const ScanGeometry& geometry);

/// Diagonal of D_U*D_U: probe-shaped sum_j extract(|image|^2, window_j).
RealField2D probe_density(const ComplexField2D& image, const ScanGeometry& geometry);

/// Partial adjoint of the bilinear map in the probe slot:
/// sum_j conj(image|window_j) o F*(frame_j), probe-shaped.
ComplexField2D adjoint_probe(const ComplexField2D& image, const std::vector<ComplexField2D>& frames,
                             const ScanGeometry& geometry);

/// Element-wise squared modulus of each frame.
FrameStack intensity(const std::vector<ComplexField2D>& frames, const ScanGeometry& geometry);

}  // namespace ptychodd
