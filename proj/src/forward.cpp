#include "ptychodd/forward.hpp"

#include "ptychodd/fft.hpp"

namespace ptychodd {
namespace {

void check_probe(const ComplexField2D& probe, const ScanGeometry& g) {
  if (probe.height() != g.frame_side || probe.width() != g.frame_side)
    throw std::invalid_argument("forward model: probe shape != frame_side^2");
}

void check_image(const ComplexField2D& image, const ScanGeometry& g) {
  if (image.height() != g.image_height || image.width() != g.image_width)
    throw std::invalid_argument("forward model: image shape != geometry image_shape");
}

void check_frames(const std::vector<ComplexField2D>& frames, const ScanGeometry& g) {
  if (static_cast<int64_t>(frames.size()) != g.frame_count())
    throw std::invalid_argument("forward model: frame count mismatch");
  for (const auto& f : frames)
    if (f.height() != g.frame_side || f.width() != g.frame_side)
      throw std::invalid_argument("forward model: frame shape mismatch");
}

}  // namespace

std::vector<ComplexField2D> forward(const ComplexField2D& probe, const ComplexField2D& image,
                                    const ScanGeometry& geometry) {
  check_probe(probe, geometry);
  check_image(image, geometry);
  std::vector<ComplexField2D> frames;
  frames.reserve(static_cast<size_t>(geometry.frame_count()));
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    ComplexField2D patch = extract(image, geometry.window(j));
    for (int64_t i = 0; i < patch.size(); ++i) patch[i] *= probe[i];
    fft2_normalized_inplace(patch);
    frames.push_back(std::move(patch));
  }
  return frames;
}

ComplexField2D adjoint(const ComplexField2D& probe, const std::vector<ComplexField2D>& frames,
                       const ScanGeometry& geometry) {
  check_probe(probe, geometry);
  check_frames(frames, geometry);
  ComplexField2D out(geometry.image_height, geometry.image_width);
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    ComplexField2D back = ifft2_normalized(frames[j]);
    for (int64_t i = 0; i < back.size(); ++i) back[i] *= std::conj(probe[i]);
    embed_add(back, geometry.window(j), out);
  }
  return out;
}

RealField2D illumination_density(const ComplexField2D& probe, const ScanGeometry& geometry) {
  check_probe(probe, geometry);
  RealField2D out(geometry.image_height, geometry.image_width, 0.0);
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    Region w = geometry.window(j);
    for (int64_t r = 0; r < w.height(); ++r)
      for (int64_t c = 0; c < w.width(); ++c)
        out.at(w.row_start + r, w.col_start + c) += std::norm(probe.at(r, c));
  }
  return out;
}

RealField2D probe_density(const ComplexField2D& image, const ScanGeometry& geometry) {
  check_image(image, geometry);
  RealField2D out(geometry.frame_side, geometry.frame_side, 0.0);
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    Region w = geometry.window(j);
    for (int64_t r = 0; r < w.height(); ++r)
      for (int64_t c = 0; c < w.width(); ++c)
        out.at(r, c) += std::norm(image.at(w.row_start + r, w.col_start + c));
  }
  return out;
}

ComplexField2D adjoint_probe(const ComplexField2D& image, const std::vector<ComplexField2D>& frames,
                             const ScanGeometry& geometry) {
  check_image(image, geometry);
  check_frames(frames, geometry);
  ComplexField2D out(geometry.frame_side, geometry.frame_side);
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    ComplexField2D back = ifft2_normalized(frames[j]);
    Region w = geometry.window(j);
    for (int64_t r = 0; r < w.height(); ++r)
      for (int64_t c = 0; c < w.width(); ++c)
        out.at(r, c) += std::conj(image.at(w.row_start + r, w.col_start + c)) * back.at(r, c);
  }
  return out;
}

FrameStack intensity(const std::vector<ComplexField2D>& frames, const ScanGeometry& geometry) {
  check_frames(frames, geometry);
  FrameStack out;
  out.geometry = geometry;
  out.frames.reserve(frames.size());
  for (const auto& f : frames) {
    RealField2D m(f.height(), f.width());
    for (int64_t i = 0; i < f.size(); ++i) m[i] = std::norm(f[i]);
    out.frames.push_back(std::move(m));
  }
  return out;
}

}  // namespace ptychodd
