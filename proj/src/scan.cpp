#include "ptychodd/scan.hpp"

namespace ptychodd {

void ScanGeometry::validate() const {
  if (frame_side < 1 || step < 1) throw std::invalid_argument("ScanGeometry: frame_side, step >= 1");
  if (step >= frame_side)
    throw std::invalid_argument("ScanGeometry: step must be < frame_side for sufficient overlap");
  if (positions.empty()) throw std::invalid_argument("ScanGeometry: no scan positions");
  if (static_cast<int64_t>(positions.size()) != grid_rows * grid_cols)
    throw std::invalid_argument("ScanGeometry: positions do not form the declared raster grid");
  for (const auto& [r, c] : positions) {
    if (r < 0 || c < 0 || r + frame_side > image_height || c + frame_side > image_width)
      throw std::invalid_argument("ScanGeometry: window outside image bounds");
  }
}

ScanGeometry make_raster_scan(int64_t image_height, int64_t image_width, int64_t frame_side,
                              int64_t step) {
  if (frame_side > image_height || frame_side > image_width)
    throw std::invalid_argument("make_raster_scan: frame larger than image");
  ScanGeometry g;
  g.frame_side = frame_side;
  g.step = step;
  g.image_height = image_height;
  g.image_width = image_width;
  g.grid_rows = (image_height - frame_side) / step + 1;
  g.grid_cols = (image_width - frame_side) / step + 1;
  g.positions.reserve(static_cast<size_t>(g.grid_rows * g.grid_cols));
  for (int64_t i = 0; i < g.grid_rows; ++i)
    for (int64_t j = 0; j < g.grid_cols; ++j) g.positions.emplace_back(i * step, j * step);
  g.validate();
  return g;
}

RealField2D scan_coverage(const ScanGeometry& geometry) {
  RealField2D cov(geometry.image_height, geometry.image_width, 0.0);
  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    Region w = geometry.window(j);
    for (int64_t r = w.row_start; r < w.row_end; ++r)
      for (int64_t c = w.col_start; c < w.col_end; ++c) cov.at(r, c) += 1.0;
  }
  return cov;
}

void FrameStack::validate() const {
  geometry.validate();
  if (static_cast<int64_t>(frames.size()) != geometry.frame_count())
    throw std::invalid_argument("FrameStack: frame count != scan position count");
  for (const auto& f : frames) {
    if (f.height() != geometry.frame_side || f.width() != geometry.frame_side)
      throw std::invalid_argument("FrameStack: frame shape mismatch");
    for (double v : f.data())
      if (v < 0.0) throw std::invalid_argument("FrameStack: negative intensity");
  }
}

}  // namespace ptychodd
