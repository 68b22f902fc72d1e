#pragma once

#include <utility>
#include <vector>

#include "ptychodd/field.hpp"

namespace ptychodd {

/// Raster-grid scan: window top-left corners ordered row-major over the scan grid.
struct ScanGeometry {
  int64_t frame_side = 0;
  int64_t step = 0;
  int64_t image_height = 0;
  int64_t image_width = 0;
  int64_t grid_rows = 0;  // scan positions per column direction
  int64_t grid_cols = 0;
  std::vector<std::pair<int64_t, int64_t>> positions;  // (row, col) corners

  int64_t frame_count() const { return static_cast<int64_t>(positions.size()); }

  Region window(int64_t j) const {
    auto [r, c] = positions[j];
    return {r, r + frame_side, c, c + frame_side};
  }

  void validate() const;
};

/// Build the standard raster grid covering the image with the given step.
ScanGeometry make_raster_scan(int64_t image_height, int64_t image_width, int64_t frame_side,
                              int64_t step);

/// Per-pixel count of scan windows covering each image pixel.
RealField2D scan_coverage(const ScanGeometry& geometry);

/// Stack of nonnegative intensity frames tied to a scan geometry.
struct FrameStack {
  std::vector<RealField2D> frames;
  ScanGeometry geometry;

  void validate() const;
};

}  // namespace ptychodd
