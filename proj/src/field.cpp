#include "ptychodd/field.hpp"

namespace ptychodd {

ComplexField2D extract(const ComplexField2D& field, const Region& region) {
  region.validate();
  if (region.row_end > field.height() || region.col_end > field.width())
    throw std::out_of_range("extract: region exceeds field bounds");
  ComplexField2D out(region.height(), region.width());
  for (int64_t r = 0; r < region.height(); ++r) {
    const cdouble* src = &field.at(region.row_start + r, region.col_start);
    cdouble* dst = &out.at(r, 0);
    std::copy(src, src + region.width(), dst);
  }
  return out;
}

ComplexField2D embed(const ComplexField2D& patch, const Region& region, int64_t height,
                     int64_t width) {
  region.validate();
  if (region.row_end > height || region.col_end > width)
    throw std::out_of_range("embed: region exceeds target shape");
  if (patch.height() != region.height() || patch.width() != region.width())
    throw std::invalid_argument("embed: patch dimensions do not match region");
  ComplexField2D out(height, width);
  for (int64_t r = 0; r < region.height(); ++r) {
    const cdouble* src = &patch.at(r, 0);
    cdouble* dst = &out.at(region.row_start + r, region.col_start);
    std::copy(src, src + region.width(), dst);
  }
  return out;
}

void embed_add(const ComplexField2D& patch, const Region& region, ComplexField2D& dst) {
  region.validate();
  if (region.row_end > dst.height() || region.col_end > dst.width())
    throw std::out_of_range("embed_add: region exceeds target shape");
  if (patch.height() != region.height() || patch.width() != region.width())
    throw std::invalid_argument("embed_add: patch dimensions do not match region");
  for (int64_t r = 0; r < region.height(); ++r) {
    const cdouble* src = &patch.at(r, 0);
    cdouble* d = &dst.at(region.row_start + r, region.col_start);
    for (int64_t c = 0; c < region.width(); ++c) d[c] += src[c];
  }
}

}  // namespace ptychodd
