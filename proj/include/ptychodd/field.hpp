#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptychodd {

using cdouble = std::complex<double>;

/// Half-open axis-aligned pixel rectangle [row_start,row_end) x [col_start,col_end).
struct Region {
  int64_t row_start = 0;
  int64_t row_end = 0;
  int64_t col_start = 0;
  int64_t col_end = 0;

  int64_t height() const { return row_end - row_start; }
  int64_t width() const { return col_end - col_start; }
  int64_t area() const { return height() * width(); }

  bool contains(int64_t r, int64_t c) const {
    return r >= row_start && r < row_end && c >= col_start && c < col_end;
  }
  bool contains(const Region& other) const {
    return other.row_start >= row_start && other.row_end <= row_end &&
           other.col_start >= col_start && other.col_end <= col_end;
  }
  bool intersects(const Region& other) const {
    return row_start < other.row_end && other.row_start < row_end &&
           col_start < other.col_end && other.col_start < col_end;
  }
  Region intersection(const Region& other) const {
    return {std::max(row_start, other.row_start), std::min(row_end, other.row_end),
            std::max(col_start, other.col_start), std::min(col_end, other.col_end)};
  }
  bool operator==(const Region& other) const = default;

  void validate() const {
    if (row_start < 0 || col_start < 0 || row_start >= row_end || col_start >= col_end)
      throw std::invalid_argument("Region: empty or negative extent");
  }
};

/// Row-major rectangular grid of complex samples.
class ComplexField2D {
 public:
  ComplexField2D() = default;
  ComplexField2D(int64_t height, int64_t width, cdouble fill = {0.0, 0.0})
      : height_(height), width_(width), data_(check_size(height, width), fill) {}
  ComplexField2D(int64_t height, int64_t width, std::vector<cdouble> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != check_size(height, width))
      throw std::invalid_argument("ComplexField2D: data length != height*width");
  }

  int64_t height() const { return height_; }
  int64_t width() const { return width_; }
  int64_t size() const { return height_ * width_; }
  Region full_region() const { return {0, height_, 0, width_}; }

  cdouble& at(int64_t r, int64_t c) { return data_[r * width_ + c]; }
  const cdouble& at(int64_t r, int64_t c) const { return data_[r * width_ + c]; }
  cdouble& operator[](int64_t i) { return data_[i]; }
  const cdouble& operator[](int64_t i) const { return data_[i]; }

  std::vector<cdouble>& data() { return data_; }
  const std::vector<cdouble>& data() const { return data_; }

  bool same_shape(const ComplexField2D& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return s;
  }

 private:
  static int64_t check_size(int64_t h, int64_t w) {
    if (h < 1 || w < 1) throw std::invalid_argument("ComplexField2D: height, width must be >= 1");
    return h * w;
  }

  int64_t height_ = 0;
  int64_t width_ = 0;
  std::vector<cdouble> data_;
};

/// Row-major rectangular grid of real samples (intensities, densities, residuals).
class RealField2D {
 public:
  RealField2D() = default;
  RealField2D(int64_t height, int64_t width, double fill = 0.0)
      : height_(height), width_(width), data_(check_size(height, width), fill) {}
  RealField2D(int64_t height, int64_t width, std::vector<double> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != check_size(height, width))
      throw std::invalid_argument("RealField2D: data length != height*width");
  }

  int64_t height() const { return height_; }
  int64_t width() const { return width_; }
  int64_t size() const { return height_ * width_; }

  double& at(int64_t r, int64_t c) { return data_[r * width_ + c]; }
  const double& at(int64_t r, int64_t c) const { return data_[r * width_ + c]; }
  double& operator[](int64_t i) { return data_[i]; }
  const double& operator[](int64_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const RealField2D& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

 private:
  static int64_t check_size(int64_t h, int64_t w) {
    if (h < 1 || w < 1) throw std::invalid_argument("RealField2D: height, width must be >= 1");
    return h * w;
  }

  int64_t height_ = 0;
  int64_t width_ = 0;
  std::vector<double> data_;
};

/// Copy of the sub-field covered by `region`. Throws if the region falls outside `field`.
ComplexField2D extract(const ComplexField2D& field, const Region& region);

/// Zero field of shape (height,width) with `patch` written into `region`; adjoint of extract.
ComplexField2D embed(const ComplexField2D& patch, const Region& region, int64_t height,
                     int64_t width);

/// In-place accumulation variant: dst(region) += patch.
void embed_add(const ComplexField2D& patch, const Region& region, ComplexField2D& dst);

}  // namespace ptychodd
