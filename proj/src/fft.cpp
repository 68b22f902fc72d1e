#include "ptychodd/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace ptychodd {
namespace {

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft is.
// Plans are created once per (h,w,direction) with FFTW_UNALIGNED so they can
// run on any std::vector buffer.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int64_t, int64_t, int>, fftw_plan> plans;

  fftw_plan get(int64_t h, int64_t w, int sign) {
    std::scoped_lock lock(mu);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<cdouble> tmp(static_cast<size_t>(h * w));
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w),
                                   reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void transform(ComplexField2D& x, int sign) {
  fftw_plan p = cache().get(x.height(), x.width(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(x.data().data());
  fftw_execute_dft(p, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : x.data()) v *= scale;
}

}  // namespace

void fft2_normalized_inplace(ComplexField2D& x) { transform(x, FFTW_FORWARD); }
void ifft2_normalized_inplace(ComplexField2D& x) { transform(x, FFTW_BACKWARD); }

ComplexField2D fft2_normalized(const ComplexField2D& x) {
  ComplexField2D out = x;
  fft2_normalized_inplace(out);
  return out;
}

ComplexField2D ifft2_normalized(const ComplexField2D& x) {
  ComplexField2D out = x;
  ifft2_normalized_inplace(out);
  return out;
}

}  // namespace ptychodd
