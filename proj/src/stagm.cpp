#include "ptychodd/stagm.hpp"

#include <cmath>

namespace ptychodd {
namespace stagm {
namespace {

double magnitude_objective(double m, double absy, double b, double lambda, double epsilon) {
  const double root_b = std::sqrt(b);
  double g;
  if (m < epsilon * root_b)
    g = 0.5 * (1.0 - epsilon) * (b - m * m / epsilon);
  else {
    const double d = m - root_b;
    g = 0.5 * d * d;
  }
  const double e = m - absy;
  return g + 0.5 * lambda * e * e;
}

}  // namespace

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("stagm: epsilon must lie in (0,1)");
}

double pixel_value(cdouble x, double b, double epsilon) {
  const double ax = std::abs(x);
  const double root_b = std::sqrt(b);
  if (ax < epsilon * root_b) return 0.5 * (1.0 - epsilon) * (b - ax * ax / epsilon);
  const double d = ax - root_b;
  return 0.5 * d * d;
}

cdouble pixel_gradient(cdouble x, double b, double epsilon) {
  const double ax = std::abs(x);
  const double root_b = std::sqrt(b);
  if (ax < epsilon * root_b) return (1.0 - 1.0 / epsilon) * x;
  if (ax == 0.0) return {0.0, 0.0};  // only reachable when b == 0
  return (1.0 - root_b / ax) * x;
}

cdouble pixel_prox(cdouble y, double b, double lambda, double epsilon) {
  const double absy = std::abs(y);
  const double root_b = std::sqrt(b);
  const double inner_edge = epsilon * root_b;

  // Candidate magnitudes: outer stationary point, branch joint, origin, and
  // the inner stationary point when its coefficient is positive. Ties resolve
  // toward the outer branch (outer candidates evaluated first, strict <).
  double best_m = (root_b + lambda * absy) / (1.0 + lambda);
  if (best_m < inner_edge) best_m = inner_edge;
  double best_obj = magnitude_objective(best_m, absy, b, lambda, epsilon);

  auto consider = [&](double m) {
    const double obj = magnitude_objective(m, absy, b, lambda, epsilon);
    if (obj < best_obj) {
      best_obj = obj;
      best_m = m;
    }
  };
  consider(0.0);
  const double inner_coeff = lambda - (1.0 - epsilon) / epsilon;
  if (inner_coeff > 0.0) {
    const double mi = lambda * absy / inner_coeff;
    if (mi < inner_edge) consider(mi);
  }

  const cdouble phase = absy > 0.0 ? y / absy : cdouble{1.0, 0.0};
  return phase * best_m;
}

double value(const std::vector<ComplexField2D>& z, const FrameStack& f, double epsilon) {
  check_epsilon(epsilon);
  if (z.size() != f.frames.size()) throw std::invalid_argument("stagm::value: frame count mismatch");
  double s = 0.0;
  for (size_t j = 0; j < z.size(); ++j) {
    if (!(z[j].height() == f.frames[j].height() && z[j].width() == f.frames[j].width()))
      throw std::invalid_argument("stagm::value: frame shape mismatch");
    for (int64_t i = 0; i < z[j].size(); ++i) s += pixel_value(z[j][i], f.frames[j][i], epsilon);
  }
  return s;
}

std::vector<ComplexField2D> gradient(const std::vector<ComplexField2D>& z, const FrameStack& f,
                                     double epsilon) {
  check_epsilon(epsilon);
  if (z.size() != f.frames.size())
    throw std::invalid_argument("stagm::gradient: frame count mismatch");
  std::vector<ComplexField2D> out;
  out.reserve(z.size());
  for (size_t j = 0; j < z.size(); ++j) {
    ComplexField2D g(z[j].height(), z[j].width());
    for (int64_t i = 0; i < g.size(); ++i) g[i] = pixel_gradient(z[j][i], f.frames[j][i], epsilon);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ComplexField2D> prox(const std::vector<ComplexField2D>& y, const FrameStack& f,
                                 double lambda, double epsilon) {
  check_epsilon(epsilon);
  if (lambda <= 0.0) throw std::invalid_argument("stagm::prox: lambda must be positive");
  if (y.size() != f.frames.size()) throw std::invalid_argument("stagm::prox: frame count mismatch");
  std::vector<ComplexField2D> out;
  out.reserve(y.size());
  for (size_t j = 0; j < y.size(); ++j) {
    ComplexField2D p(y[j].height(), y[j].width());
    for (int64_t i = 0; i < p.size(); ++i)
      p[i] = pixel_prox(y[j][i], f.frames[j][i], lambda, epsilon);
    out.push_back(std::move(p));
  }
  return out;
}

double lipschitz_constant(double epsilon) {
  check_epsilon(epsilon);
  return 2.0 / epsilon - 1.0;
}

}  // namespace stagm
}  // namespace ptychodd
