#pragma once

#include "ptychodd/scan.hpp"

namespace ptychodd {

/// Smooth-truncated amplitude-Gaussian metric. The amplitude-fit loss
/// 0.5*(|x|-sqrt(b))^2 with its nonsmooth neighbourhood of the origin replaced
/// by the concave cap (1-eps)/2*(b-|x|^2/eps), joined continuously at
/// |x| = eps*sqrt(b). Lipschitz-differentiable with constant 2/eps-1.
namespace stagm {

void check_epsilon(double epsilon);

/// Per-pixel value g_eps(x;b).
double pixel_value(cdouble x, double b, double epsilon);

/// Per-pixel gradient, packaged as a complex number whose real/imag parts are
/// the partial derivatives w.r.t. Re(x), Im(x).
cdouble pixel_gradient(cdouble x, double b, double epsilon);

/// Per-pixel proximal point argmin_x g_eps(x;b) + lambda/2*|x-y|^2.
/// Evaluates both branch candidates of the closed form and returns the one
/// with the smaller objective; phase equals the phase of y (sign(0) := 1).
cdouble pixel_prox(cdouble y, double b, double lambda, double epsilon);

/// Sum of pixel values over a frame stack.
double value(const std::vector<ComplexField2D>& z, const FrameStack& f, double epsilon);

std::vector<ComplexField2D> gradient(const std::vector<ComplexField2D>& z, const FrameStack& f,
                                     double epsilon);

std::vector<ComplexField2D> prox(const std::vector<ComplexField2D>& y, const FrameStack& f,
                                 double lambda, double epsilon);

/// Gradient Lipschitz constant 2/eps - 1.
double lipschitz_constant(double epsilon);

}  // namespace stagm
}  // namespace ptychodd
