#pragma once

#include "ptychodd/field.hpp"

namespace ptychodd {

/// Unitary 2-D DFT: scaled by 1/sqrt(h*w) so that ||Fx|| = ||x||.
ComplexField2D fft2_normalized(const ComplexField2D& x);

/// Unitary inverse (= adjoint) of fft2_normalized.
ComplexField2D ifft2_normalized(const ComplexField2D& x);

/// In-place variants operating on the field's buffer.
void fft2_normalized_inplace(ComplexField2D& x);
void ifft2_normalized_inplace(ComplexField2D& x);

}  // namespace ptychodd
