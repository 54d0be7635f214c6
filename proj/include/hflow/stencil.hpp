#pragma once

#include "hflow/field.hpp"

namespace hflow {

/// Centered first difference along `axis` with periodic wrap. order 2 uses
/// (f_{+1}-f_{-1})/2dx, order 4 the five-point stencil. Output has the same
/// component layout as the input; it is one slice of the covariant gradient.
Field partial(const Field& f, int axis, int order = 2);

/// Centered second difference. a == b uses the direct second-difference
/// stencil; a != b composes two first differences (symmetric in (a,b) to
/// rounding).
Field second_partial(const Field& f, int a, int b, int order = 2);

/// Full gradient of a Sym2 field: FreeSym2 output with comp(a, ij) = d_a g_ij.
Field gradient_sym2(const Field& g, int order);

/// Gradient of a scalar: Vector output.
Field gradient_scalar(const Field& f, int order);

/// All second partials of a Sym2 field: SymSym output,
/// comp(sym(a,b), ij) = d_a d_b g_ij.
Field hessian_sym2(const Field& g, int order);

/// Hessian of a scalar: Sym2 output.
Field hessian_scalar(const Field& f, int order);

/// In-place kernels on a single component plane (used by the flow assembly
/// to avoid temporaries).
void partial_plane(const Lattice& lat, const double* f, int axis, int order, double* out);
void second_partial_plane(const Lattice& lat, const double* f, int axis, int order, double* out);

}  // namespace hflow
