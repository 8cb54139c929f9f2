#pragma once

// Test-side oracles, independent of the library code paths they check.
// These integrate in affine charts with closed-form branch data; the library
// estimates the same quantities by Crofton line sampling.

#include <complex>
#include <cstddef>

namespace oracles {

// Fubini-Study area of the plane curve x^d + y^d + sign z^d = 0 by direct
// chart quadrature with singular-part subtraction at the branch points.
// Converges to d*pi (Wirtinger).
double fermat_curve_area(int degree, double sign);

// FS area of the line x + y - z = 0 (smooth graph quadrature) -> pi.
double line_area();

// FS length of the real oval x^4 + y^4 = z^4 by a dense 1-D parameter sweep
// (single connected component, closed form r(theta)).
double quartic_oval_length(std::size_t nodes = 200000);

// h^0(K^m) for a smooth plane curve of genus g (Riemann-Roch).
long riemann_roch_curve(long genus, int m);

long plane_curve_genus(int degree);

}  // namespace oracles
