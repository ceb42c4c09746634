#pragma once

namespace cran {

// Gaussian tail probability Q(x) = P[N(0,1) > x], computed via erfc.
double gaussian_q(double x);

// Inverse of gaussian_q on (0,1), by bisection to 1e-12 absolute tolerance
// on the argument.  Q is strictly decreasing so the bracket is trivial.
// Out-of-range eps (<=0 or >=1) is clamped to the bracket endpoints.
double gaussian_qinv(double eps);

}  // namespace cran
