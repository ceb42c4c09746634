#include "cran/qfunc.hpp"

#include <cmath>

namespace cran {

double gaussian_q(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double gaussian_qinv(double eps) {
  // Q maps [-40,40] onto (essentially) [1,0]; anything representable in
  // double that we care about (eps down to ~1e-300) lives well inside.
  double lo = -40.0, hi = 40.0;
  if (eps >= 1.0) return lo;
  if (eps <= 0.0) return hi;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (gaussian_q(mid) > eps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cran
