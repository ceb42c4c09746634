#include "cran/allocation.hpp"

#include <cmath>

namespace cran {

Allocation Allocation::zero(const Scenario& sc) {
  Allocation a;
  a.n_u = sc.n_users();
  a.n_j = sc.n_rrh();
  a.k1 = sc.k1;
  a.k2 = sc.k2;
  a.tau.assign(static_cast<std::size_t>(a.n_u) * a.k1 * kDirs, 0.0);
  a.p_ac.assign(a.tau.size(), 0.0);
  a.x.assign(static_cast<std::size_t>(a.n_j) * a.k2 * kDirs, 0.0);
  a.p_fh.assign(a.x.size(), 0.0);
  a.alpha.assign(static_cast<std::size_t>(a.n_u) * a.k1, 0.0);
  a.delay.d_rrh.assign(a.n_j, 0.0);
  a.delay.d_bbu = 0.0;
  a.delay.d_user.assign(a.n_u, 0.0);
  return a;
}

bool Allocation::finite() const {
  auto ok = [](const std::vector<double>& v) {
    for (double d : v)
      if (!std::isfinite(d)) return false;
    return true;
  };
  return ok(tau) && ok(p_ac) && ok(x) && ok(p_fh) && ok(alpha) &&
         ok(delay.d_rrh) && ok(delay.d_user) && std::isfinite(delay.d_bbu);
}

double power_distance(const Allocation& a, const Allocation& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.p_ac.size(); ++i) {
    double d = a.p_ac[i] - b.p_ac[i];
    s += d * d;
  }
  for (std::size_t i = 0; i < a.p_fh.size(); ++i) {
    double d = a.p_fh[i] - b.p_fh[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double total_power(const Scenario& sc, const Allocation& a,
                   const std::vector<char>& active) {
  double s = 0;
  for (int u = 0; u < a.n_u; ++u) {
    if (!active[u]) continue;
    for (int k = 0; k < a.k1; ++k)
      for (int q = 0; q < kDirs; ++q) {
        std::size_t i = a.ai(u, k, q);
        s += a.tau[i] * a.p_ac[i];
      }
  }
  for (std::size_t i = 0; i < a.x.size(); ++i) s += a.x[i] * a.p_fh[i];
  (void)sc;
  return s;
}

}  // namespace cran
