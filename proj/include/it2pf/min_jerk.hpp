#pragma once

#include <algorithm>

namespace it2pf {

/// Minimum-jerk progress s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5, tau clamped to [0, 1].
inline double min_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

/// ds/dtau.
inline double min_jerk_rate(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  const double a = tau * (1.0 - tau);
  return 30.0 * a * a;
}

}  // namespace it2pf
