#ifndef OSA_TESTS_ORACLE_HPP
#define OSA_TESTS_ORACLE_HPP

// Independent reference implementations used only by tests. Nothing here
// calls into the library.

#include <array>
#include <cmath>

namespace oracle {

// Per-rule average centroids, rules in table order (1..27).
inline constexpr std::array<double, 27> kTableCentroids{
    28.59, 25.90, 24.23, 22.43, 22.98, 24.68, 16.95, 19.70, 22.06,  //
    43.08, 40.20, 38.98, 40.89, 38.47, 39.16, 36.50, 34.15, 40.26,  //
    58.62, 55.12, 54.75, 56.99, 53.81, 53.92, 54.05, 53.72, 52.12};

// Raw default breakpoints, levels in order (Low|Near, Moderate, High|Far).
// Triangles are written with a repeated apex.
inline constexpr double kUtil[3][4] = {{0, 0, 25, 50}, {25, 50, 50, 75}, {50, 75, 100, 100}};
inline constexpr double kMob[3][4] = {{0, 0, 2.5, 5}, {2.5, 5, 5, 7.5}, {5, 7.5, 10, 10}};
inline constexpr double kDist[3][4] = {{0, 0, 2.5, 5}, {2.5, 5, 5, 7.5}, {5, 7.5, 10, 10}};

inline double trap(const double (&p)[4], double x) {
  const double a = p[0], b = p[1], c = p[2], d = p[3];
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

inline double clampd(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

/// Explicit 27-rule product-T-norm center-of-sets evaluation.
inline double naive_infer(double util, double mob, double dist) {
  util = clampd(util, 0, 100);
  mob = clampd(mob, 0, 10);
  dist = clampd(dist, 0, 10);
  double num = 0.0;
  double den = 0.0;
  int rule = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const double w = trap(kUtil[i], util) * trap(kMob[j], mob) * trap(kDist[k], dist);
        num += w * kTableCentroids[static_cast<std::size_t>(rule)];
        den += w;
        ++rule;
      }
    }
  }
  return num / den;
}

/// Erlang-B blocking for `servers` channels at offered load `erlangs`.
inline double erlang_b(int servers, double erlangs) {
  double b = 1.0;
  for (int n = 1; n <= servers; ++n) b = erlangs * b / (n + erlangs * b);
  return b;
}

}  // namespace oracle

#endif  // OSA_TESTS_ORACLE_HPP
