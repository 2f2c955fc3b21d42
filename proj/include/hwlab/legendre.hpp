#pragma once

// Gauss-Legendre nodes on [0,1] and the orthonormal shifted Legendre family
// L_m(x) = sqrt(2m+1) P_m(2x-1), together with its antiderivatives. These are
// the workhorses for polynomial-exact projection, antidifferentiation, and
// operator matrix assembly.

#include <cmath>
#include <vector>

#include "hwlab/errors.hpp"

namespace hwlab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Nodes/weights of the n-point Gauss-Legendre rule on [0,1], ascending.
// Newton iteration on P_n with the standard Chebyshev initial guess.
inline void gauss_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  require(n >= 1, errc::invalid_argument, "gauss rule needs order >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    // one clean-up evaluation at the converged node
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    double weight = 1.0 / ((1.0 - t * t) * dp * dp);  // half of the [-1,1] weight
    x[n - 1 - i] = 0.5 * (1.0 + t);
    x[i] = 0.5 * (1.0 - t);
    w[n - 1 - i] = weight;
    w[i] = weight;
  }
}

// Values of L_0..L_{count-1} at x in [0,1].
inline void legendre_values(int count, double x, double* out) {
  double t = 2.0 * x - 1.0;
  double p0 = 1.0, p1 = t;
  if (count > 0) out[0] = 1.0;
  if (count > 1) out[1] = std::sqrt(3.0) * t;
  for (int m = 2; m < count; ++m) {
    double p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
    p0 = p1;
    p1 = p2;
    out[m] = std::sqrt(2.0 * m + 1.0) * p2;
  }
}

// Antiderivatives int_0^x L_m, m < count. Uses
// int P_m(2t-1) dt = (P_{m+1} - P_{m-1})(2x-1) / (2(2m+1)), which vanishes at 0.
inline void legendre_antiderivatives(int count, double x, double* out) {
  if (count <= 0) return;
  double t = 2.0 * x - 1.0;
  std::vector<double> p(count + 1);
  p[0] = 1.0;
  if (count >= 1) p[1] = t;
  for (int m = 2; m <= count; ++m) p[m] = ((2 * m - 1) * t * p[m - 1] - (m - 1) * p[m - 2]) / m;
  out[0] = x;
  for (int m = 1; m < count; ++m)
    out[m] = std::sqrt(2.0 * m + 1.0) * (p[m + 1] - p[m - 1]) / (2.0 * (2 * m + 1.0));
}

// (V L_n)(x) = int_0^x L_n for the antiderivative acting as the Volterra image
// of the basis: identical formula, exposed under the operator-flavored name.
inline void volterra_on_legendre(int count, double x, double* out) {
  legendre_antiderivatives(count, x, out);
}

}  // namespace hwlab
