#pragma once

// Quadrature grids on [0,1]: plain Gauss-Legendre and endpoint-graded rules
// for integrands with algebraic or essential singularities. The graded rule
// composes a double-exponential node map with the power map sigma^g, so node
// spacing near the marked endpoint scales like distance^{(g-1)/g} while the
// deepest node still reaches distances ~1e-280 at high orders. That depth is
// what lets norm probes distinguish convergent from divergent tails.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "hwlab/errors.hpp"
#include "hwlab/legendre.hpp"

namespace hwlab {

struct Scheme {
  enum class Kind { gauss_legendre, composite_graded };
  Kind kind = Kind::gauss_legendre;
  double endpoint = 0.0;  // where nodes cluster (graded only), in [0,1)
  double grading = 3.0;   // grading exponent g >= 1

  static Scheme gauss() { return Scheme{}; }
  static Scheme graded(double endpoint, double grading) {
    return Scheme{Kind::composite_graded, endpoint, grading};
  }
};

struct QuadratureGrid {
  std::vector<double> nodes;    // strictly increasing, inside (0,1)
  std::vector<double> weights;  // positive, sum to 1
  int order = 0;                // node count
  Scheme scheme;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

namespace detail {

// tanh-sinh map written with exp(-2|u|) so the tails never saturate:
// sigma in (0,1) strictly increasing in t, dsigma its derivative.
inline void de_point(double t, double& sigma, double& dsigma) {
  double u = 0.5 * kPi * std::sinh(t);
  double e2 = std::exp(-2.0 * std::fabs(u));
  double base = e2 / (1.0 + e2);
  sigma = (u >= 0) ? 1.0 - base : base;
  double sech2 = 4.0 * e2 / ((1.0 + e2) * (1.0 + e2));
  dsigma = 0.25 * kPi * std::cosh(t) * sech2;
}

// n-point graded rule on (0,1] clustering at 0: x = sigma^g. Weights are
// normalized to sum to exactly 1. Depth grows with n (capped so x never
// underflows) which makes repeated refinement probe ever smaller scales.
inline void graded_unit_nodes(int n, double g, std::vector<double>& x,
                              std::vector<double>& w) {
  require(n >= 2, errc::invalid_argument, "graded rule needs order >= 2");
  require(g >= 1.0, errc::invalid_argument, "grading exponent must be >= 1");
  double depth = std::min(640.0, 11.0 * n) / g;
  double t_lo = std::asinh(depth / kPi);
  double t_hi = std::asinh(34.0 / kPi);  // keeps 1-sigma representable
  double h = (t_lo + t_hi) / (n - 1);
  x.resize(n);
  w.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double sigma, dsigma;
    de_point(-t_lo + i * h, sigma, dsigma);
    x[i] = std::pow(sigma, g);
    w[i] = g * std::pow(sigma, g - 1.0) * dsigma * h;
    sum += w[i];
  }
  for (auto& wi : w) wi /= sum;
}

// Append a graded piece covering [a,b] with nodes clustered at the endpoint
// `at` (which must be a or b). Weights sum to b-a. Nodes whose offset from
// the cluster point is below a few ulps are dropped (and the weight mass
// renormalized) so grid nodes stay strictly increasing in double precision.
inline void append_graded_piece(int n, double g, double a, double b, double at,
                                std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> u, w;
  graded_unit_nodes(n, g, u, w);
  double len = b - a;
  double min_offset = std::max(8.0 * std::numeric_limits<double>::epsilon() * std::fabs(at),
                               1e-300);
  std::vector<double> px, pw;
  px.reserve(n);
  pw.reserve(n);
  for (int i = 0; i < n; ++i) {
    double off = len * u[i];
    if (off <= min_offset) continue;
    double xi = (at == a) ? a + off : b - off;
    if (xi <= 0.0 || xi >= 1.0) continue;
    px.push_back(xi);
    pw.push_back(len * w[i]);
  }
  if (at != a) {
    std::reverse(px.begin(), px.end());
    std::reverse(pw.begin(), pw.end());
  }
  double sum = 0.0;
  for (double wi : pw) sum += wi;
  for (auto& wi : pw) wi *= len / sum;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!nodes.empty() && px[i] <= nodes.back()) continue;  // collapse duplicates
    nodes.push_back(px[i]);
    weights.push_back(pw[i]);
  }
}

}  // namespace detail

inline GridPtr make_grid(int order, Scheme scheme = Scheme::gauss()) {
  require(order >= 2, errc::invalid_argument, "grid order must be >= 2");
  auto grid = std::make_shared<QuadratureGrid>();
  grid->scheme = scheme;
  if (scheme.kind == Scheme::Kind::gauss_legendre) {
    gauss_nodes(order, grid->nodes, grid->weights);
  } else {
    require(scheme.grading >= 1.0, errc::invalid_argument, "grading exponent must be >= 1");
    require(scheme.endpoint >= 0.0 && scheme.endpoint < 1.0, errc::invalid_argument,
            "graded endpoint must lie in [0,1)");
    double e = scheme.endpoint;
    if (e == 0.0) {
      detail::append_graded_piece(order, scheme.grading, 0.0, 1.0, 0.0, grid->nodes,
                                  grid->weights);
    } else {
      // interior cluster point: grade toward e from both sides
      require(order >= 4, errc::invalid_argument,
              "interior graded endpoint needs order >= 4");
      int left = order / 2, right = order - left;
      detail::append_graded_piece(left, scheme.grading, 0.0, e, e, grid->nodes, grid->weights);
      detail::append_graded_piece(right, scheme.grading, e, 1.0, e, grid->nodes, grid->weights);
    }
  }
  grid->order = static_cast<int>(grid->nodes.size());
  return grid;
}

}  // namespace hwlab
