#pragma once

// The symbol calculus on the lollipop Lambda = [-1,0] u closed D(1,1):
// operator words reduce modulo compacts to pairs of polynomials (one per
// part of Lambda, glued at 0), gamma builds a concrete representative back
// from a pair, and the Fredholm index comes from the winding of the disc
// component. Witness-vector tables exercise the limits that identify the
// symbol pointwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hwlab/errors.hpp"
#include "hwlab/functions.hpp"
#include "hwlab/operators.hpp"
#include "hwlab/word.hpp"

namespace hwlab {

struct Lollipop {
  static bool member(Complex z) {
    if (z.imag() == 0.0 && z.real() >= -1.0 && z.real() <= 0.0) return true;
    return std::abs(z - Complex(1.0, 0.0)) <= 1.0;
  }
  // distance to the set (0 inside)
  static double distance(Complex z) {
    double disc = std::max(0.0, std::abs(z - Complex(1.0, 0.0)) - 1.0);
    double tx = std::clamp(z.real(), -1.0, 0.0);
    double stick = std::hypot(z.real() - tx, z.imag());
    return std::min(disc, stick);
  }
};

// Polynomial pair (f_minus on [-1,0], f_plus on closed D(1,1)), glued at 0.
struct SymbolPair {
  std::vector<Complex> minus;  // coefficients of f_minus(t)
  std::vector<Complex> plus;   // coefficients of f_plus(z)

  Complex at_minus(double t) const {
    Complex acc = 0.0;
    for (std::size_t k = minus.size(); k-- > 0;) acc = acc * t + minus[k];
    return acc;
  }
  Complex at_plus(Complex z) const {
    Complex acc = 0.0;
    for (std::size_t k = plus.size(); k-- > 0;) acc = acc * z + plus[k];
    return acc;
  }
  Complex origin() const { return plus.empty() ? (minus.empty() ? Complex(0.0) : minus[0]) : plus[0]; }
};

inline void check_gluing(const SymbolPair& f) {
  Complex a = f.minus.empty() ? Complex(0.0) : f.minus[0];
  Complex b = f.plus.empty() ? Complex(0.0) : f.plus[0];
  require(std::abs(a - b) <= 1e-12, errc::gluing_violation,
          "symbol parts disagree at the gluing point 0");
}

inline SymbolPair make_symbol(std::vector<Complex> minus, std::vector<Complex> plus) {
  SymbolPair f{std::move(minus), std::move(plus)};
  check_gluing(f);
  return f;
}

inline SymbolPair identity_symbol() { return SymbolPair{{0.0, 1.0}, {0.0, 1.0}}; }

inline SymbolPair constant_symbol(Complex c) { return SymbolPair{{c}, {c}}; }

namespace detail {

inline std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Complex> out(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace detail

inline SymbolPair symbol_product(const SymbolPair& a, const SymbolPair& b) {
  return SymbolPair{detail::poly_mul(a.minus, b.minus), detail::poly_mul(a.plus, b.plus)};
}

// Reduction modulo compacts: V vanishes, so does every monomial mixing Mx
// and H; a pure power Mx^k contributes (-t)^k to the stick part, H^k
// contributes z^k to the disc part, constants land in both.
inline SymbolPair symbol_of(const OperatorWord& word) {
  SymbolPair f;
  auto bump = [](std::vector<Complex>& p, std::size_t k, Complex c) {
    if (p.size() <= k) p.resize(k + 1, Complex(0.0));
    p[k] += c;
  };
  for (const auto& term : word_normalize(word).terms) {
    std::size_t mx = 0, h = 0;
    bool dead = false;
    for (Letter l : term.letters) {
      if (l == Letter::V) dead = true;
      if (l == Letter::Mx) ++mx;
      if (l == Letter::H) ++h;
    }
    if (dead || (mx > 0 && h > 0)) continue;
    if (mx == 0 && h == 0) {
      bump(f.minus, 0, term.coeff);
      bump(f.plus, 0, term.coeff);
    } else if (mx > 0) {
      bump(f.minus, mx, (mx % 2 ? -1.0 : 1.0) * term.coeff);
    } else {
      bump(f.plus, h, term.coeff);
    }
  }
  return f;
}

// Exact compression of f_minus(-Mx) + f_plus(H) - f(0) at size N. The Mx
// polynomial is evaluated at a margin wide enough that the kept block equals
// the infinite compression; powers of H never spill below the block.
inline OperatorMatrix gamma_build(const SymbolPair& f, int N) {
  require(N >= 1, errc::invalid_argument, "gamma needs N >= 1");
  check_gluing(f);
  int dm = f.minus.empty() ? 0 : int(f.minus.size()) - 1;
  int M = N + dm;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, N);
  if (!f.minus.empty()) {
    Eigen::MatrixXcd X = -assemble(OperatorId{Op::Mx, 0.0}, Basis::legendre_orthonormal, M).entries;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M, M);
    for (std::size_t k = f.minus.size(); k-- > 0;) {
      P = P * X;
      P += f.minus[k] * Eigen::MatrixXcd::Identity(M, M);
    }
    G += P.topLeftCorner(N, N);
  }
  if (!f.plus.empty()) {
    Eigen::MatrixXcd Hm = assemble(OperatorId{Op::H, 0.0}, Basis::legendre_orthonormal, N).entries;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t k = f.plus.size(); k-- > 0;) {
      P = P * Hm;
      P += f.plus[k] * Eigen::MatrixXcd::Identity(N, N);
    }
    G += P;
  }
  G -= f.origin() * Eigen::MatrixXcd::Identity(N, N);
  OperatorMatrix out;
  out.entries = std::move(G);
  out.basis = Basis::legendre_orthonormal;
  out.size = N;
  return out;
}

// Compact-defect proxy: sigma_{N/4} of the exact compression of
// gamma(f) gamma(g) - gamma(fg), across a doubling ladder of sizes.
struct DefectReport {
  std::vector<int> sizes;
  std::vector<double> sigma_quarter;
  bool halving = false;  // each doubling divides sigma_{N/4} by >= 2
};

inline DefectReport product_defect(const SymbolPair& f, const SymbolPair& g,
                                   const std::vector<int>& sizes = {16, 32, 64}) {
  check_gluing(f);
  check_gluing(g);
  SymbolPair fg = symbol_product(f, g);
  DefectReport rep;
  rep.sizes = sizes;
  for (int N : sizes) {
    require(N >= 4, errc::invalid_argument, "defect sizes must be >= 4");
    int margin = int(f.minus.size()) + int(g.minus.size()) + 2;
    int M = N + margin;
    Eigen::MatrixXcd Gf = gamma_build(f, M).entries;
    Eigen::MatrixXcd Gg = gamma_build(g, M).entries;
    Eigen::MatrixXcd D = (Gf * Gg).topLeftCorner(N, N) - gamma_build(fg, N).entries;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
    // sigma_{N/4} in the usual 1-based numbering (sigma_1 = largest)
    rep.sigma_quarter.push_back(svd.singularValues()(N / 4 - 1));
  }
  rep.halving = true;
  for (std::size_t i = 1; i < rep.sigma_quarter.size(); ++i)
    if (rep.sigma_quarter[i] > 0.5 * rep.sigma_quarter[i - 1] * (1.0 + 1e-9)) rep.halving = false;
  return rep;
}

// n samples of each part: f_minus on [-1,0], f_plus on the circle |z-1| = 1.
inline std::vector<Complex> essential_spectrum(const SymbolPair& f, int n) {
  require(n >= 16, errc::invalid_argument, "essential spectrum sampling needs n >= 16");
  std::vector<Complex> out;
  out.reserve(2 * n);
  for (int j = 0; j < n; ++j) out.push_back(f.at_minus(-1.0 + double(j) / (n - 1)));
  for (int j = 0; j < n; ++j) {
    double th = 2.0 * kPi * j / n;
    out.push_back(f.at_plus(Complex(1.0 + std::cos(th), std::sin(th))));
  }
  return out;
}

// Winding number of f_plus(1 + e^{i theta}) - lambda about 0 by accumulated
// argument, refining until consecutive steps stay under a half turn. The
// returned integer is refinement-invariant: any boundary_samples that already
// satisfies the half-turn criterion yields the same count.
inline int fredholm_index(const SymbolPair& f, Complex lambda, int boundary_samples = 256) {
  check_gluing(f);
  require(boundary_samples >= 16, errc::invalid_argument, "need at least 16 boundary samples");
  for (Complex w : essential_spectrum(f, 512))
    require(std::abs(w - lambda) >= 1e-6, errc::index_undefined,
            "lambda lies on the sampled essential spectrum");
  int n = boundary_samples;
  for (;;) {
    double total = 0.0, worst = 0.0;
    Complex prev = f.at_plus(Complex(2.0, 0.0)) - lambda;
    for (int j = 1; j <= n; ++j) {
      double th = 2.0 * kPi * j / n;
      Complex cur = f.at_plus(Complex(1.0 + std::cos(th), std::sin(th))) - lambda;
      double step = std::arg(cur / prev);
      worst = std::max(worst, std::fabs(step));
      total += step;
      prev = cur;
    }
    if (worst < 0.5 * kPi) return int(std::lround(total / (2.0 * kPi)));
    require(n < (1 << 22), errc::index_undefined, "winding sampling failed to stabilize");
    n *= 2;
  }
}

// ---- witness-vector tables ------------------------------------------------------

struct SpikeRow {
  int n;
  double moment;        // <x^2 chi_n, chi_n>, exact piecewise value
  double moment_limit;  // s^2
  double h_norm;        // ||H chi_n||, exact closed form
};

// chi_n = sqrt(n/2) on [s-1/n, s+1/n]: the moment is s^2 + 1/(3n^2) exactly,
// and ||H chi_n||^2 integrates (x - A)^2/x^2 over the plateau plus the
// (B-A)^2/x^2 tail.
inline std::vector<SpikeRow> witness_spike(double s, const std::vector<int>& ns) {
  require(s > 0.0 && s < 1.0, errc::invalid_argument, "spike center needs s in (0,1)");
  std::vector<SpikeRow> out;
  for (int n : ns) {
    require(n >= 1 && 1.0 / n < std::min(s, 1.0 - s), errc::invalid_argument,
            "spike needs 1/n < min{s, 1-s}");
    ClosedForm chi = ClosedForm::spike(s, n);
    double moment = step_poly_moment(chi, {0.0, 0.0, 1.0});
    double A = s - 1.0 / n, B = s + 1.0 / n, v2 = n / 2.0;
    auto plateau = [&](double x) { return x - 2.0 * A * std::log(x) - A * A / x; };
    double h2 = v2 * ((plateau(B) - plateau(A)) + (B - A) * (B - A) * (1.0 / B - 1.0));
    out.push_back({n, moment, s * s, std::sqrt(h2)});
  }
  return out;
}

struct UpsilonRow {
  Complex alpha;
  double rho;
  double quadrature;      // <x^rho Y_a, Y_a> by graded quadrature
  double formula;         // (1-|a|^2) / (rho |1+a|^2 + 1-|a|^2)
  double eigen_residual;  // relative L2 residual of H Y_a = (1+a) Y_a
};

inline std::vector<UpsilonRow> witness_upsilon(Complex tau, const std::vector<double>& radii,
                                               double rho) {
  require(std::fabs(std::abs(tau) - 1.0) <= 1e-9, errc::invalid_argument,
          "target tau must lie on the unit circle");
  require(std::abs(tau + Complex(1.0, 0.0)) > 1e-9, errc::invalid_argument,
          "tau = -1 is the excluded boundary point");
  require(rho >= 0.0, errc::invalid_argument, "moment exponent rho must be >= 0");
  GridPtr g = make_grid(192, Scheme::graded(0.0, 3.0));
  std::vector<UpsilonRow> out;
  for (double r : radii) {
    require(r >= 0.0 && r < 1.0, errc::invalid_argument, "radial schedule needs r in [0,1)");
    Complex alpha = r * tau;
    ClosedForm y = ClosedForm::upsilon(alpha);
    double quad = 0.0, n2 = 0.0, r2 = 0.0;
    GridFunction hy = apply(OperatorId{Op::H, Complex(1.0, 0.0) + alpha}, y, g, 192);
    for (int i = 0; i < g->order; ++i) {
      double x = g->nodes[i];
      Complex yx = y.at(x);
      quad += g->weights[i] * std::pow(x, rho) * std::norm(yx);
      n2 += g->weights[i] * std::norm(yx);
      r2 += g->weights[i] * std::norm(hy.values[i]);
    }
    double a2 = std::norm(alpha);
    double formula = (1.0 - a2) / (rho * std::norm(Complex(1.0, 0.0) + alpha) + 1.0 - a2);
    out.push_back({alpha, rho, quad, formula, std::sqrt(r2 / n2)});
  }
  return out;
}

}  // namespace hwlab
