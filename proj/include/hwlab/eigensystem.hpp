#pragma once

// Eigenfunctions of Z = H - Mx and generalized-eigenvector chains. Three
// regimes: exact rational polynomials at lambda = 0, a closed form at order 1
// on the stick, and numeric chains of any admissible order. Numeric chains
// live on a dyadic mesh in tau = x - s (s = -lambda): each member factors as
// f_n = Phi(x) w_n(tau) with Phi = ((x-s)/x)^{1/s}, and w_n stays panelwise
// smooth even where f_n blows up, so 16-point panel projections hold spectral
// accuracy down to tau ~ 2^-72.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "hwlab/chain_polynomial.hpp"
#include "hwlab/errors.hpp"
#include "hwlab/functions.hpp"
#include "hwlab/legendre.hpp"
#include "hwlab/operators.hpp"
#include "hwlab/quadrature.hpp"

namespace hwlab {

// Point spectrum of Z: the open disc D(1,1) plus the half-open stick (-1, 0].
inline ClosedForm eigenfunction(Complex lambda) {
  if (lambda == Complex(0.0, 0.0)) return ClosedForm::zero_eigen();
  if (std::abs(lambda - Complex(1.0, 0.0)) < 1.0) return ClosedForm::power_eigen(lambda, 0.0);
  if (lambda.imag() == 0.0 && lambda.real() > -1.0 && lambda.real() < 0.0)
    return ClosedForm::power_eigen(lambda, -lambda.real());
  fail(errc::not_an_eigenvalue, "lambda lies outside D(1,1) and (-1,0]");
}

// Chain at lambda = 0 in exact rational arithmetic. Member n is
// p_n(1/x) e^{-1/x} with p_0 = u^2 and the recursion
// q_n = antiderivative of p_n(u)/u (zero constant), p_{n+1} = u^2 q_n - u^2 q_n'.
inline std::vector<ChainPolynomial> chain_zero(int m) {
  require(m >= 0, errc::invalid_argument, "chain length m must be >= 0");
  std::vector<ChainPolynomial> out;
  ChainPolynomial p0;
  p0.order = 0;
  p0.set(2, Rational(1));
  out.push_back(std::move(p0));
  for (int n = 0; n < m; ++n) {
    ChainPolynomial next;
    next.order = n + 1;
    for (const auto& [k, c] : out.back().coeffs) {
      Rational q = c / k;  // valuation >= 2 keeps k nonzero
      next.set(k + 2, next.coeff(k + 2) + q);
      next.set(k + 1, next.coeff(k + 1) - q * k);
    }
    out.push_back(std::move(next));
  }
  return out;
}

// Closed order-1 chain member over the stick point lambda = -s.
inline ClosedForm chain_stick_order1(double s) {
  require(s > 0.0 && s < 1.0, errc::invalid_argument, "order-1 chain needs s in (0,1)");
  require(s < 2.0 / 3.0, errc::not_in_l2, "order-1 member lies in L2 only for s < 2/3");
  return ClosedForm::order1_stick(s);
}

namespace detail {

// The open interval is where every member is square integrable; at the left
// endpoint itself the top member is only borderline (log-divergent norm) but
// the construction and its growth bounds stay meaningful, so the endpoint is
// admitted.
inline void check_stick_admissible(double lambda, int m) {
  double thr = -2.0 / (2 * m + 1);
  if (!(lambda >= thr && lambda < 0.0)) {
    std::ostringstream os;
    os << "order-" << m << " chain needs lambda in [-2/(2m+1), 0) = [" << thr
       << ", 0); got lambda = " << lambda;
    fail(errc::not_in_l2, os.str());
  }
}

// Dyadic-panel machinery for stick chains. Panels in tau = x - s halve down
// to span * 2^-72; on each panel the reduced profile w_n is projected onto 16
// Legendre modes, giving exact-in-polynomial partial integrals for both the
// chain recursion (suffix integrals) and the residual check (prefix).
class StickChain {
 public:
  static constexpr int kPanels = 72;
  static constexpr int kQ = 16;
  static constexpr int kViewStart = 26;  // panels kept for the exported grid

  StickChain(double s, int m) : s_(s), span_(1.0 - s) {
    gauss_nodes(kQ, ux_, uw_);
    Lu_.assign(kQ, std::vector<double>(kQ));
    Au_.assign(kQ, std::vector<double>(kQ));
    for (int i = 0; i < kQ; ++i) {
      legendre_values(kQ, ux_[i], Lu_[i].data());
      legendre_antiderivatives(kQ, ux_[i], Au_[i].data());
    }
    lo_.resize(kPanels);
    wid_.resize(kPanels);
    int total = kPanels * kQ;
    tau_.resize(total);
    gw_.resize(total);
    phi_.resize(total);
    for (int p = 0; p < kPanels; ++p) {
      double a = span_ * std::ldexp(1.0, -(kPanels - p));
      double b = (p == kPanels - 1) ? span_ : span_ * std::ldexp(1.0, -(kPanels - p - 1));
      lo_[p] = a;
      wid_[p] = b - a;
      for (int i = 0; i < kQ; ++i) {
        double t = a + (b - a) * ux_[i];
        tau_[p * kQ + i] = t;
        gw_[p * kQ + i] = (b - a) * uw_[i];
        phi_[p * kQ + i] = std::exp((std::log(t) - std::log(s + t)) / s);
      }
    }

    w_.resize(m + 1);
    w_[0].resize(total);
    for (int i = 0; i < total; ++i) w_[0][i] = 1.0 / ((s + tau_[i]) * tau_[i]);
    // aligning constant: makes member 1 match the closed order-1 form
    double psi1 = std::log(1.0 - s) / (s * s) + 1.0 / (s * (1.0 - s));
    for (int n = 0; n < m; ++n) {
      std::vector<double> g(total);
      for (int i = 0; i < total; ++i) g[i] = w_[n][i] / tau_[i];
      std::vector<double> I = suffix_integral(g);
      w_[n + 1].resize(total);
      for (int i = 0; i < total; ++i)
        w_[n + 1][i] = I[i] / ((s + tau_[i]) * tau_[i]) - w_[n][i] / tau_[i];
      if (n == 0)
        for (int i = 0; i < total; ++i) w_[1][i] += psi1 * w_[0][i];
    }

    wc_.resize(m + 1);
    for (int n = 0; n <= m; ++n) wc_[n] = panel_coeffs(w_[n]);
    eigen_rel0_ = residual(0, nullptr);
    step_rel_.resize(m);
    for (int n = 0; n < m; ++n) step_rel_[n] = residual(n + 1, &w_[n]);
  }

  double s() const { return s_; }
  double lambda() const { return -s_; }
  int order() const { return int(w_.size()) - 1; }
  double eigen_residual0() const { return eigen_rel0_; }
  const std::vector<double>& step_residuals() const { return step_rel_; }

  // f_n at an arbitrary point: panel interpolation inside the mesh, power-law
  // tail w_n ~ w_n(tau_0) (tau/tau_0)^{-n-1} below it, zero left of s.
  double member_at(int n, double x) const {
    double t = x - s_;
    if (t <= 0.0) return 0.0;
    double lt = std::log(t), lx = std::log(x);
    if (t < lo_[0]) {
      double mag = (lt - lx) / s_ - (n + 1.0) * (lt - std::log(tau_[0]));
      return w_[n][0] * std::exp(mag);
    }
    double ratio = std::min(t / span_, 1.0);
    int p = std::clamp(kPanels - 1 - int(std::floor(-std::log2(ratio))), 0, kPanels - 1);
    if (t < lo_[p] && p > 0) --p;
    if (p + 1 < kPanels && t >= lo_[p] + wid_[p]) ++p;
    double u = std::clamp((t - lo_[p]) / wid_[p], 0.0, 1.0);
    double L[kQ];
    legendre_values(kQ, u, L);
    double acc = 0.0;
    for (int k = 0; k < kQ; ++k) acc += wc_[n][p * kQ + k] * L[k];
    return std::exp((lt - lx) / s_) * acc;
  }

  // <f_a, f_b> over the mesh
  double inner(int a, int b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < tau_.size(); ++i)
      acc += gw_[i] * phi_[i] * phi_[i] * w_[a][i] * w_[b][i];
    return acc;
  }

  // sup over the mesh of |f_n(x)| (x-s)^{n+1-1/s}
  double growth_measure(int n) const {
    double best = 0.0;
    for (std::size_t i = 0; i < tau_.size(); ++i) {
      double v = std::fabs(w_[n][i]) *
                 std::exp((n + 1.0) * std::log(tau_[i]) - std::log(s_ + tau_[i]) / s_);
      best = std::max(best, v);
    }
    return best;
  }

  // exported grid: a small rule on [0,s] (members vanish there) plus the
  // shallow panels, so node count stays moderate and weights sum to 1
  GridPtr view_grid() const {
    auto g = std::make_shared<QuadratureGrid>();
    std::vector<double> gx, gwv;
    gauss_nodes(8, gx, gwv);
    for (int i = 0; i < 8; ++i) {
      g->nodes.push_back(s_ * gx[i]);
      g->weights.push_back(s_ * gwv[i]);
    }
    for (int p = kViewStart; p < kPanels; ++p)
      for (int i = 0; i < kQ; ++i) {
        g->nodes.push_back(s_ + tau_[p * kQ + i]);
        g->weights.push_back(gw_[p * kQ + i]);
      }
    g->order = int(g->nodes.size());
    g->scheme = Scheme::graded(s_, 3.0);
    return g;
  }

  Eigen::VectorXcd view_values(int n) const {
    int count = 8 + (kPanels - kViewStart) * kQ;
    Eigen::VectorXcd v(count);
    for (int i = 0; i < 8; ++i) v[i] = 0.0;
    int at = 8;
    for (int p = kViewStart; p < kPanels; ++p)
      for (int i = 0; i < kQ; ++i, ++at) v[at] = phi_[p * kQ + i] * w_[n][p * kQ + i];
    return v;
  }

 private:
  std::vector<double> panel_coeffs(const std::vector<double>& v) const {
    std::vector<double> c(kPanels * kQ, 0.0);
    for (int p = 0; p < kPanels; ++p)
      for (int i = 0; i < kQ; ++i)
        for (int k = 0; k < kQ; ++k) c[p * kQ + k] += uw_[i] * v[p * kQ + i] * Lu_[i][k];
    return c;
  }

  std::vector<double> suffix_integral(const std::vector<double>& v) const {
    std::vector<double> c = panel_coeffs(v);
    std::vector<double> full(kPanels), above(kPanels + 1, 0.0);
    for (int p = 0; p < kPanels; ++p) full[p] = wid_[p] * c[p * kQ];
    for (int p = kPanels - 1; p >= 0; --p) above[p] = above[p + 1] + full[p];
    std::vector<double> out(v.size());
    for (int p = 0; p < kPanels; ++p)
      for (int i = 0; i < kQ; ++i) {
        double upto = 0.0;
        for (int k = 0; k < kQ; ++k) upto += c[p * kQ + k] * Au_[i][k];
        out[p * kQ + i] = above[p + 1] + (full[p] - wid_[p] * upto);
      }
    return out;
  }

  std::vector<double> prefix_integral(const std::vector<double>& v) const {
    std::vector<double> c = panel_coeffs(v);
    std::vector<double> full(kPanels), below(kPanels + 1, 0.0);
    for (int p = 0; p < kPanels; ++p) full[p] = wid_[p] * c[p * kQ];
    for (int p = 0; p < kPanels; ++p) below[p + 1] = below[p] + full[p];
    std::vector<double> out(v.size());
    for (int p = 0; p < kPanels; ++p)
      for (int i = 0; i < kQ; ++i) {
        double upto = 0.0;
        for (int k = 0; k < kQ; ++k) upto += c[p * kQ + k] * Au_[i][k];
        out[p * kQ + i] = below[p] + wid_[p] * upto;
      }
    return out;
  }

  // relative residual of (Z + s) f_k = prev (prev null: eigen equation)
  double residual(int k, const std::vector<double>* prev) const {
    std::vector<double> fv(tau_.size());
    for (std::size_t i = 0; i < tau_.size(); ++i) fv[i] = phi_[i] * w_[k][i];
    std::vector<double> F = prefix_integral(fv);
    double r2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < tau_.size(); ++i) {
      double x = s_ + tau_[i];
      double target = prev ? phi_[i] * (*prev)[i] : 0.0;
      double r = F[i] / x - tau_[i] * fv[i] - target;
      double ref = prev ? target : fv[i];
      r2 += gw_[i] * r * r;
      n2 += gw_[i] * ref * ref;
    }
    return std::sqrt(r2 / n2);
  }

  double s_, span_;
  std::vector<double> ux_, uw_;
  std::vector<std::vector<double>> Lu_, Au_;
  std::vector<double> lo_, wid_, tau_, gw_, phi_;
  std::vector<std::vector<double>> w_, wc_;
  std::vector<double> step_rel_;
  double eigen_rel0_ = 0.0;
};

}  // namespace detail

struct ChainFamily {
  Complex lambda;
  std::vector<GridFunction> members;     // orders 0..m sampled on a shared grid
  std::vector<double> step_residuals;    // relative residual of step n -> n+1
  double eigen_residual0 = 0.0;
  std::shared_ptr<const detail::StickChain> chain;  // full-depth evaluator
};

inline ChainFamily chain_numeric(double lambda, int m) {
  require(m >= 1, errc::invalid_argument, "chain order m must be >= 1");
  detail::check_stick_admissible(lambda, m);
  auto impl = std::make_shared<detail::StickChain>(-lambda, m);
  ChainFamily fam;
  fam.lambda = lambda;
  GridPtr g = impl->view_grid();
  for (int n = 0; n <= m; ++n) {
    GridFunction f;
    f.grid = g;
    f.values = impl->view_values(n);
    fam.members.push_back(std::move(f));
  }
  fam.step_residuals = impl->step_residuals();
  fam.eigen_residual0 = impl->eigen_residual0();
  fam.chain = std::move(impl);
  return fam;
}

struct GrowthRow {
  int n;
  double measured;  // sup |f_n(x)| (x-s)^{n+1-1/s}
  double bound;     // B_0 = s^{-1-1/s}, B_{n+1} = B_n (1 + B_0/(n+1))
  bool within;
};

inline std::vector<GrowthRow> growth_bound_check(const ChainFamily& fam) {
  require(fam.chain != nullptr, errc::invalid_argument, "family lacks its numeric backend");
  double s = fam.chain->s();
  double m0 = std::pow(s, -1.0 - 1.0 / s);
  std::vector<GrowthRow> out;
  double bound = m0;
  for (int n = 0; n < int(fam.members.size()); ++n) {
    double meas = fam.chain->growth_measure(n);
    out.push_back({n, meas, bound, meas <= bound * (1.0 + 1e-9)});
    bound *= 1.0 + m0 / (n + 1.0);
  }
  return out;
}

// L2 distance of order-n members at two nearby stick points, on a shared
// grid graded toward both support edges.
inline double chain_continuity_probe(double l1, double l2, int n) {
  require(n >= 1, errc::invalid_argument, "probe needs chain order n >= 1");
  detail::check_stick_admissible(l1, n);
  detail::check_stick_admissible(l2, n);
  require(std::fabs(l1 - l2) <= 0.05, errc::invalid_argument, "probe needs |l1 - l2| <= 0.05");
  detail::StickChain c1(-l1, n), c2(-l2, n);
  double smin = std::min(-l1, -l2), smax = std::max(-l1, -l2);
  std::vector<double> nodes, wts;
  if (smax - smin > 1e-15) detail::append_graded_piece(160, 3.0, smin, smax, smin, nodes, wts);
  detail::append_graded_piece(160, 3.0, smax, 1.0, smax, nodes, wts);
  double d2 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double d = c1.member_at(n, nodes[i]) - c2.member_at(n, nodes[i]);
    d2 += wts[i] * d * d;
  }
  return std::sqrt(d2);
}

// Pairing <p(Z) f_1, g> with g solved from <f_0,g> = 1, <f_1,g> = 0; the
// chain rule p(Z)f_1 = p(lambda) f_1 + p'(lambda) f_0 reduces p(Z) exactly,
// so the return value reproduces p'(lambda).
inline Complex derivative_functional(double lambda, const std::vector<Complex>& poly) {
  detail::check_stick_admissible(lambda, 1);
  detail::StickChain c(-lambda, 1);
  double G00 = c.inner(0, 0), G01 = c.inner(0, 1), G11 = c.inner(1, 1);
  double tr = G00 + G11, det = G00 * G11 - G01 * G01;
  double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  double emin = 0.5 * tr - disc, emax = 0.5 * tr + disc;
  require(emin > 0.0 && emax <= 1e12 * emin, errc::degenerate_chain,
          "chain Gram matrix is numerically singular");
  double a = G11 / det, b = -G01 / det;
  double f0g = a * G00 + b * G01;  // designed to be 1
  double f1g = a * G01 + b * G11;  // designed to be 0
  Complex p = 0.0, dp = 0.0;
  for (int k = int(poly.size()) - 1; k >= 0; --k) {
    dp = dp * lambda + p;
    p = p * lambda + poly[k];
  }
  return p * f1g + dp * f0g;
}

struct AdjointVerdict {
  bool only_trivial = true;
  double boundary_magnitude = 0.0;  // |G(1)/c| for the adjoint ODE solution
};

// The adjoint eigenvalue equation forces G(x) = c x^{-1/lambda}(x+lambda)^{1/lambda}
// (G = c e^{1/x} at lambda = 0), whose boundary value G(1) vanishes only for
// c = 0; the point spectrum of the adjoint is therefore empty.
inline AdjointVerdict adjoint_candidate(Complex lambda) {
  AdjointVerdict v;
  if (lambda == Complex(0.0, 0.0)) {
    v.boundary_magnitude = std::exp(1.0);
    return v;
  }
  v.boundary_magnitude = std::abs(std::exp(std::log(Complex(1.0, 0.0) + lambda) / lambda));
  return v;
}

// ---- quadrature residual oracles ----------------------------------------------

// ||(Z - lambda) f|| / ||f|| on a grid graded toward the form's singularity.
inline double eigen_residual(const ClosedForm& f, Complex lambda, int grid_order = 96,
                             int inner_order = 0, double grading = 3.0) {
  require(grading >= 1.0, errc::invalid_argument, "grading exponent must be >= 1");
  double e = f.singular_endpoint();
  GridPtr g = (e < 0.0) ? make_grid(grid_order) : make_grid(grid_order, Scheme::graded(e, grading));
  GridFunction zf = apply(OperatorId{Op::Z, lambda}, f, g, inner_order);
  double r2 = 0.0, n2 = 0.0;
  for (int i = 0; i < g->order; ++i) {
    r2 += g->weights[i] * std::norm(zf.values[i]);
    n2 += g->weights[i] * std::norm(f.at(g->nodes[i]));
  }
  return std::sqrt(r2 / n2);
}

// ||(Z - lambda) f_next - f_prev|| / ||f_prev|| for closed-form chain steps.
inline double chain_step_residual(const ClosedForm& next, const ClosedForm& prev, Complex lambda,
                                  int grid_order = 128, int inner_order = 0) {
  if (inner_order == 0)
    inner_order = std::max(detail::auto_inner_order(next), detail::auto_inner_order(prev));
  double e = next.singular_endpoint();
  GridPtr g = (e < 0.0) ? make_grid(grid_order) : make_grid(grid_order, Scheme::graded(e, 3.0));
  GridFunction zf = apply(OperatorId{Op::Z, lambda}, next, g, inner_order);
  double r2 = 0.0, n2 = 0.0;
  for (int i = 0; i < g->order; ++i) {
    Complex pv = prev.at(g->nodes[i]);
    r2 += g->weights[i] * std::norm(zf.values[i] - pv);
    n2 += g->weights[i] * std::norm(pv);
  }
  return std::sqrt(r2 / n2);
}

}  // namespace hwlab
