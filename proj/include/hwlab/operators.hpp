#pragma once

// The averaging operator H, the antiderivative operator V, multiplication Mx,
// their adjoints, and Z = H - Mx: pointwise application to sampled or closed
// form functions, plus dense matrix compressions in the monomial and
// orthonormal shifted Legendre bases.
//
// Polynomial-space exactness is the backbone: on a Gauss grid of order n the
// sampled function is identified with its interpolating polynomial and V acts
// by exact antidifferentiation; Legendre matrix entries are Gauss integrals
// of polynomial integrands of degree <= 2N, hence exact to rounding.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hwlab/errors.hpp"
#include "hwlab/functions.hpp"
#include "hwlab/legendre.hpp"
#include "hwlab/quadrature.hpp"

namespace hwlab {

enum class Op { H, V, Mx, Z, Hstar, Vstar, identity };

struct OperatorId {
  Op op = Op::Z;
  Complex shift{0.0, 0.0};  // the realized operator is (op - shift)
};

enum class Basis { monomial, legendre_orthonormal };

struct OperatorMatrix {
  Eigen::MatrixXcd entries;
  Basis basis = Basis::legendre_orthonormal;
  int size = 0;
};

inline double operator_norm(const Eigen::MatrixXcd& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

namespace detail {

// Legendre coefficients of the interpolating polynomial on a Gauss grid.
inline Eigen::VectorXcd legendre_project(const GridFunction& f) {
  const auto& g = *f.grid;
  int n = g.order;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  std::vector<double> L(n);
  for (int i = 0; i < n; ++i) {
    legendre_values(n, g.nodes[i], L.data());
    for (int k = 0; k < n; ++k) c[k] += g.weights[i] * f.values[i] * L[k];
  }
  return c;
}

// int_lo^hi f(t) dt with nodes graded toward the `toward` endpoint.
template <class F>
Complex graded_integral(const F& f, double lo, double hi, bool toward_lo, int order,
                        double grading = 3.0) {
  if (hi <= lo) return 0.0;
  std::vector<double> u, w;
  graded_unit_nodes(order, grading, u, w);
  double len = hi - lo;
  Complex acc = 0.0;
  for (int j = 0; j < order; ++j) {
    double t = toward_lo ? lo + len * u[j] : hi - len * u[j];
    acc += len * w[j] * f(t);
  }
  return acc;
}

inline int auto_inner_order(const ClosedForm& f) {
  // essential singularities narrow the double-exponential convergence strip
  if (f.get_if<ClosedForm::ZeroEigen>() || f.get_if<ClosedForm::ExpChain>()) return 320;
  return 192;
}

}  // namespace detail

// Apply to a sampled function. The grid must be Gauss-Legendre and the values
// are read as the interpolating polynomial of degree < order; V and the
// adjoints act by exact antidifferentiation of that polynomial. For H* the
// integrand f(t)/t is itself interpolated, which is exact when f vanishes
// at 0 to first order and an interpolation-error approximation otherwise.
inline GridFunction apply(const OperatorId& id, const GridFunction& f) {
  require(f.grid->scheme.kind == Scheme::Kind::gauss_legendre, errc::invalid_argument,
          "sampled application needs a gauss_legendre grid");
  const auto& g = *f.grid;
  int n = g.order;
  GridFunction out;
  out.grid = f.grid;
  out.values.resize(n);

  auto antiderivative_at_nodes = [&](const Eigen::VectorXcd& coeff) {
    Eigen::VectorXcd vals(n);
    std::vector<double> A(n);
    for (int i = 0; i < n; ++i) {
      legendre_antiderivatives(n, g.nodes[i], A.data());
      Complex acc = 0.0;
      for (int k = 0; k < n; ++k) acc += coeff[k] * A[k];
      vals[i] = acc;
    }
    return vals;
  };

  switch (id.op) {
    case Op::identity:
      out.values = f.values;
      break;
    case Op::Mx:
      for (int i = 0; i < n; ++i) out.values[i] = g.nodes[i] * f.values[i];
      break;
    case Op::V:
      out.values = antiderivative_at_nodes(detail::legendre_project(f));
      break;
    case Op::H: {
      out.values = antiderivative_at_nodes(detail::legendre_project(f));
      for (int i = 0; i < n; ++i) out.values[i] /= g.nodes[i];
      break;
    }
    case Op::Z: {
      out.values = antiderivative_at_nodes(detail::legendre_project(f));
      for (int i = 0; i < n; ++i)
        out.values[i] = out.values[i] / g.nodes[i] - g.nodes[i] * f.values[i];
      break;
    }
    case Op::Vstar: {
      Eigen::VectorXcd c = detail::legendre_project(f);
      Eigen::VectorXcd pref = antiderivative_at_nodes(c);
      for (int i = 0; i < n; ++i) out.values[i] = c[0] - pref[i];  // c0 = int_0^1 f
      break;
    }
    case Op::Hstar: {
      GridFunction h;
      h.grid = f.grid;
      h.values.resize(n);
      for (int i = 0; i < n; ++i) h.values[i] = f.values[i] / g.nodes[i];
      Eigen::VectorXcd c = detail::legendre_project(h);
      Eigen::VectorXcd pref = antiderivative_at_nodes(c);
      for (int i = 0; i < n; ++i) out.values[i] = c[0] - pref[i];
      break;
    }
  }
  if (id.shift != Complex(0.0, 0.0))
    for (int i = 0; i < n; ++i) out.values[i] -= id.shift * f.values[i];
  return out;
}

// Apply to a closed form by nested graded quadrature; inner_order 0 picks a
// default suited to the form's singularity type.
inline GridFunction apply(const OperatorId& id, const ClosedForm& f, GridPtr grid,
                          int inner_order = 0) {
  if (inner_order == 0) inner_order = detail::auto_inner_order(f);
  const auto& g = *grid;
  double lo = f.support_start();
  auto fx = [&](double t) { return f.at(t); };
  GridFunction out;
  out.grid = grid;
  out.values.resize(g.order);
  for (int i = 0; i < g.order; ++i) {
    double x = g.nodes[i];
    Complex v = 0.0;
    switch (id.op) {
      case Op::identity:
        v = f.at(x);
        break;
      case Op::Mx:
        v = x * f.at(x);
        break;
      case Op::V:
        v = detail::graded_integral(fx, lo, std::min(x, 1.0), true, inner_order);
        break;
      case Op::H:
        v = detail::graded_integral(fx, lo, std::min(x, 1.0), true, inner_order) / x;
        break;
      case Op::Z:
        v = detail::graded_integral(fx, lo, std::min(x, 1.0), true, inner_order) / x -
            x * f.at(x);
        break;
      case Op::Vstar:
        v = detail::graded_integral(fx, std::max(x, lo), 1.0, true, inner_order);
        break;
      case Op::Hstar: {
        auto fot = [&](double t) { return f.at(t) / t; };
        v = detail::graded_integral(fot, std::max(x, lo), 1.0, true, inner_order);
        break;
      }
    }
    if (id.shift != Complex(0.0, 0.0)) v -= id.shift * f.at(x);
    out.values[i] = v;
  }
  return out;
}

inline constexpr int kMonomialBasisCap = 40;  // Hilbert-matrix conditioning limit

inline OperatorMatrix assemble(const OperatorId& id, Basis basis, int N) {
  require(N >= 1, errc::invalid_argument, "assembly needs N >= 1");
  OperatorMatrix M;
  M.basis = basis;
  M.size = N;
  if (basis == Basis::monomial) {
    require(N <= kMonomialBasisCap, errc::invalid_argument,
            "monomial basis is capped at N = 40 by Hilbert-matrix conditioning");
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
    switch (id.op) {
      case Op::identity:
        A.setIdentity();
        break;
      case Op::H:
        for (int n = 0; n < N; ++n) A(n, n) = 1.0 / (n + 1.0);
        break;
      case Op::V:
        for (int n = 0; n + 1 < N; ++n) A(n + 1, n) = 1.0 / (n + 1.0);
        break;
      case Op::Mx:
        for (int n = 0; n + 1 < N; ++n) A(n + 1, n) = 1.0;
        break;
      case Op::Z:
        for (int n = 0; n < N; ++n) A(n, n) = 1.0 / (n + 1.0);
        for (int n = 0; n + 1 < N; ++n) A(n + 1, n) -= 1.0;
        break;
      case Op::Vstar:
        for (int n = 0; n < N; ++n) {
          A(0, n) = 1.0 / (n + 1.0);
          if (n + 1 < N) A(n + 1, n) -= 1.0 / (n + 1.0);
        }
        break;
      case Op::Hstar:
        fail(errc::invalid_argument,
             "H* leaves polynomial space (log term); use the legendre_orthonormal basis");
    }
    A -= id.shift * Eigen::MatrixXcd::Identity(N, N);
    M.entries = std::move(A);
    return M;
  }

  // legendre_orthonormal: Gauss integration of polynomial integrands, exact
  int q = N + 1;
  std::vector<double> x, w;
  gauss_nodes(q, x, w);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  auto accumulate = [&](auto&& op_values) {
    std::vector<double> L(N), Vv(N);
    for (int i = 0; i < q; ++i) {
      legendre_values(N, x[i], L.data());
      op_values(x[i], Vv);
      for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) A(m, n) += w[i] * L[m] * Vv[n];
    }
  };
  switch (id.op) {
    case Op::identity:
      A.setIdentity();
      break;
    case Op::Mx:
      accumulate([&](double xi, std::vector<double>& v) {
        legendre_values(N, xi, v.data());
        for (auto& t : v) t *= xi;
      });
      break;
    case Op::V:
      accumulate([&](double xi, std::vector<double>& v) {
        legendre_antiderivatives(N, xi, v.data());
      });
      break;
    case Op::H:
      accumulate([&](double xi, std::vector<double>& v) {
        legendre_antiderivatives(N, xi, v.data());
        for (auto& t : v) t /= xi;
      });
      break;
    case Op::Z:
      accumulate([&](double xi, std::vector<double>& v) {
        std::vector<double> L2(N);
        legendre_antiderivatives(N, xi, v.data());
        legendre_values(N, xi, L2.data());
        for (int n = 0; n < N; ++n) v[n] = v[n] / xi - xi * L2[n];
      });
      break;
    case Op::Hstar: {
      OperatorMatrix base = assemble(OperatorId{Op::H, 0.0}, basis, N);
      M.entries = base.entries.transpose().eval();
      M.entries -= id.shift * Eigen::MatrixXcd::Identity(N, N);
      return M;
    }
    case Op::Vstar: {
      OperatorMatrix base = assemble(OperatorId{Op::V, 0.0}, basis, N);
      M.entries = base.entries.transpose().eval();
      M.entries -= id.shift * Eigen::MatrixXcd::Identity(N, N);
      return M;
    }
  }
  M.entries = A.cast<Complex>();
  M.entries -= id.shift * Eigen::MatrixXcd::Identity(N, N);
  return M;
}

enum class CommutatorPair { VMx_vs_V2, HMx_vs_HV, identity_vs_identity };

// Operator norm of (left - right) on polynomials of degree < N-2, so the
// truncation rows a product would spill into never enter.
inline double commutator_residual(CommutatorPair pair, int N) {
  require(N >= 2, errc::invalid_argument, "commutator check needs N >= 2");
  auto mono = [&](Op op) { return assemble(OperatorId{op, 0.0}, Basis::monomial, N).entries; };
  Eigen::MatrixXcd D;
  switch (pair) {
    case CommutatorPair::VMx_vs_V2: {
      Eigen::MatrixXcd V = mono(Op::V), Mx = mono(Op::Mx);
      D = V * Mx - Mx * V + V * V;
      break;
    }
    case CommutatorPair::HMx_vs_HV: {
      Eigen::MatrixXcd H = mono(Op::H), Mx = mono(Op::Mx), V = mono(Op::V);
      D = H * Mx - Mx * H + H * V;
      break;
    }
    case CommutatorPair::identity_vs_identity: {
      Eigen::MatrixXcd I = mono(Op::identity);
      D = I - I;
      break;
    }
  }
  return operator_norm(D.leftCols(N - 2));
}

inline std::vector<double> singular_value_decay(const OperatorId& id, int N) {
  require(N >= 4, errc::invalid_argument, "singular value decay needs N >= 4");
  OperatorMatrix M = assemble(id, Basis::legendre_orthonormal, N);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.entries);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

}  // namespace hwlab
