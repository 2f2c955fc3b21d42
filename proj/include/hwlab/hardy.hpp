#pragma once

// Hardy-space model: the unitary U from L2(0,1) onto H2 of the disc sends
// x^s to a multiple of a Szego kernel vector, and conjugates the averaging,
// antiderivative, and multiplication operators into combinations of the
// backward shift S* and the adjoint of composition by beta(z) = 1/(2-z).
// Everything here acts on truncated Taylor-coefficient vectors.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "hwlab/errors.hpp"
#include "hwlab/functions.hpp"
#include "hwlab/operators.hpp"

namespace hwlab {

using HardyVector = Eigen::VectorXcd;

// Taylor coefficients of the Szego kernel k_w(z) = 1/(1 - conj(w) z).
inline HardyVector szego_vector(Complex w, int N) {
  require(N >= 1, errc::invalid_argument, "szego vector needs N >= 1");
  require(std::abs(w) < 1.0, errc::invalid_argument, "szego parameter needs |w| < 1");
  HardyVector v(N);
  Complex c = 1.0;
  Complex r = std::conj(w);
  for (int k = 0; k < N; ++k) {
    v[k] = c;
    c *= r;
  }
  return v;
}

// Coefficients of U x^s = (1/(s+1)) k_{conj(s)/(conj(s)+1)}.
inline HardyVector u_monomial(Complex s, int N) {
  require(s.real() > -0.5, errc::not_in_l2, "x^s lies in L2(0,1) only for Re s > -1/2");
  Complex sb = std::conj(s);
  return szego_vector(sb / (sb + 1.0), N) / (s + 1.0);
}

// Pointwise (U f)(z) = (1/(1-z)) int_0^1 f(x) x^{z/(1-z)} dx by graded quadrature.
inline Complex u_integral(const ClosedForm& f, Complex z, int order = 320) {
  require(std::abs(z) < 1.0, errc::invalid_argument, "transform point needs |z| < 1");
  Complex e = z / (1.0 - z);
  if (f.support_start() == 0.0)
    require(f.exponent_at_zero() + e.real() > -1.0, errc::not_integrable,
            "transform integrand diverges at 0");
  auto integrand = [&](double x) { return f.at(x) * std::exp(e * std::log(x)); };
  Complex val = detail::graded_integral(integrand, f.support_start(), 1.0, true, order);
  return val / (1.0 - z);
}

// Column n holds the Taylor coefficients of beta(z)^n = (2-z)^{-n}:
// entry (k,n) = 2^{-n-k} binom(n+k-1, k) for n >= 1; column 0 is e_0.
// Entries are built by the multiplicative recurrence along each column, so
// no intermediate binomial ever overflows.
inline OperatorMatrix composition_matrix(int N) {
  require(N >= 1, errc::invalid_argument, "composition matrix needs N >= 1");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  M(0, 0) = 1.0;
  for (int n = 1; n < N; ++n) {
    double e = std::ldexp(1.0, -n);
    M(0, n) = e;
    for (int k = 1; k < N; ++k) {
      e *= 0.5 * double(n + k - 1) / double(k);
      M(k, n) = e;
    }
  }
  OperatorMatrix out;
  out.entries = M.cast<Complex>();
  out.basis = Basis::monomial;
  out.size = N;
  return out;
}

enum class HatIdentity { H_hat, V_hat, Mx_hat };

// Matrix of the transported operator on the first N Taylor coefficients:
// H_hat = 1 - S*, V_hat = (1 - S*) C_beta*, Mx_hat = S* C_beta*.
inline Eigen::MatrixXcd hat_matrix(HatIdentity which, int N) {
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j + 1 < N; ++j) S(j, j + 1) = 1.0;  // backward shift
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  if (which == HatIdentity::H_hat) return I - S;
  Eigen::MatrixXcd Cb = composition_matrix(N).entries.transpose();
  if (which == HatIdentity::V_hat) return (I - S) * Cb;
  return S * Cb;
}

// Max over monomials x^j, j <= d, of || U(op x^j) - hat_op (U x^j) ||
// in the first N coefficients. Both routes are closed-form:
// H x^j = x^j/(j+1), V x^j = x^{j+1}/(j+1), Mx x^j = x^{j+1}.
inline double hat_identity_residual(HatIdentity which, int N, int d) {
  require(N >= 2 && d >= 0, errc::invalid_argument, "need N >= 2 and d >= 0");
  require(4 * d <= N, errc::invalid_argument, "need d <= N/4 so truncation tails stay negligible");
  Eigen::MatrixXcd hat = hat_matrix(which, N);
  double worst = 0.0;
  for (int j = 0; j <= d; ++j) {
    HardyVector u = u_monomial(double(j), N);
    HardyVector lhs;
    switch (which) {
      case HatIdentity::H_hat:
        lhs = u / (j + 1.0);
        break;
      case HatIdentity::V_hat:
        lhs = u_monomial(double(j + 1), N) / (j + 1.0);
        break;
      case HatIdentity::Mx_hat:
        lhs = u_monomial(double(j + 1), N);
        break;
    }
    worst = std::max(worst, (hat * u - lhs).norm());
  }
  return worst;
}

// Gram matrix of {U x^n : n <= d} in the first N coefficients; unitarity of U
// makes this the Hilbert matrix 1/(n+m+1) up to truncation tails.
inline Eigen::MatrixXcd u_gram(int N, int d) {
  require(d >= 0, errc::invalid_argument, "need d >= 0");
  std::vector<HardyVector> us;
  us.reserve(d + 1);
  for (int n = 0; n <= d; ++n) us.push_back(u_monomial(double(n), N));
  Eigen::MatrixXcd G(d + 1, d + 1);
  for (int m = 0; m <= d; ++m)
    for (int n = 0; n <= d; ++n) G(m, n) = us[n].dot(us[m]);
  return G;
}

}  // namespace hwlab
