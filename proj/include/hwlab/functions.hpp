#pragma once

// Closed-form function families on [0,1], their sampled representations, and
// L2 pairings. Every singular family is evaluated through log-space exponent
// combination so deep graded nodes never produce inf*0 artifacts.

#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hwlab/chain_polynomial.hpp"
#include "hwlab/errors.hpp"
#include "hwlab/quadrature.hpp"

namespace hwlab {

using Complex = std::complex<double>;

class ClosedForm {
 public:
  struct PowerEigen {
    Complex lambda;
    double support_start = 0.0;  // 0 on the bulb, -lambda on the stick
  };
  struct ZeroEigen {};
  struct ExpChain {
    ChainPolynomial poly;
  };
  struct Order1Stick {
    double s;
  };
  struct Monomial {
    Complex s;
  };
  struct Spike {
    double s;
    int n;
  };
  struct Upsilon {
    Complex alpha;
  };
  struct Indicator {
    double a, b;
  };

  static ClosedForm power_eigen(Complex lambda, double support_start = 0.0) {
    if (support_start != 0.0) {
      require(support_start > 0.0 && support_start < 1.0, errc::invalid_form,
              "supported power form needs support_start in (0,1)");
      require(lambda == Complex(-support_start, 0.0), errc::invalid_form,
              "supported power form requires lambda = -support_start");
    } else {
      require(lambda != Complex(0.0, 0.0), errc::invalid_form,
              "lambda = 0 has its own closed form");
    }
    return ClosedForm(PowerEigen{lambda, support_start});
  }
  static ClosedForm zero_eigen() { return ClosedForm(ZeroEigen{}); }
  static ClosedForm exp_chain(ChainPolynomial poly) { return ClosedForm(ExpChain{std::move(poly)}); }
  // structural constraint only; square integrability additionally needs s < 2/3
  static ClosedForm order1_stick(double s) {
    require(s > 0.0 && s < 1.0, errc::invalid_form, "order-1 form needs s in (0,1)");
    return ClosedForm(Order1Stick{s});
  }
  static ClosedForm monomial(Complex s) {
    require(s.real() > -0.5, errc::invalid_form, "monomial exponent needs Re s > -1/2");
    return ClosedForm(Monomial{s});
  }
  static ClosedForm spike(double s, int n) {
    require(s > 0.0 && s < 1.0 && n >= 1, errc::invalid_form, "spike needs s in (0,1), n >= 1");
    require(1.0 / n < std::min(s, 1.0 - s), errc::invalid_form,
            "spike needs 1/n < min{s, 1-s}");
    return ClosedForm(Spike{s, n});
  }
  static ClosedForm upsilon(Complex alpha) {
    require(std::abs(alpha) < 1.0, errc::invalid_form, "upsilon needs |alpha| < 1");
    return ClosedForm(Upsilon{alpha});
  }
  static ClosedForm indicator(double a, double b) {
    require(a >= 0.0 && a < b && b <= 1.0, errc::invalid_form,
            "indicator needs 0 <= a < b <= 1");
    return ClosedForm(Indicator{a, b});
  }

  Complex at(double x) const {
    return std::visit([&](const auto& f) { return eval(f, x); }, v_);
  }

  bool is_square_integrable() const {
    if (auto* p = std::get_if<PowerEigen>(&v_)) {
      if (p->support_start > 0.0) return true;
      return (1.0 / p->lambda).real() > 0.5;  // equivalent to |lambda - 1| < 1
    }
    if (auto* o = std::get_if<Order1Stick>(&v_)) return o->s < 2.0 / 3.0;
    return true;
  }

  // endpoint toward which quadrature should grade; negative when none is needed
  double singular_endpoint() const {
    if (auto* p = std::get_if<PowerEigen>(&v_)) return p->support_start;
    if (auto* o = std::get_if<Order1Stick>(&v_)) return o->s;
    if (std::holds_alternative<Spike>(v_) || std::holds_alternative<Indicator>(v_)) return -1.0;
    return 0.0;
  }

  // left edge of the support (integrations from 0 may start here)
  double support_start() const {
    if (auto* p = std::get_if<PowerEigen>(&v_)) return p->support_start;
    if (auto* o = std::get_if<Order1Stick>(&v_)) return o->s;
    if (auto* sp = std::get_if<Spike>(&v_)) return sp->s - 1.0 / sp->n;
    if (auto* in = std::get_if<Indicator>(&v_)) return in->a;
    return 0.0;
  }

  // lower bound for the power behavior at 0 (plus infinity when the form
  // vanishes near 0 or decays faster than any power)
  double exponent_at_zero() const {
    if (auto* p = std::get_if<PowerEigen>(&v_)) {
      if (p->support_start > 0.0) return std::numeric_limits<double>::infinity();
      return (1.0 / p->lambda - 1.0).real();
    }
    if (auto* m = std::get_if<Monomial>(&v_)) return m->s.real();
    if (auto* u = std::get_if<Upsilon>(&v_)) return (-u->alpha / (1.0 + u->alpha)).real();
    if (auto* in = std::get_if<Indicator>(&v_)) return in->a > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::numeric_limits<double>::infinity();
  }

  const char* variant_name() const {
    struct Namer {
      const char* operator()(const PowerEigen&) const { return "power-eigen"; }
      const char* operator()(const ZeroEigen&) const { return "zero-eigen"; }
      const char* operator()(const ExpChain&) const { return "exp-chain"; }
      const char* operator()(const Order1Stick&) const { return "order1-stick"; }
      const char* operator()(const Monomial&) const { return "monomial"; }
      const char* operator()(const Spike&) const { return "spike"; }
      const char* operator()(const Upsilon&) const { return "upsilon"; }
      const char* operator()(const Indicator&) const { return "indicator"; }
    };
    return std::visit(Namer{}, v_);
  }

  template <class V>
  const V* get_if() const {
    return std::get_if<V>(&v_);
  }

 private:
  using Variant = std::variant<PowerEigen, ZeroEigen, ExpChain, Order1Stick, Monomial, Spike,
                               Upsilon, Indicator>;
  explicit ClosedForm(Variant v) : v_(std::move(v)) {}

  static Complex eval(const PowerEigen& f, double x) {
    double s = f.support_start;
    if (s > 0.0) {
      double tau = x - s;
      if (tau <= 0.0) return 0.0;
      double inv = 1.0 / s;
      return std::exp((inv - 1.0) * std::log(tau) - (inv + 1.0) * std::log(x));
    }
    if (x <= 0.0) return 0.0;
    Complex il = 1.0 / f.lambda;
    return std::exp((il - 1.0) * std::log(x) - (1.0 + il) * std::log(Complex(x) + f.lambda));
  }
  static Complex eval(const ZeroEigen&, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(-2.0 * std::log(x) - 1.0 / x);
  }
  static Complex eval(const ExpChain& f, double x) {
    if (x <= 0.0) return 0.0;
    double lx = std::log(x);
    double acc = 0.0;
    for (const auto& [k, c] : f.poly.coeffs) {
      Rational cr = c;
      double cd = cr.numerator().convert_to<double>() / cr.denominator().convert_to<double>();
      acc += cd * std::exp(-k * lx - 1.0 / x);
    }
    return acc;
  }
  static Complex eval(const Order1Stick& f, double x) {
    double s = f.s;
    double tau = x - s;
    if (tau <= 0.0) return 0.0;
    double lt = std::log(tau), lx = std::log(x), inv = 1.0 / s;
    double t1 = (inv * inv) * (lt - lx) * std::exp((inv - 1.0) * lt - (inv + 1.0) * lx);
    double t2 = ((1.0 - s) * inv) * std::exp((inv - 2.0) * lt - (inv + 1.0) * lx);
    return t1 + t2;
  }
  static Complex eval(const Monomial& f, double x) {
    if (x <= 0.0) return 0.0;
    return std::exp(f.s * std::log(x));
  }
  static Complex eval(const Spike& f, double x) {
    double half = 1.0 / f.n;
    return (x >= f.s - half && x <= f.s + half) ? std::sqrt(f.n / 2.0) : 0.0;
  }
  static Complex eval(const Upsilon& f, double x) {
    if (x <= 0.0) return 0.0;
    Complex scale = std::sqrt(1.0 - std::norm(f.alpha)) / (1.0 + f.alpha);
    return scale * std::exp(-(f.alpha / (1.0 + f.alpha)) * std::log(x));
  }
  static Complex eval(const Indicator& f, double x) {
    return (x >= f.a && x <= f.b) ? 1.0 : 0.0;
  }

  Variant v_;
};

struct GridFunction {
  GridPtr grid;
  Eigen::VectorXcd values;

  double l2_norm() const {
    double acc = 0.0;
    for (int i = 0; i < values.size(); ++i) acc += grid->weights[i] * std::norm(values[i]);
    return std::sqrt(acc);
  }
};

inline GridFunction evaluate(const ClosedForm& form, GridPtr grid) {
  GridFunction out;
  out.grid = std::move(grid);
  out.values.resize(out.grid->order);
  for (int i = 0; i < out.grid->order; ++i) {
    Complex v = form.at(out.grid->nodes[i]);
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), errc::invalid_form,
            "form evaluates non-finite inside (0,1)");
    out.values[i] = v;
  }
  return out;
}

inline Complex inner_product(const GridFunction& f, const GridFunction& g) {
  require(f.grid == g.grid, errc::grid_mismatch, "inner product needs a shared grid");
  Complex acc = 0.0;
  for (int i = 0; i < f.values.size(); ++i)
    acc += f.grid->weights[i] * f.values[i] * std::conj(g.values[i]);
  return acc;
}

// ---- piecewise-exact integration for step forms ------------------------------

inline bool is_step_form(const ClosedForm& f) {
  return f.get_if<ClosedForm::Spike>() != nullptr || f.get_if<ClosedForm::Indicator>() != nullptr;
}

// constant pieces (a, b, value) of a step form
inline std::vector<std::tuple<double, double, double>> step_pieces(const ClosedForm& f) {
  if (auto* sp = f.get_if<ClosedForm::Spike>()) {
    double h = 1.0 / sp->n;
    return {{sp->s - h, sp->s + h, std::sqrt(sp->n / 2.0)}};
  }
  if (auto* in = f.get_if<ClosedForm::Indicator>())
    return {{in->a, in->b, 1.0}};
  fail(errc::invalid_argument, "not a step form");
}

inline double exact_l2_norm(const ClosedForm& f) {
  double acc = 0.0;
  for (auto& [a, b, v] : step_pieces(f)) acc += v * v * (b - a);
  return std::sqrt(acc);
}

// int p(x) |f(x)|^2 dx for a step form f and polynomial p, exactly
inline double step_poly_moment(const ClosedForm& f, const std::vector<double>& p) {
  double acc = 0.0;
  for (auto& [a, b, v] : step_pieces(f)) {
    double pa = 0.0, pb = 0.0, ka = a, kb = b;
    for (std::size_t k = 0; k < p.size(); ++k) {
      pa += p[k] * ka / (k + 1.0);
      pb += p[k] * kb / (k + 1.0);
      ka *= a;
      kb *= b;
    }
    acc += v * v * (pb - pa);
  }
  return acc;
}

// ---- norm trajectories --------------------------------------------------------

enum class TrajectoryVerdict { converged, diverging, undecided };

inline std::vector<std::pair<int, double>> norm_trajectory(const ClosedForm& form,
                                                           const std::vector<int>& orders) {
  for (std::size_t i = 1; i < orders.size(); ++i)
    require(orders[i] > orders[i - 1], errc::invalid_argument, "orders must increase");
  double e = form.singular_endpoint();
  std::vector<std::pair<int, double>> out;
  for (int n : orders) {
    GridPtr g = (e < 0.0) ? make_grid(n) : make_grid(n, Scheme::graded(e, 3.0));
    const auto& grid = *g;
    double acc = 0.0;
    for (int i = 0; i < grid.order; ++i) acc += grid.weights[i] * std::norm(form.at(grid.nodes[i]));
    out.emplace_back(n, std::sqrt(acc));
  }
  return out;
}

inline TrajectoryVerdict trajectory_verdict(const std::vector<std::pair<int, double>>& traj) {
  if (traj.size() < 2) return TrajectoryVerdict::undecided;
  double last = traj.back().second, prev = traj[traj.size() - 2].second;
  if (!std::isfinite(last)) return TrajectoryVerdict::diverging;
  if (traj.size() >= 4) {
    double base = traj[traj.size() - 4].second;
    if (!std::isfinite(base) || last >= 1.5 * base) return TrajectoryVerdict::diverging;
  }
  if (std::fabs(last - prev) < 1e-8 * std::fabs(last)) return TrajectoryVerdict::converged;
  return TrajectoryVerdict::undecided;
}

}  // namespace hwlab
