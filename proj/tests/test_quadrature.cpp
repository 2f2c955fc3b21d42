#include <catch2/catch_amalgamated.hpp>

#include <hwlab/functions.hpp>

#include <cmath>
#include <optional>
#include <random>

using namespace hwlab;
using Catch::Approx;

namespace {

template <class F>
std::optional<errc> code_of(F&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return std::nullopt;
}

// L2 norm of f over [lo, 1], integrated on a grid graded toward the left edge.
double truncated_norm(const ClosedForm& f, double lo, int order) {
  GridPtr g = make_grid(order, Scheme::graded(0.0, 3.0));
  double span = 1.0 - lo, acc = 0.0;
  for (int i = 0; i < g->order; ++i)
    acc += span * g->weights[i] * std::norm(f.at(lo + span * g->nodes[i]));
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("two point gauss rule matches the closed-form nodes") {
  GridPtr g = make_grid(2);
  REQUIRE(g->order == 2);
  CHECK(g->nodes[0] == Approx((3.0 - std::sqrt(3.0)) / 6.0).margin(1e-15));
  CHECK(g->nodes[1] == Approx((3.0 + std::sqrt(3.0)) / 6.0).margin(1e-15));
  CHECK(g->weights[0] == Approx(0.5).margin(1e-15));
  CHECK(g->weights[1] == Approx(0.5).margin(1e-15));

  double cubic = 0.0;
  for (int i = 0; i < 2; ++i) cubic += g->weights[i] * std::pow(g->nodes[i], 3);
  CHECK(cubic == Approx(0.25).margin(1e-14));
}

TEST_CASE("gauss weights are positive and normalized") {
  for (int n : {2, 7, 16, 65}) {
    GridPtr g = make_grid(n);
    double sum = 0.0;
    for (int i = 0; i < g->order; ++i) {
      CHECK(g->weights[i] > 0.0);
      if (i) CHECK(g->nodes[i] > g->nodes[i - 1]);
      sum += g->weights[i];
    }
    CHECK(sum == Approx(1.0).margin(1e-13));
    CHECK(g->nodes.front() > 0.0);
    CHECK(g->nodes.back() < 1.0);
  }
}

TEST_CASE("graded rule absorbs an endpoint singularity") {
  GridPtr g = make_grid(64, Scheme::graded(0.0, 2.0));
  double acc = 0.0;
  for (int i = 0; i < g->order; ++i) acc += g->weights[i] * std::pow(g->nodes[i], -0.25);
  CHECK(acc == Approx(4.0 / 3.0).margin(1e-10));

  double sum = 0.0;
  for (double w : g->weights) sum += w;
  CHECK(sum == Approx(1.0).margin(1e-12));
}

TEST_CASE("graded rule with an interior cluster point") {
  GridPtr g = make_grid(80, Scheme::graded(0.5, 3.0));
  double acc = 0.0;
  for (int i = 0; i < g->order; ++i)
    acc += g->weights[i] * std::pow(std::fabs(g->nodes[i] - 0.5), -0.25);
  // int_0^1 |x-1/2|^{-1/4} dx = 2 * (1/2)^{3/4} / (3/4)
  CHECK(acc == Approx(8.0 / 3.0 * std::pow(0.5, 0.75)).margin(1e-9));
}

TEST_CASE("grid construction gates") {
  CHECK(code_of([] { make_grid(1); }) == errc::invalid_argument);
  CHECK(code_of([] { make_grid(16, Scheme::graded(1.0, 3.0)); }) == errc::invalid_argument);
  CHECK(code_of([] { make_grid(16, Scheme::graded(-0.1, 3.0)); }) == errc::invalid_argument);
  CHECK(code_of([] { make_grid(16, Scheme::graded(0.0, 0.5)); }) == errc::invalid_argument);
  CHECK(code_of([] { make_grid(3, Scheme::graded(0.5, 3.0)); }) == errc::invalid_argument);
}

TEST_CASE("closed form point values") {
  // bulb member at lambda = 1 is 1/(1+x)^2
  CHECK(ClosedForm::power_eigen(1.0).at(0.5).real() == Approx(4.0 / 9.0).margin(1e-15));
  CHECK(ClosedForm::power_eigen(1.0).at(0.5).imag() == 0.0);
  // lambda = 0 member is x^{-2} e^{-1/x}
  CHECK(ClosedForm::zero_eigen().at(1.0).real() == Approx(std::exp(-1.0)).margin(1e-16));
  CHECK(ClosedForm::zero_eigen().at(0.25).real() == Approx(16.0 * std::exp(-4.0)).margin(1e-14));
  CHECK(ClosedForm::zero_eigen().at(0.0) == Complex(0.0, 0.0));

  for (double x : {0.1, 0.5, 0.9})
    CHECK(std::abs(ClosedForm::upsilon(0.0).at(x) - Complex(1.0, 0.0)) < 1e-15);
  // general upsilon is sqrt(1-|a|^2)/(1+a) * x^{-a/(1+a)}
  CHECK(ClosedForm::upsilon(0.5).at(0.3).real() ==
        Approx(std::sqrt(0.75) / 1.5 * std::pow(0.3, -1.0 / 3.0)).margin(1e-14));

  CHECK(ClosedForm::monomial(2.0).at(0.3).real() == Approx(0.09).margin(1e-16));
  CHECK(std::abs(ClosedForm::monomial(Complex(0.0, 1.0)).at(0.5)) == Approx(1.0).margin(1e-15));

  // stick support: the form vanishes left of s
  ClosedForm stick = ClosedForm::power_eigen(-0.5, 0.5);
  CHECK(stick.at(0.3) == Complex(0.0, 0.0));
  CHECK(stick.at(0.75).real() > 0.0);
  CHECK(ClosedForm::order1_stick(0.5).at(0.4) == Complex(0.0, 0.0));

  ClosedForm box = ClosedForm::indicator(0.2, 0.6);
  CHECK(box.at(0.3) == Complex(1.0, 0.0));
  CHECK(box.at(0.7) == Complex(0.0, 0.0));

  ClosedForm chi = ClosedForm::spike(0.3, 8);
  CHECK(chi.at(0.3).real() == Approx(2.0).margin(1e-15));
  CHECK(chi.at(0.1) == Complex(0.0, 0.0));
}

TEST_CASE("closed form factory gates") {
  CHECK(code_of([] { ClosedForm::power_eigen(0.0); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::power_eigen(-0.5, 0.4); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::power_eigen(-0.5, 1.5); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::order1_stick(0.0); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::order1_stick(1.0); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::monomial(-0.5); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::spike(0.3, 2); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::spike(1.2, 8); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::upsilon(Complex(0.0, 1.0)); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::indicator(0.6, 0.2); }) == errc::invalid_form);
  CHECK(code_of([] { ClosedForm::indicator(-0.1, 0.2); }) == errc::invalid_form);
}

TEST_CASE("square integrability flags") {
  CHECK(ClosedForm::power_eigen(1.0).is_square_integrable());
  CHECK(ClosedForm::power_eigen(1.9).is_square_integrable());
  CHECK_FALSE(ClosedForm::power_eigen(2.5).is_square_integrable());
  CHECK(ClosedForm::order1_stick(0.5).is_square_integrable());
  CHECK_FALSE(ClosedForm::order1_stick(0.7).is_square_integrable());
}

TEST_CASE("monomial inner products hit closed moments") {
  GridPtr g = make_grid(16);
  auto xn = [&](int n) { return evaluate(ClosedForm::monomial(double(n)), g); };
  for (auto [n, m] : {std::pair<int, int>{0, 0}, {1, 2}, {3, 3}, {2, 5}, {6, 6}}) {
    Complex v = inner_product(xn(n), xn(m));
    CHECK(v.real() == Approx(1.0 / (n + m + 1)).margin(1e-12));
    CHECK(std::fabs(v.imag()) < 1e-15);
  }
}

TEST_CASE("upsilon moment matches its closed fraction") {
  GridPtr g = make_grid(96, Scheme::graded(0.0, 3.0));
  GridFunction u = evaluate(ClosedForm::upsilon(0.3), g);
  GridFunction xu = u;
  for (int i = 0; i < g->order; ++i) xu.values[i] *= g->nodes[i];
  // <x Y_a, Y_a> = (1-|a|^2)/(|1+a|^2 + 1-|a|^2) at rho = 1
  CHECK(inner_product(xu, u).real() == Approx(0.91 / 2.6).margin(1e-10));
}

TEST_CASE("inner product positivity and grid mismatch") {
  GridPtr g = make_grid(24);
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    GridFunction f;
    f.grid = g;
    f.values.resize(g->order);
    for (int i = 0; i < g->order; ++i) f.values[i] = Complex(coef(rng), coef(rng));
    Complex sq = inner_product(f, f);
    CHECK(sq.real() >= 0.0);
    CHECK(std::fabs(sq.imag()) < 1e-15);
  }
  GridFunction a = evaluate(ClosedForm::monomial(1.0), g);
  GridFunction b = evaluate(ClosedForm::monomial(1.0), make_grid(24));
  CHECK(code_of([&] { inner_product(a, b); }) == errc::grid_mismatch);
}

TEST_CASE("step forms integrate exactly") {
  ClosedForm chi = ClosedForm::spike(0.3, 8);
  CHECK(is_step_form(chi));
  CHECK_FALSE(is_step_form(ClosedForm::zero_eigen()));
  CHECK(exact_l2_norm(chi) == Approx(1.0).margin(1e-15));
  CHECK(step_poly_moment(chi, {1.0}) == Approx(1.0).margin(1e-15));
  // second moment of the unit-mass plateau: s^2 + 1/(3 n^2)
  CHECK(step_poly_moment(chi, {0.0, 0.0, 1.0}) == Approx(0.09 + 1.0 / 192.0).margin(1e-15));

  auto pieces = step_pieces(ClosedForm::indicator(0.2, 0.6));
  REQUIRE(pieces.size() == 1);
  CHECK(std::get<0>(pieces[0]) == 0.2);
  CHECK(std::get<1>(pieces[0]) == 0.6);
  CHECK(std::get<2>(pieces[0]) == 1.0);
  CHECK(code_of([] { step_pieces(ClosedForm::monomial(1.0)); }) == errc::invalid_argument);
}

TEST_CASE("norm trajectories settle or blow up with the form") {
  auto zero = norm_trajectory(ClosedForm::zero_eigen(), {32, 64, 128, 256, 512});
  CHECK(trajectory_verdict(zero) == TrajectoryVerdict::converged);
  CHECK(zero.back().second == Approx(0.411301718992).margin(1e-9));

  auto stick = norm_trajectory(ClosedForm::order1_stick(0.5), {32, 64, 128, 256, 512});
  CHECK(trajectory_verdict(stick) == TrajectoryVerdict::converged);
  CHECK(stick.back().second == Approx(1.28963392271).margin(1e-9));

  auto inside = norm_trajectory(ClosedForm::power_eigen(1.9), {32, 64, 128, 256, 512});
  CHECK(trajectory_verdict(inside) == TrajectoryVerdict::converged);

  // Re(1/2.5 - 1) = -0.6 <= -1/2: not square integrable, norms blow up
  auto outside = norm_trajectory(ClosedForm::power_eigen(2.5), {32, 64, 128, 256, 512});
  CHECK(trajectory_verdict(outside) == TrajectoryVerdict::diverging);
  CHECK(outside.front().second > 1e10);

  CHECK(code_of([] {
          norm_trajectory(ClosedForm::zero_eigen(), {64, 32});
        }) == errc::invalid_argument);
  CHECK(trajectory_verdict({{32, 1.0}}) == TrajectoryVerdict::undecided);
}

TEST_CASE("truncated-domain norms separate the integrable side") {
  // at s = 0.5 the truncated norms settle onto the full norm
  ClosedForm ok = ClosedForm::order1_stick(0.5);
  double full = truncated_norm(ok, 0.5 + 1e-12, 256);
  CHECK(full == Approx(1.28963392271).margin(1e-4));
  CHECK(truncated_norm(ok, 0.5 + 1e-8, 256) == Approx(full).margin(1e-4));
}
