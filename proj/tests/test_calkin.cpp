#include <catch2/catch_amalgamated.hpp>

#include <hwlab/calkin.hpp>

#include <cmath>
#include <optional>

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

bool symbols_equal(const SymbolPair& a, const SymbolPair& b) {
  std::size_t nm = std::max(a.minus.size(), b.minus.size());
  std::size_t np = std::max(a.plus.size(), b.plus.size());
  for (std::size_t k = 0; k < nm; ++k) {
    Complex l = k < a.minus.size() ? a.minus[k] : Complex(0.0);
    Complex r = k < b.minus.size() ? b.minus[k] : Complex(0.0);
    if (l != r) return false;
  }
  for (std::size_t k = 0; k < np; ++k) {
    Complex l = k < a.plus.size() ? a.plus[k] : Complex(0.0);
    Complex r = k < b.plus.size() ? b.plus[k] : Complex(0.0);
    if (l != r) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lollipop membership and distance") {
  CHECK(Lollipop::member(Complex(0.5, 0.0)));
  CHECK(Lollipop::member(Complex(-0.5, 0.0)));
  CHECK(Lollipop::member(Complex(-1.0, 0.0)));
  CHECK(Lollipop::member(Complex(2.0, 0.0)));
  CHECK(Lollipop::member(Complex(1.0, 1.0)));
  CHECK_FALSE(Lollipop::member(Complex(2.1, 0.0)));
  CHECK_FALSE(Lollipop::member(Complex(-0.5, 0.1)));

  CHECK(Lollipop::distance(Complex(1.0, 0.0)) == 0.0);
  CHECK(Lollipop::distance(Complex(3.0, 0.0)) == Approx(1.0).margin(1e-15));
  CHECK(Lollipop::distance(Complex(-0.5, 0.3)) == Approx(0.3).margin(1e-15));
  CHECK(Lollipop::distance(Complex(-2.0, 0.0)) == Approx(1.0).margin(1e-15));
}

TEST_CASE("word parsing and printing") {
  auto coeff_of = [](const OperatorWord& w, std::vector<Letter> seq) {
    for (const auto& t : w.terms)
      if (t.letters == seq) return t.coeff;
    return Complex(0.0, 0.0);
  };

  OperatorWord w = parse_word("H - Mx");
  REQUIRE(w.terms.size() == 2);
  CHECK(coeff_of(w, {Letter::H}) == Complex(1.0, 0.0));
  CHECK(coeff_of(w, {Letter::Mx}) == Complex(-1.0, 0.0));

  OperatorWord q = parse_word("2*H^2 - (1+1i)*V");
  REQUIRE(q.terms.size() == 2);
  CHECK(coeff_of(q, {Letter::H, Letter::H}) == Complex(2.0, 0.0));
  CHECK(coeff_of(q, {Letter::V}) == Complex(-1.0, -1.0));

  CHECK(word_to_string(parse_word("H*Mx + V")) == word_to_string(parse_word("V + H*Mx")));
  CHECK(symbols_equal(symbol_of(parse_word(word_to_string(q))), symbol_of(q)));

  try {
    parse_word("H -");
    FAIL("expected parse failure");
  } catch (const parse_error& e) {
    CHECK(e.position() >= 2);
  }
  CHECK_THROWS_AS(parse_word("(H + Mx"), parse_error);
  CHECK_THROWS_AS(parse_word("H**2"), parse_error);
  CHECK_THROWS_AS(parse_word("Q"), parse_error);
  CHECK_THROWS_AS(parse_word(""), parse_error);
}

TEST_CASE("word algebra is noncommutative") {
  OperatorWord hm = word_mul(parse_word("H"), parse_word("Mx"));
  OperatorWord mh = word_mul(parse_word("Mx"), parse_word("H"));
  CHECK(word_to_string(hm) != word_to_string(mh));

  OperatorWord sum = word_normalize(word_add(parse_word("H"), parse_word("H")));
  REQUIRE(sum.terms.size() == 1);
  CHECK(sum.terms[0].coeff == Complex(2.0, 0.0));

  OperatorWord cancel = word_normalize(word_add(parse_word("H"), word_scale(parse_word("H"), -1.0)));
  CHECK(cancel.terms.empty());
}

TEST_CASE("symbols of the generating words") {
  SymbolPair id = symbol_of(parse_word("H - Mx"));
  CHECK(symbols_equal(id, identity_symbol()));

  SymbolPair h = symbol_of(parse_word("H"));
  CHECK(symbols_equal(h, make_symbol({0.0}, {0.0, 1.0})));
  SymbolPair mx = symbol_of(parse_word("Mx"));
  CHECK(symbols_equal(mx, make_symbol({0.0, -1.0}, {0.0})));
  SymbolPair mx2 = symbol_of(parse_word("Mx^2"));
  CHECK(symbols_equal(mx2, make_symbol({0.0, 0.0, 1.0}, {0.0})));

  // compacts map to zero
  CHECK(symbols_equal(symbol_of(parse_word("V")), SymbolPair{{0.0}, {0.0}}));
  CHECK(symbols_equal(symbol_of(parse_word("H*Mx")), SymbolPair{{0.0}, {0.0}}));
  CHECK(symbols_equal(symbol_of(parse_word("Mx*H")), SymbolPair{{0.0}, {0.0}}));

  CHECK(symbols_equal(symbol_of(OperatorWord{{WordTerm{2.0, {}}}}),
                      constant_symbol(2.0)));
}

TEST_CASE("gluing is enforced at the joint") {
  CHECK(code_of([] { make_symbol({1.0}, {2.0}); }) == errc::gluing_violation);
  CHECK(code_of([] { check_gluing(SymbolPair{{0.0, 1.0}, {1.0}}); }) == errc::gluing_violation);
  CHECK(code_of([] { make_symbol({}, {}); }) == std::nullopt);
  CHECK(code_of([] { make_symbol({0.5}, {0.5, 3.0}); }) == std::nullopt);
}

TEST_CASE("symbol map is a homomorphism on short words") {
  std::vector<std::vector<Letter>> words;
  std::vector<Letter> alphabet = {Letter::Mx, Letter::H};
  words.push_back({});
  for (Letter a : alphabet) {
    words.push_back({a});
    for (Letter b : alphabet) {
      words.push_back({a, b});
      for (Letter c : alphabet) words.push_back({a, b, c});
    }
  }
  REQUIRE(words.size() == 15);
  int failures = 0;
  for (const auto& w1 : words)
    for (const auto& w2 : words) {
      OperatorWord a{{WordTerm{1.0, w1}}};
      OperatorWord b{{WordTerm{1.0, w2}}};
      if (!symbols_equal(symbol_of(word_mul(a, b)),
                         symbol_product(symbol_of(a), symbol_of(b))))
        ++failures;
    }
  CHECK(failures == 0);
}

TEST_CASE("gamma of the identity symbol is the generator compression") {
  for (int N : {8, 24}) {
    Eigen::MatrixXcd G = gamma_build(identity_symbol(), N).entries;
    Eigen::MatrixXcd W =
        word_matrix(parse_word("H - Mx"), N, Basis::legendre_orthonormal).entries;
    CHECK((G - W).cwiseAbs().maxCoeff() < 1e-13);
  }
  Eigen::MatrixXcd I = gamma_build(constant_symbol(1.0), 12).entries;
  CHECK((I - Eigen::MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(code_of([] { gamma_build(identity_symbol(), 0); }) == errc::invalid_argument);
}

TEST_CASE("gamma of a quadratic symbol matches the direct word") {
  SymbolPair sq = make_symbol({0.0, 0.0, 1.0}, {0.0, 0.0, 1.0});
  for (int N : {16, 32, 64}) {
    Eigen::MatrixXcd G = gamma_build(sq, N).entries;
    Eigen::MatrixXcd W =
        word_matrix(parse_word("H^2 + Mx^2"), N, Basis::legendre_orthonormal).entries;
    CHECK((G - W).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("product defect shrinks like a compact remainder") {
  DefectReport rep = product_defect(identity_symbol(), identity_symbol());
  REQUIRE(rep.sizes == std::vector<int>{16, 32, 64});
  REQUIRE(rep.sigma_quarter.size() == 3);
  CHECK(rep.sigma_quarter[0] == Approx(0.16970345591434388).epsilon(1e-8));
  CHECK(rep.sigma_quarter[1] == Approx(0.082144534971191771).epsilon(1e-8));
  CHECK(rep.sigma_quarter[2] == Approx(0.040420912490473963).epsilon(1e-8));
  CHECK(rep.halving);

  // products with a constant commute exactly, no defect at all
  DefectReport flat = product_defect(constant_symbol(1.0), identity_symbol());
  for (double s : flat.sigma_quarter) CHECK(s <= 1e-12);
  DefectReport scaled = product_defect(identity_symbol(), constant_symbol(Complex(0.0, 2.0)));
  for (double s : scaled.sigma_quarter) CHECK(s <= 1e-12);

  CHECK(code_of([] {
          product_defect(identity_symbol(), identity_symbol(), {2});
        }) == errc::invalid_argument);
}

TEST_CASE("essential spectrum samples trace the lollipop") {
  std::vector<Complex> pts = essential_spectrum(identity_symbol(), 16);
  REQUIRE(pts.size() == 32);
  CHECK(std::abs(pts[0] - Complex(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(pts[15]) < 1e-15);
  CHECK(std::abs(pts[16] - Complex(2.0, 0.0)) < 1e-15);
  for (const Complex& p : pts) CHECK(Lollipop::distance(p) < 1e-12);

  SymbolPair sq = make_symbol({0.0, 0.0, 1.0}, {0.0, 0.0, 1.0});
  std::vector<Complex> spts = essential_spectrum(sq, 16);
  for (int j = 0; j < 16; ++j) {
    CHECK(spts[j].imag() == 0.0);
    CHECK(spts[j].real() >= -1e-15);
    CHECK(spts[j].real() <= 1.0 + 1e-15);
  }
  CHECK(code_of([] { essential_spectrum(identity_symbol(), 8); }) == errc::invalid_argument);
}

TEST_CASE("winding index against the boundary curve") {
  CHECK(fredholm_index(identity_symbol(), Complex(1.0, 0.0)) == 1);
  CHECK(fredholm_index(identity_symbol(), Complex(1.2, 0.4)) == 1);
  CHECK(fredholm_index(identity_symbol(), Complex(3.0, 0.0)) == 0);
  CHECK(fredholm_index(identity_symbol(), Complex(-1.0, 1.0)) == 0);

  for (int n = 1; n <= 3; ++n) {
    std::vector<Complex> plus(n + 1);
    for (int k = 0; k <= n; ++k) {
      double b = 1.0;
      for (int j = 0; j < k; ++j) b = b * double(n - j) / double(j + 1);
      plus[k] = b * std::pow(-1.0, n - k);
    }
    SymbolPair f = make_symbol({std::pow(-1.0, n)}, plus);
    CHECK(fredholm_index(f, Complex(0.0, 0.0)) == n);
    for (int samples : {256, 512, 1024})
      CHECK(fredholm_index(f, Complex(0.0, 0.0), samples) == n);
  }

  // points on the sampled essential set are refused
  CHECK(code_of([] { fredholm_index(identity_symbol(), Complex(0.0, 0.0)); }) ==
        errc::index_undefined);
  CHECK(code_of([] { fredholm_index(identity_symbol(), Complex(2.0, 0.0)); }) ==
        errc::index_undefined);
  CHECK(code_of([] { fredholm_index(identity_symbol(), Complex(-1.0, 1e-7)); }) ==
        errc::index_undefined);
  CHECK(code_of([] { fredholm_index(identity_symbol(), Complex(1.0, 0.0), 8); }) ==
        errc::invalid_argument);
}

TEST_CASE("spike table converges to the evaluation functional") {
  auto rows = witness_spike(0.3, {8, 16, 32, 64});
  REQUIRE(rows.size() == 4);
  for (const SpikeRow& row : rows) {
    CHECK(row.moment_limit == Approx(0.09).margin(1e-15));
    CHECK(row.moment == Approx(0.09 + 1.0 / (3.0 * row.n * row.n)).margin(1e-14));
  }
  CHECK(rows[0].h_norm == Approx(0.712583698241).margin(1e-9));
  CHECK(rows[1].h_norm == Approx(0.517826193702).margin(1e-9));
  CHECK(rows[2].h_norm == Approx(0.373243269754).margin(1e-9));
  CHECK(rows[3].h_norm == Approx(0.266832554415).margin(1e-9));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].h_norm < rows[i - 1].h_norm);

  CHECK(code_of([] { witness_spike(0.0, {8}); }) == errc::invalid_argument);
  CHECK(code_of([] { witness_spike(0.3, {2}); }) == errc::invalid_argument);
}

TEST_CASE("upsilon moments match the closed fraction along the radius") {
  auto rows = witness_upsilon(Complex(1.0, 0.0), {0.0, 0.3, 0.6, 0.9, 0.99}, 1.0);
  REQUIRE(rows.size() == 5);
  const double want[] = {0.5, 0.35, 0.2, 0.05, 0.005};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].formula == Approx(want[i]).margin(1e-12));
    CHECK(rows[i].quadrature == Approx(rows[i].formula).margin(1e-10));
    CHECK(rows[i].eigen_residual < 1e-9);
    if (i) CHECK(rows[i].formula < rows[i - 1].formula);
  }

  CHECK(code_of([] { witness_upsilon(Complex(-1.0, 0.0), {0.5}, 1.0); }) ==
        errc::invalid_argument);
  CHECK(code_of([] { witness_upsilon(Complex(0.5, 0.0), {0.5}, 1.0); }) ==
        errc::invalid_argument);
  CHECK(code_of([] { witness_upsilon(Complex(1.0, 0.0), {1.0}, 1.0); }) ==
        errc::invalid_argument);
  CHECK(code_of([] { witness_upsilon(Complex(1.0, 0.0), {0.5}, -1.0); }) ==
        errc::invalid_argument);
}
