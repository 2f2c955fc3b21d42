#pragma once

// Exact sparse polynomials in the variable u (standing for 1/x) with rational
// coefficients. Used by the chain recursion at the origin, whose degree and
// valuation laws are certified with no floating tolerance.

#include <map>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "hwlab/errors.hpp"

namespace hwlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

struct ChainPolynomial {
  std::map<int, Rational> coeffs;  // degree -> nonzero coefficient
  int order = 0;                   // position in the chain

  void set(int k, const Rational& c) {
    if (c == Rational(0))
      coeffs.erase(k);
    else
      coeffs[k] = c;
  }
  Rational coeff(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? Rational(0) : it->second;
  }
  bool empty() const { return coeffs.empty(); }
  int degree() const {
    require(!coeffs.empty(), errc::invalid_argument, "degree of zero polynomial");
    return coeffs.rbegin()->first;
  }
  int valuation() const {
    require(!coeffs.empty(), errc::invalid_argument, "valuation of zero polynomial");
    return coeffs.begin()->first;
  }
  double coeff_as_double(int k) const {
    Rational c = coeff(k);
    return c.numerator().convert_to<double>() / c.denominator().convert_to<double>();
  }

  std::string to_string() const {
    if (coeffs.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      Rational c = it->second;
      if (!first) os << (c < Rational(0) ? " - " : " + ");
      if (first && c < Rational(0)) os << "-";
      first = false;
      Rational a = c < Rational(0) ? -c : c;
      if (a != Rational(1) || it->first == 0) {
        os << a.numerator();
        if (a.denominator() != 1) os << "/" << a.denominator();
        if (it->first != 0) os << "*";
      }
      if (it->first != 0) {
        os << "u";
        if (it->first != 1) os << "^" << it->first;
      }
    }
    return os.str();
  }
};

}  // namespace hwlab
