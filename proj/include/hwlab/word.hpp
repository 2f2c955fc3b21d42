#pragma once

// Noncommutative operator words over the alphabet {Mx, H, V} with complex
// coefficients, parsed from text. Grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := scalar | letter | letter '^' int | '(' expr ')'
//   letter := Mx | H | V | I        scalar := decimal ['i']
// Whitespace is insignificant; failures carry the byte offset.

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hwlab/errors.hpp"
#include "hwlab/operators.hpp"

namespace hwlab {

enum class Letter { Mx, H, V };

struct WordTerm {
  Complex coeff{1.0, 0.0};
  std::vector<Letter> letters;  // empty sequence = identity
};

struct OperatorWord {
  std::vector<WordTerm> terms;
};

// combine like monomials, drop exact zeros, order deterministically
inline OperatorWord word_normalize(const OperatorWord& w) {
  std::map<std::vector<Letter>, Complex> acc;
  for (const auto& t : w.terms) acc[t.letters] += t.coeff;
  OperatorWord out;
  for (auto& [seq, c] : acc)
    if (c != Complex(0.0, 0.0)) out.terms.push_back({c, seq});
  return out;
}

inline OperatorWord word_add(const OperatorWord& a, const OperatorWord& b) {
  OperatorWord out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return word_normalize(out);
}

inline OperatorWord word_scale(const OperatorWord& a, Complex c) {
  OperatorWord out = a;
  for (auto& t : out.terms) t.coeff *= c;
  return word_normalize(out);
}

inline OperatorWord word_mul(const OperatorWord& a, const OperatorWord& b) {
  OperatorWord out;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      WordTerm t;
      t.coeff = ta.coeff * tb.coeff;
      t.letters = ta.letters;
      t.letters.insert(t.letters.end(), tb.letters.begin(), tb.letters.end());
      out.terms.push_back(std::move(t));
    }
  return word_normalize(out);
}

inline const char* letter_name(Letter l) {
  switch (l) {
    case Letter::Mx: return "Mx";
    case Letter::H: return "H";
    case Letter::V: return "V";
  }
  return "?";
}

inline std::string word_to_string(const OperatorWord& w) {
  if (w.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < w.terms.size(); ++i) {
    const auto& t = w.terms[i];
    if (i) out += " + ";
    out += "(" + std::to_string(t.coeff.real()) + (t.coeff.imag() < 0 ? "" : "+") +
           std::to_string(t.coeff.imag()) + "i)";
    for (Letter l : t.letters) {
      out += "*";
      out += letter_name(l);
    }
  }
  return out;
}

namespace detail {

class WordParser {
 public:
  explicit WordParser(std::string_view text) : text_(text) {}

  OperatorWord parse() {
    OperatorWord w = expr();
    skip_ws();
    if (pos_ != text_.size()) throw parse_error(pos_, "unexpected trailing input");
    return w;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  OperatorWord expr() {
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    OperatorWord w = term();
    if (neg) w = word_scale(w, Complex(-1.0, 0.0));
    for (;;) {
      if (eat('+'))
        w = word_add(w, term());
      else if (eat('-'))
        w = word_add(w, word_scale(term(), Complex(-1.0, 0.0)));
      else
        return w;
    }
  }

  OperatorWord term() {
    OperatorWord w = factor();
    while (eat('*')) w = word_mul(w, factor());
    return w;
  }

  OperatorWord factor() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      OperatorWord w = expr();
      if (!eat(')')) throw parse_error(pos_, "expected ')'");
      return w;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return scalar();
    if (std::isalpha(static_cast<unsigned char>(c))) return letter_factor();
    throw parse_error(pos_, "expected scalar, letter, or '('");
  }

  OperatorWord scalar() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(std::string(text_.substr(start, pos_ - start)), &used);
      if (used != pos_ - start) throw std::invalid_argument("partial");
    } catch (const std::exception&) {
      throw parse_error(start, "malformed number");
    }
    Complex value(v, 0.0);
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      ++pos_;
      value = Complex(0.0, v);
    }
    OperatorWord w;
    w.terms.push_back({value, {}});
    return w;
  }

  OperatorWord letter_factor() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    std::vector<Letter> base;
    if (name == "Mx")
      base = {Letter::Mx};
    else if (name == "H")
      base = {Letter::H};
    else if (name == "V")
      base = {Letter::V};
    else if (name == "I")
      base = {};
    else
      throw parse_error(start, "unknown letter '" + std::string(name) + "'");
    int power = 1;
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_ws();
      std::size_t dstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (dstart == pos_) throw parse_error(pos_, "expected integer exponent");
      power = std::stoi(std::string(text_.substr(dstart, pos_ - dstart)));
    }
    WordTerm t;
    for (int k = 0; k < power; ++k) t.letters.insert(t.letters.end(), base.begin(), base.end());
    OperatorWord w;
    w.terms.push_back(std::move(t));
    return w;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline OperatorWord parse_word(std::string_view text) {
  return detail::WordParser(text).parse();
}

// Exact compression of the word at size N: letter factors are multiplied at a
// margin wide enough that no truncation loss reaches the kept block (H never
// spills downward in the Legendre basis; Mx and V spill one row per factor).
inline OperatorMatrix word_matrix(const OperatorWord& w, int N,
                                  Basis basis = Basis::legendre_orthonormal) {
  require(N >= 1, errc::invalid_argument, "word matrix needs N >= 1");
  std::size_t longest = 0;
  for (const auto& t : w.terms) longest = std::max(longest, t.letters.size());
  int M = N + int(longest);
  if (basis == Basis::monomial)
    require(M <= kMonomialBasisCap, errc::invalid_argument,
            "monomial word compression exceeds the N = 40 basis cap");
  auto letter_matrix = [&](Letter l) {
    Op op = l == Letter::Mx ? Op::Mx : (l == Letter::H ? Op::H : Op::V);
    return assemble(OperatorId{op, 0.0}, basis, M).entries;
  };
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(M, M);
  for (const auto& t : w.terms) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(M, M);
    for (Letter l : t.letters) prod = prod * letter_matrix(l);
    acc += t.coeff * prod;
  }
  OperatorMatrix out;
  out.entries = acc.topLeftCorner(N, N);
  out.basis = basis;
  out.size = N;
  return out;
}

}  // namespace hwlab
