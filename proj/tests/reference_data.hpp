#pragma once

// Reference expressions transcribed by hand, and a small parser for them that shares
// no code with the renderers.

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "flagmirror/mirror.hpp"

namespace reference {

// (q label or 0, numerator, denominator)
using Term = std::tuple<int, flagmirror::PlPoly, flagmirror::PlPoly>;

// Grammar: expr := term {'+' term}; term := ['q'N '*'] group '/' group;
// group := '(' poly ')' | monomial; poly := ['-'] monomial {('+'|'-') monomial};
// monomial := symbol {'*' symbol}; symbol := 'p' digits | 'p^(' k ')[' parts ']'.
class Parser {
 public:
  explicit Parser(std::string s) {
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
  }

  std::vector<Term> expression() {
    std::vector<Term> out{term()};
    while (accept('+')) out.push_back(term());
    if (pos_ != s_.size()) throw std::invalid_argument("trailing input: " + s_.substr(pos_));
    return out;
  }

 private:
  Term term() {
    int q = 0;
    if (peek() == 'q') {
      ++pos_;
      q = number();
      expect('*');
    }
    flagmirror::PlPoly num = group();
    expect('/');
    flagmirror::PlPoly den = group();
    return {q, num, den};
  }

  flagmirror::PlPoly group() {
    if (!accept('(')) return monomial(1);
    flagmirror::PlPoly p = monomial(accept('-') ? -1 : 1);
    for (;;) {
      if (accept('+'))
        p += monomial(1);
      else if (accept('-'))
        p += monomial(-1);
      else
        break;
    }
    expect(')');
    return p;
  }

  flagmirror::PlPoly monomial(long long c) {
    flagmirror::PlPoly::Monomial m{symbol()};
    while (accept('*')) m.push_back(symbol());
    flagmirror::PlPoly p;
    p.add(m, c);
    return p;
  }

  flagmirror::Subset symbol() {
    expect('p');
    if (accept('^')) {
      expect('(');
      int k = number();
      expect(')');
      expect('[');
      std::vector<int> lam;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        lam.push_back(number());
        accept(',');
      }
      expect(']');
      lam.resize(k, 0);
      // lambda(J) = (j_k - k, ..., j_1 - 1)
      flagmirror::Subset J(k);
      for (int t = 1; t <= k; ++t) J[t - 1] = lam[k - t] + t;
      return J;
    }
    flagmirror::Subset K;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) K.push_back(s_[pos_++] - '0');
    return K;
  }

  int number() {
    int v = 0;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) throw std::invalid_argument("expected number");
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) v = 10 * v + (s_[pos_++] - '0');
    return v;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) throw std::invalid_argument(std::string("expected ") + c + " at " + std::to_string(pos_));
  }

  std::string s_;
  std::size_t pos_ = 0;
};

inline std::vector<Term> parse(const std::string& s) { return Parser(s).expression(); }

// Normalized multiset of (q step, numerator, denominator) from computed terms.
inline std::vector<Term> canonical(const std::vector<flagmirror::SuperpotentialTerm>& terms,
                                   const flagmirror::FlagShape& shape) {
  std::vector<Term> out;
  for (const auto& t : terms) {
    auto u = flagmirror::normalized(t);
    out.emplace_back(t.q_index ? shape.step(t.q_index) : 0, u.numerator, u.denominator);
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
    return std::make_tuple(std::get<0>(a), std::get<1>(a).terms(), std::get<2>(a).terms()) <
           std::make_tuple(std::get<0>(b), std::get<1>(b).terms(), std::get<2>(b).terms());
  });
  return out;
}

inline std::vector<Term> canonical(std::vector<Term> terms) {
  for (auto& [q, num, den] : terms)
    if (!den.is_zero() && den.terms().begin()->second < 0) {
      num = -num;
      den = -den;
    }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return std::make_tuple(std::get<0>(a), std::get<1>(a).terms(), std::get<2>(a).terms()) <
           std::make_tuple(std::get<0>(b), std::get<1>(b).terms(), std::get<2>(b).terms());
  });
  return terms;
}

// Transcribed superpotentials and their Young-diagram form.
inline const char* kF247 =
    "q2*p46/p67 + q4*p1467/p4567 + p27/p17 + (p24*p1567 - p14*p2567 + p12*p4567)/(p23*p1567 - p13*p2567 + "
    "p12*p3567) + p2346/p2345 + p3457/p3456 + p13/p12 + p1235/p1234";
inline const char* kF124 = "q1*p3/p4 + q2*p14/p34 + p2/p1 + p13/p12 + p24/p23";
inline const char* kF247Young =
    "p^(2)[5,1]/p^(2)[5] + (p^(2)[2,1]*p^(4)[3,3,3] - p^(2)[2]*p^(4)[3,3,3,1] + p^(2)[]*p^(4)[3,3,3,3])/"
    "(p^(2)[1,1]*p^(4)[3,3,3] - p^(2)[1]*p^(4)[3,3,3,1] + p^(2)[]*p^(4)[3,3,3,2]) + p^(4)[2,1,1,1]/p^(4)[1,1,1,1] + "
    "p^(4)[3,2,2,2]/p^(4)[2,2,2,2] + p^(2)[1]/p^(2)[] + p^(4)[1]/p^(4)[] + q2*p^(2)[4,3]/p^(2)[5,5] + "
    "q4*p^(4)[3,3,2]/p^(4)[3,3,3,3]";

// Complete-flag formula instantiated: sum p_{[i-1]+{i+1}}/p_{[i]} + sum q_i p_{[n-i,n]-{n-i+1}}/p_{[n-i+1,n]}.
inline std::vector<Term> complete_flag(int n) {
  using namespace flagmirror;
  std::vector<Term> out;
  for (int i = 1; i < n; ++i) {
    out.emplace_back(0, PlPoly::symbol(set_union(interval(1, i - 1), {i + 1})), PlPoly::symbol(interval(1, i)));
    out.emplace_back(i, PlPoly::symbol(set_minus(interval(n - i, n), {n - i + 1})),
                     PlPoly::symbol(interval(n - i + 1, n)));
  }
  return canonical(out);
}

// Grassmannian formula instantiated for Gr(k, n).
inline std::vector<Term> grassmannian(int k, int n) {
  using namespace flagmirror;
  std::vector<Term> out;
  for (int i = 1; i < k; ++i)
    out.emplace_back(0, PlPoly::symbol(set_union(set_union(interval(1, i - 1), {i + 1}), interval(n - k + i + 1, n))),
                     PlPoly::symbol(set_union(interval(1, i), interval(n - k + i + 1, n))));
  for (int i = k + 1; i < n; ++i)
    out.emplace_back(0, PlPoly::symbol(set_minus(interval(i - k + 1, i + 1), {i})),
                     PlPoly::symbol(interval(i - k + 1, i)));
  out.emplace_back(0, PlPoly::symbol(set_union(interval(1, k - 1), {k + 1})), PlPoly::symbol(interval(1, k)));
  out.emplace_back(k, PlPoly::symbol(set_minus(interval(n - k, n), {n - k + 1})),
                   PlPoly::symbol(interval(n - k + 1, n)));
  return canonical(out);
}

}  // namespace reference
