#pragma once

#include <gmpxx.h>

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace flagmirror {

using Rational = mpq_class;
using Complex = std::complex<double>;
using Exponent = std::vector<int>;

inline Rational to_rational(long long v) { return Rational(static_cast<long>(v)); }
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

// Sparse polynomial over Q in a fixed number of variables. Zero coefficients are never stored.
class MPoly {
 public:
  explicit MPoly(int nvars = 0) : nvars_(nvars) {}
  static MPoly constant(int nvars, const Rational& c);
  static MPoly variable(int nvars, int i);
  static MPoly monomial(const Exponent& e, const Rational& c);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  Rational coefficient(const Exponent& e) const;
  void add_term(const Exponent& e, const Rational& c);

  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(const Rational& c);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  friend MPoly operator*(MPoly a, const Rational& c) { return a *= c; }
  friend MPoly operator*(const Rational& c, MPoly a) { return a *= c; }
  MPoly operator-() const;
  bool operator==(const MPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const MPoly& o) const { return !(*this == o); }

  MPoly pow(int e) const;
  int total_degree() const;
  // Degree with per-variable weights; -1 for the zero polynomial.
  int weighted_degree(const std::vector<int>& w) const;
  bool is_homogeneous(const std::vector<int>& w) const;
  int degree_in(int i) const;

  MPoly derivative(int i) const;
  // (f - s_i f) / (x_i - x_{i+1}) with s_i swapping variables i and i+1 (0-based).
  MPoly divided_difference(int i) const;
  MPoly swap_variables(int i, int j) const;
  // Substitutes variable i by images[i]; all images share one variable count.
  MPoly substitute(const std::vector<MPoly>& images) const;
  // Re-embeds into m variables: variable i goes to index map[i].
  MPoly remap(int m, const std::vector<int>& map) const;
  // Exact quotient; throws std::domain_error when g does not divide *this.
  MPoly exact_divide(const MPoly& g) const;

  Rational evaluate(const std::vector<Rational>& x) const;
  Complex evaluate(const std::vector<Complex>& x) const;
  bool integral() const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  int nvars_;
  std::map<Exponent, Rational> terms_;
};

// Names x1..xn followed by q1..q(n-1).
std::vector<std::string> xq_names(int n);

// Dense rational matrix.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static RMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend RMatrix operator*(const RMatrix& a, const RMatrix& b);
  bool operator==(const RMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
  RMatrix transpose() const;
  // Row and column sets are 1-based, in the given order.
  RMatrix submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const;
  Rational det() const;
  // Throws std::domain_error when singular.
  RMatrix inverse() const;
  // Solves A X = B; throws std::domain_error when singular.
  RMatrix solve(const RMatrix& b) const;
  Rational minor(const std::vector<int>& rows, const std::vector<int>& cols) const {
    return submatrix(rows, cols).det();
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

// Determinant of a square matrix of polynomials by cofactor expansion with memoized minors.
MPoly poly_det(const std::vector<std::vector<MPoly>>& m);

// Sign (-1)^{sum J + sum K} appearing in the inverse-minor identity.
int jacobi_sign(const std::vector<int>& J, const std::vector<int>& K);
// A_Y(J, K): columns J of A replaced, in order, by columns K of Y.
RMatrix cramer_replace(const RMatrix& A, const RMatrix& Y, const std::vector<int>& J, const std::vector<int>& K);

}  // namespace flagmirror
