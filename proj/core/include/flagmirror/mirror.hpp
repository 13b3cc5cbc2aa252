#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagmirror/combinat.hpp"
#include "flagmirror/exactalg.hpp"

namespace flagmirror {

using Subset = std::vector<int>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct PivotFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NearPole : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer polynomial in Pluecker symbols p_K. A monomial is a sorted list of subsets.
class PlPoly {
 public:
  using Monomial = std::vector<Subset>;
  static PlPoly symbol(const Subset& K, long long c = 1);

  void add(Monomial m, long long c);
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, long long>& terms() const { return terms_; }
  PlPoly& operator+=(const PlPoly& o);
  PlPoly operator-() const;
  friend PlPoly operator*(const PlPoly& a, const PlPoly& b);
  bool operator==(const PlPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const PlPoly& o) const { return !(*this == o); }

  // Symbols are labelled by digits for n <= 9, otherwise by comma lists.
  std::string text(int n) const;
  std::string latex(int n) const;
  // Diagram notation p^{(k)}_{lambda}.
  std::string young_text() const;
  std::string young_latex() const;
  // Value at z with p_K = det(z[rows 1..|K|, cols K]); scale receives sum of |monomials|.
  std::complex<double> evaluate(const CMatrix& z, double* scale = nullptr) const;

 private:
  std::map<Monomial, long long> terms_;
};

enum class TermFamily { LeftRange, Middle, RightRange, Block, Quantum };
std::string family_name(TermFamily f);

struct SuperpotentialTerm {
  TermFamily family;
  int index;    // i for u-terms, j for block and quantum terms
  int q_index;  // j when the term carries q_{n_j}, else 0
  PlPoly numerator, denominator;
  int divisor;  // k with denominator = +-D_k
};

// Every term of F_- in the order (i), S-terms, (iii), block terms, quantum terms.
std::vector<SuperpotentialTerm> superpotential(const FlagShape& shape);
// Same terms built from Young diagrams and diagram operators, re-indexed by subsets.
std::vector<SuperpotentialTerm> young_view(const FlagShape& shape);
// Sign cleared so the lexicographically first denominator monomial has coefficient +1.
SuperpotentialTerm normalized(SuperpotentialTerm t);
// D_1, ..., D_{n-1+r}.
std::vector<PlPoly> divisor_equations(const FlagShape& shape);
// k with D_k = +-p, searching all divisors; nullopt when none matches.
std::optional<int> match_divisor(const PlPoly& p, const std::vector<PlPoly>& divisors);

std::string render_text(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape);
std::string render_latex(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape);
std::string render_young_latex(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape);
nlohmann::json terms_json(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape);

// Signed permutation matrix of a word via s_i = exp(E_{i,i+1}) exp(-E_{i+1,i}) exp(E_{i,i+1}).
Eigen::MatrixXd dot_word(int n, const std::vector<int>& word);
std::vector<int> reduced_word(const Perm& w);
Perm longest_parabolic(const FlagShape& shape);
// dot(w_P)^{-1} dot(w_0), from reduced words.
Eigen::MatrixXd wP_inverse_w0(const FlagShape& shape);

// The chart of matrices z: signed anti-diagonal identity blocks, free entries to their left.
class ZChart {
 public:
  explicit ZChart(FlagShape shape);
  const FlagShape& shape() const { return shape_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  // Free positions (row, col), 1-based, ordered by (row, col).
  const std::vector<std::pair<int, int>>& coords() const { return coords_; }
  CMatrix matrix(const CVector& x) const;
  const Eigen::MatrixXd& base() const { return base_; }
  // Entries are polynomials in the dim() free coordinates.
  const std::vector<std::vector<MPoly>>& symbolic() const { return symbolic_; }
  // Pluecker coordinate as a polynomial in the free coordinates (memoized).
  const MPoly& pluecker(const Subset& K) const;

 private:
  FlagShape shape_;
  std::vector<std::pair<int, int>> coords_;
  Eigen::MatrixXd base_;
  std::vector<std::vector<MPoly>> symbolic_;
  mutable std::map<Subset, MPoly> cache_;
};

// w_P w_0, the longest minimal representative of the cosets W_P w; the torus charts
// below use its reduced words.
Perm longest_coset_rep(const FlagShape& shape);
// Reduced word choosing uniformly among descents at each step.
std::vector<int> random_reduced_word(const Perm& w, std::uint64_t seed);
// Chart coordinates of u_P(t) * base as polynomials in t, where u(t) = x_{i_1}(t_1) ... x_{i_M}(t_M)
// for a reduced word of w_P w_0 and u_P = blockdiag(u)^{-1} u is its unipotent-radical factor.
std::vector<MPoly> torus_chart(const FlagShape& shape, const std::vector<int>& word);

std::complex<double> pluecker(const CMatrix& z, const Subset& K);
// Minor with 1-based row and column sets.
std::complex<double> minor(const CMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols);

struct UVFactors {
  CMatrix lower;  // B_- factor: z = lower * u
  CMatrix u, v;   // unipotent upper triangular
};
// Throws PivotFailure when a leading minor of z is (numerically) zero.
UVFactors uv_from_z(const CMatrix& z, const FlagShape& shape, double pivot_tol = 1e-12);

// sum_j q_j v_{n_j,n_j+1} + sum_i u_{i,i+1}
std::complex<double> f_minus_uv(const CMatrix& z, const std::vector<std::complex<double>>& q, const FlagShape& shape);
// Sum of the Pluecker terms; throws NearPole when a denominator is relatively below tol.
std::complex<double> f_minus_pluecker(const CMatrix& z, const std::vector<std::complex<double>>& q,
                                      const std::vector<SuperpotentialTerm>& terms, double tol = 1e-12);

// Polynomial compiled for fast complex evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const MPoly& p);
  std::complex<double> operator()(const std::vector<std::vector<std::complex<double>>>& powers) const;
  double magnitude(const std::vector<std::vector<std::complex<double>>>& powers) const;
  int max_degree() const { return max_deg_; }

 private:
  struct Term {
    double c;
    std::vector<std::pair<int, int>> f;
  };
  std::vector<Term> terms_;
  int max_deg_ = 0;
};

// F_- with exact symbolic first and second derivatives, either in chart coordinates or pulled
// back along a substitution x = images(t) (e.g. a torus chart).
class FMinusFunction {
 public:
  explicit FMinusFunction(const FlagShape& shape, std::vector<MPoly> substitution = {});
  const ZChart& chart() const { return chart_; }
  int dim() const { return dim_; }
  // Chart coordinates of a point in this function's coordinates.
  CVector to_chart(const CVector& t) const;

  struct Eval {
    std::complex<double> value;
    CVector gradient;
    CMatrix hessian;
    double min_relative_denominator;
    double term_scale;  // sum over terms of |q-weight * N / D|
  };
  Eval evaluate(const CVector& x, const std::vector<std::complex<double>>& q, bool hessian = true) const;
  std::complex<double> value(const CVector& x, const std::vector<std::complex<double>>& q) const;

 private:
  struct Term {
    int q_index;
    CompiledPoly N, D;
    std::vector<CompiledPoly> dN, dD;
    std::vector<std::vector<CompiledPoly>> ddN, ddD;
  };
  ZChart chart_;
  int dim_;
  std::vector<MPoly> substitution_;
  std::vector<Term> terms_;
  int max_deg_ = 0;
};

}  // namespace flagmirror
