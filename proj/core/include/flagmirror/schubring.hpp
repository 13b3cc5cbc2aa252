#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flagmirror/combinat.hpp"
#include "flagmirror/exactalg.hpp"

namespace flagmirror {

// Element of a quantum cohomology ring in the Schubert basis. Coefficients are
// polynomials with integer coefficients in nq quantum parameters.
struct QHClass {
  int nq = 0;
  std::map<Perm, MPoly> terms;

  bool is_zero() const { return terms.empty(); }
  void add(const Perm& w, const MPoly& c);
  MPoly coefficient(const Perm& w) const;
  QHClass& operator+=(const QHClass& o);
  QHClass& operator-=(const QHClass& o);
  QHClass operator*(const Rational& c) const;
  bool operator==(const QHClass& o) const { return terms == o.terms; }
  bool operator!=(const QHClass& o) const { return !(*this == o); }
  QHClass at_q_zero() const;
  std::string str(const std::vector<std::string>& qnames) const;
};

std::vector<std::string> q_names(int nq);

// Classical Schubert polynomial in x_1..x_m, m = w.size().
MPoly schubert_polynomial(const Perm& w);

// Standard elementary monomial index (i_1, ..., i_{m-1}), 0 <= i_k <= k.
using EIndex = std::vector<int>;
// Integer coefficients alpha with S_w = sum alpha_I e_I, indices sized to w.size()-1.
std::map<EIndex, long long> e_expansion(const Perm& w);
std::vector<EIndex> e_indices(int n, int degree);

// Polynomials in x_1..x_n, q_1..q_{n-1} (2n-1 variables, x first).
int xq_nvars(int n);
std::vector<int> xq_weights(int n);
MPoly x_var(int n, int i);
MPoly q_var(int n, int i);
MPoly elementary(int k, int i, int n);           // e_i(x_1..x_k)
MPoly quantum_elementary(int k, int i, int n);   // E_i^k
MPoly quantum_elementary_monomial(const EIndex& I, int n);
MPoly quantum_schubert_polynomial(const Perm& w, int n);
// H_l^k = det(E^{k+l-r}_{c-r+1})_{r,c}; equals h_l(x_1..x_k) at q = 0.
MPoly quantum_complete(int k, int l, int n);
MPoly quantum_complete_monomial(const EIndex& I, int n);
// x_k -> -x_{n+1-k}, q_k -> q_{n-k}.
MPoly omega(const MPoly& p, int n);
// det(H_{lambda_r - mu_c - r + c}(X_{phi_r})) for a 321-avoiding w.
MPoly quantum_det_formula(const Perm& w, int n);

// Quantum Monk operators on QH*(Fl_n), as sparse transition tables.
class MonkOperators {
 public:
  struct Entry {
    std::uint32_t target;
    std::uint64_t qexp;  // 8 bits per q_i, q_1 in the low byte
  };
  explicit MonkOperators(int n);

  int n() const { return n_; }
  std::size_t dim() const { return perms_.size(); }
  const std::vector<Perm>& perms() const { return perms_; }
  std::uint32_t index(const Perm& w) const;
  // Rows for M_k, k in 1..n-1: row w lists the terms of sigma_{s_k} * sigma_w.
  const std::vector<std::vector<Entry>>& rows(int k) const { return ops_[k - 1]; }

  void save(const std::filesystem::path& file) const;
  static std::optional<MonkOperators> load(const std::filesystem::path& file, int n);

 private:
  MonkOperators() = default;
  int n_ = 0;
  std::vector<Perm> perms_;
  std::vector<std::vector<std::vector<Entry>>> ops_;
};

// Cache directory: explicit value, else $FLAGMIRROR_CACHE_DIR, else none.
std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::string>& explicit_dir);
void set_cache_dir(const std::optional<std::filesystem::path>& dir);
const MonkOperators& monk_operators(int n);

// Vector in QH*(Fl_n) with packed-exponent integer q-polynomial coefficients.
class QVector {
 public:
  using QPoly = std::map<std::uint64_t, long long>;
  explicit QVector(const MonkOperators& ops) : ops_(&ops), c_(ops.dim()) {}
  static QVector basis(const MonkOperators& ops, const Perm& w);

  bool is_zero() const;
  void axpy(const QVector& x, long long a, std::uint64_t qexp);  // this += a q^qexp x
  QVector apply_monk(int k) const;                                 // M_k
  QVector apply_x(int i) const;                                    // X_i = M_i - M_{i-1}
  QVector apply_quantum_elementary(int k, int i) const;            // E_i^k(X)
  QHClass to_class() const;

 private:
  const MonkOperators* ops_;
  std::vector<QPoly> c_;
};

// Evaluates a polynomial in x, q (2n-1 variables) on the operators applied to sigma_v.
QHClass apply_polynomial(const MPoly& p, const Perm& v, int n);
// sigma_u * sigma_v in QH*(Fl_n), via E-monomial expansion of the shorter factor.
QHClass class_product(const Perm& u, const Perm& v, int n);
QHClass monk_multiply(int k, const Perm& w, int n);

// Image of p in Z[q,x]/I_n^q in the quantum Schubert basis (n <= 5). Independent
// of the Monk operators: q-adic lifting of the classical normal form.
QHClass normal_form(const MPoly& p, int n);
// Coefficients of p modulo I_n^q in the quantum E-monomial basis.
std::map<EIndex, MPoly> e_basis_normal_form(const MPoly& p, int n);
// Classical reduction by the lex Groebner basis h_k(x_k..x_n) of I_n; returns the
// remainder and cofactors c_j with p - remainder = sum_j c_j e_j^n.
struct ClassicalReduction {
  MPoly remainder;
  std::vector<MPoly> cofactors;  // index j-1 for e_j^n
};
ClassicalReduction classical_reduce(const MPoly& p, int n);

}  // namespace flagmirror
