#include "flagmirror/exactalg.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace flagmirror {

Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("parse_rational: malformed '" + s + "'");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------- MPoly

MPoly MPoly::constant(int nvars, const Rational& c) {
  MPoly p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

MPoly MPoly::variable(int nvars, int i) {
  if (i < 0 || i >= nvars) throw std::out_of_range("MPoly::variable: index out of range");
  Exponent e(nvars, 0);
  e[i] = 1;
  return monomial(e, 1);
}

MPoly MPoly::monomial(const Exponent& e, const Rational& c) {
  MPoly p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

Rational MPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void MPoly::add_term(const Exponent& e, const Rational& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("MPoly: exponent length mismatch");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MPoly& MPoly::operator+=(const MPoly& o) {
  if (o.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  if (o.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MPoly& MPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  MPoly p(a.nvars_);
  Exponent e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      p.add_term(e, ca * cb);
    }
  return p;
}

MPoly MPoly::operator-() const {
  MPoly p = *this;
  for (auto& [e, c] : p.terms_) c = -c;
  return p;
}

MPoly MPoly::pow(int e) const {
  if (e < 0) throw std::invalid_argument("MPoly::pow: negative exponent");
  MPoly r = constant(nvars_, 1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

int MPoly::total_degree() const { return weighted_degree(std::vector<int>(nvars_, 1)); }

int MPoly::weighted_degree(const std::vector<int>& w) const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int i = 0; i < nvars_; ++i) s += w[i] * e[i];
    d = std::max(d, s);
  }
  return d;
}

bool MPoly::is_homogeneous(const std::vector<int>& w) const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int i = 0; i < nvars_; ++i) s += w[i] * e[i];
    if (d >= 0 && s != d) return false;
    d = s;
  }
  return true;
}

int MPoly::degree_in(int i) const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

MPoly MPoly::derivative(int i) const {
  MPoly p(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponent f = e;
    --f[i];
    p.add_term(f, c * e[i]);
  }
  return p;
}

MPoly MPoly::divided_difference(int i) const {
  // Termwise: (x^a y^b - x^b y^a)/(x - y) is a signed geometric sum.
  MPoly p(nvars_);
  for (const auto& [e, c] : terms_) {
    int a = e[i], b = e[i + 1];
    if (a == b) continue;
    Exponent f = e;
    if (a > b) {
      for (int k = 0; k < a - b; ++k) {
        f[i] = a - 1 - k;
        f[i + 1] = b + k;
        p.add_term(f, c);
      }
    } else {
      for (int k = 0; k < b - a; ++k) {
        f[i] = a + k;
        f[i + 1] = b - 1 - k;
        p.add_term(f, -c);
      }
    }
  }
  return p;
}

MPoly MPoly::swap_variables(int i, int j) const {
  MPoly p(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent f = e;
    std::swap(f[i], f[j]);
    p.add_term(f, c);
  }
  return p;
}

MPoly MPoly::substitute(const std::vector<MPoly>& images) const {
  if (static_cast<int>(images.size()) != nvars_) throw std::invalid_argument("MPoly::substitute: need one image per variable");
  int m = images.empty() ? 0 : images[0].nvars();
  std::vector<std::vector<MPoly>> powers(nvars_);
  MPoly out(m);
  for (const auto& [e, c] : terms_) {
    MPoly t = constant(m, c);
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(constant(m, 1));
      while (static_cast<int>(pw.size()) <= e[i]) pw.push_back(pw.back() * images[i]);
      t = t * pw[e[i]];
    }
    out += t;
  }
  return out;
}

MPoly MPoly::remap(int m, const std::vector<int>& map) const {
  MPoly p(m);
  for (const auto& [e, c] : terms_) {
    Exponent f(m, 0);
    for (int i = 0; i < nvars_; ++i) f[map[i]] += e[i];
    p.add_term(f, c);
  }
  return p;
}

MPoly MPoly::exact_divide(const MPoly& g) const {
  if (g.is_zero()) throw std::domain_error("MPoly::exact_divide: division by zero");
  // std::map orders exponents lexicographically; the last entry is the lex-leading term.
  const auto& [lg, cg] = *g.terms_.rbegin();
  MPoly rem = *this, quot(nvars_);
  while (!rem.is_zero()) {
    const auto [lr, cr] = *rem.terms_.rbegin();
    Exponent e(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      e[i] = lr[i] - lg[i];
      if (e[i] < 0) throw std::domain_error("MPoly::exact_divide: not divisible");
    }
    MPoly t = monomial(e, cr / cg);
    quot += t;
    rem -= t * g;
  }
  return quot;
}

Rational MPoly::evaluate(const std::vector<Rational>& x) const {
  Rational s = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

Complex MPoly::evaluate(const std::vector<Complex>& x) const {
  Complex s = 0;
  for (const auto& [e, c] : terms_) {
    Complex t = c.get_d();
    for (int i = 0; i < nvars_; ++i)
      if (e[i]) t *= std::pow(x[i], e[i]);
    s += t;
  }
  return s;
}

bool MPoly::integral() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.get_den() == 1; });
}

std::string MPoly::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest exponents first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational a = abs(c);
    bool unit = true;
    for (int v : e) unit &= v == 0;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (a != 1 || unit) {
      os << a.get_str();
      wrote = true;
    }
    for (int i = 0; i < nvars_; ++i) {
      if (!e[i]) continue;
      if (wrote) os << "*";
      os << names[i];
      if (e[i] > 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

std::vector<std::string> xq_names(int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  for (int i = 1; i < n; ++i) v.push_back("q" + std::to_string(i));
  return v;
}

// ---------------------------------------------------------------- RMatrix

RMatrix RMatrix::identity(int n) {
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RMatrix operator*(const RMatrix& a, const RMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("RMatrix: shape mismatch");
  RMatrix c(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

RMatrix RMatrix::transpose() const {
  RMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RMatrix RMatrix::submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
  RMatrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(static_cast<int>(i), static_cast<int>(j)) = (*this)(rows[i] - 1, cols[j] - 1);
  return s;
}

Rational RMatrix::det() const {
  if (rows_ != cols_) throw std::invalid_argument("RMatrix::det: not square");
  RMatrix m = *this;
  Rational d = 1;
  for (int c = 0; c < rows_; ++c) {
    int p = c;
    while (p < rows_ && m(p, c) == 0) ++p;
    if (p == rows_) return 0;
    if (p != c) {
      for (int j = 0; j < cols_; ++j) std::swap(m(p, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    for (int i = c + 1; i < rows_; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (int j = c; j < cols_; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

RMatrix RMatrix::solve(const RMatrix& b) const {
  if (rows_ != cols_ || b.rows_ != rows_) throw std::invalid_argument("RMatrix::solve: shape mismatch");
  RMatrix m = *this, x = b;
  int n = rows_;
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) throw std::domain_error("RMatrix::solve: singular matrix");
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      for (int j = 0; j < x.cols_; ++j) std::swap(x(p, j), x(c, j));
    }
    Rational inv = 1 / m(c, c);
    for (int j = c; j < n; ++j) m(c, j) *= inv;
    for (int j = 0; j < x.cols_; ++j) x(c, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
      for (int j = 0; j < x.cols_; ++j) x(i, j) -= f * x(c, j);
    }
  }
  return x;
}

RMatrix RMatrix::inverse() const { return solve(identity(rows_)); }

// ---------------------------------------------------------------- polynomial determinants

MPoly poly_det(const std::vector<std::vector<MPoly>>& m) {
  int n = static_cast<int>(m.size());
  if (n == 0) throw std::invalid_argument("poly_det: empty matrix");
  int nv = m[0][0].nvars();
  // minors[mask] = det of rows (n - popcount(mask))..n-1 against columns in mask.
  std::unordered_map<unsigned, MPoly> memo;
  std::function<MPoly(int, unsigned)> rec = [&](int row, unsigned cols) -> MPoly {
    if (row == n) return MPoly::constant(nv, 1);
    auto it = memo.find(cols);
    if (it != memo.end()) return it->second;
    MPoly s(nv);
    int sign = 1;
    for (int c = 0; c < n; ++c) {
      if (!(cols & (1u << c))) continue;
      if (!m[row][c].is_zero()) {
        MPoly t = m[row][c] * rec(row + 1, cols & ~(1u << c));
        if (sign > 0) s += t;
        else s -= t;
      }
      sign = -sign;
    }
    memo.emplace(cols, s);
    return s;
  };
  return rec(0, (n == 32) ? ~0u : ((1u << n) - 1));
}

int jacobi_sign(const std::vector<int>& J, const std::vector<int>& K) {
  long s = 0;
  for (int v : J) s += v;
  for (int v : K) s += v;
  return (s % 2) ? -1 : 1;
}

RMatrix cramer_replace(const RMatrix& A, const RMatrix& Y, const std::vector<int>& J, const std::vector<int>& K) {
  if (J.size() != K.size()) throw std::invalid_argument("cramer_replace: |J| != |K|");
  RMatrix B = A;
  for (std::size_t t = 0; t < J.size(); ++t)
    for (int i = 0; i < A.rows(); ++i) B(i, J[t] - 1) = Y(i, K[t] - 1);
  return B;
}

}  // namespace flagmirror
