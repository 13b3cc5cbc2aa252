#include "flagmirror/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace flagmirror {

namespace {

std::string subset_label(const Subset& K, int n) {
  std::string s;
  if (n <= 9) {
    for (int v : K) s += std::to_string(v);
    return s;
  }
  for (std::size_t i = 0; i < K.size(); ++i) s += (i ? "," : "") + std::to_string(K[i]);
  return s;
}

std::string partition_label(const Subset& K) {
  std::vector<int> lam = partition_of_subset(K);
  std::string s;
  for (int v : lam)
    if (v) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

template <class Symbol>
std::string render_poly(const PlPoly& p, Symbol symbol, const char* times) {
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    long long a = c < 0 ? -c : c;
    if (first)
      s += c < 0 ? "-" : "";
    else
      s += c < 0 ? " - " : " + ";
    first = false;
    if (a != 1) s += std::to_string(a) + times;
    for (std::size_t i = 0; i < m.size(); ++i) s += (i ? times : "") + symbol(m[i]);
  }
  return s.empty() ? "0" : s;
}

PlPoly product_symbol(const Subset& A, const Subset& B, long long c) {
  PlPoly p;
  p.add({A, B}, c);
  return p;
}

int sign_of(int e) { return (e % 2 == 0) ? 1 : -1; }

Subset young(int k, std::vector<int> lam) {
  lam.resize(k, 0);
  return subset_of_partition(lam);
}

}  // namespace

PlPoly PlPoly::symbol(const Subset& K, long long c) {
  PlPoly p;
  p.add({K}, c);
  return p;
}

void PlPoly::add(Monomial m, long long c) {
  if (c == 0) return;
  std::sort(m.begin(), m.end());
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

PlPoly& PlPoly::operator+=(const PlPoly& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

PlPoly PlPoly::operator-() const {
  PlPoly p = *this;
  for (auto& [m, c] : p.terms_) c = -c;
  return p;
}

PlPoly operator*(const PlPoly& a, const PlPoly& b) {
  PlPoly p;
  for (const auto& [m1, c1] : a.terms_)
    for (const auto& [m2, c2] : b.terms_) {
      PlPoly::Monomial m = m1;
      m.insert(m.end(), m2.begin(), m2.end());
      p.add(std::move(m), c1 * c2);
    }
  return p;
}

std::string PlPoly::text(int n) const {
  return render_poly(*this, [n](const Subset& K) { return "p" + subset_label(K, n); }, "*");
}

std::string PlPoly::latex(int n) const {
  return render_poly(*this, [n](const Subset& K) { return "p_{" + subset_label(K, n) + "}"; }, "");
}

std::string PlPoly::young_text() const {
  return render_poly(
      *this, [](const Subset& K) { return "p^(" + std::to_string(K.size()) + ")[" + partition_label(K) + "]"; },
      "*");
}

std::string PlPoly::young_latex() const {
  return render_poly(
      *this,
      [](const Subset& K) {
        std::string lam = partition_label(K);
        return "p^{(" + std::to_string(K.size()) + ")}_{" + (lam.empty() ? "\\emptyset" : "\\ydiagram{" + lam + "}") +
               "}";
      },
      "");
}

std::complex<double> PlPoly::evaluate(const CMatrix& z, double* scale) const {
  std::map<Subset, std::complex<double>> cache;
  std::complex<double> s = 0;
  double mag = 0;
  for (const auto& [m, c] : terms_) {
    std::complex<double> t = static_cast<double>(c);
    for (const Subset& K : m) {
      auto it = cache.find(K);
      if (it == cache.end()) it = cache.emplace(K, pluecker(z, K)).first;
      t *= it->second;
    }
    s += t;
    mag += std::abs(t);
  }
  if (scale) *scale = mag;
  return s;
}

std::string family_name(TermFamily f) {
  switch (f) {
    case TermFamily::LeftRange: return "left";
    case TermFamily::Middle: return "middle";
    case TermFamily::RightRange: return "right";
    case TermFamily::Block: return "block";
    case TermFamily::Quantum: return "quantum";
  }
  return "";
}

std::vector<SuperpotentialTerm> superpotential(const FlagShape& shape) {
  int n = shape.n(), r = shape.r(), n1 = shape.step(1), nr = shape.step(r);
  std::vector<SuperpotentialTerm> out;
  for (int i = 1; i < n1; ++i) {
    Subset tail = interval(n - n1 + i + 1, n);
    out.push_back({TermFamily::LeftRange, i, 0,
                   PlPoly::symbol(set_union(set_union(interval(1, i - 1), {i + 1}), tail)),
                   PlPoly::symbol(set_union(interval(1, i), tail)), i});
  }
  for (int j = 1; j < r; ++j) {
    int nj = shape.step(j), nj1 = shape.step(j + 1);
    for (int i = nj + 1; i < nj1; ++i) {
      int hat = n - nj1 + i - nj;
      Subset top = set_union(interval(1, i - 1), {i + 1}), tail = interval(hat + 1, n);
      PlPoly num, den;
      for (const Subset& J : subsets(set_minus(interval(1, std::min(i + 1, hat)), {i}), i - nj)) {
        int eps = std::binary_search(J.begin(), J.end(), i + 1) ? -1 : 1;
        num += product_symbol(set_minus(top, J), set_union(J, tail), eps * sign_of(element_sum(J)));
      }
      for (const Subset& J : subsets(interval(1, std::min(i, hat)), i - nj))
        den += product_symbol(set_minus(interval(1, i), J), set_union(J, tail), sign_of(element_sum(J)));
      out.push_back({TermFamily::Middle, i, 0, num, den, i});
    }
  }
  for (int i = nr + 1; i < n; ++i)
    out.push_back({TermFamily::RightRange, i, 0, PlPoly::symbol(set_minus(interval(i - nr + 1, i + 1), {i})),
                   PlPoly::symbol(interval(i - nr + 1, i)), i});
  for (int j = 1; j <= r; ++j) {
    int nj = shape.step(j);
    out.push_back({TermFamily::Block, j, 0, PlPoly::symbol(set_union(interval(1, nj - 1), {nj + 1})),
                   PlPoly::symbol(interval(1, nj)), nj});
  }
  for (int j = 1; j <= r; ++j) {
    int nj = shape.step(j), prev = shape.step(j - 1), next = shape.step(j + 1);
    Subset K = set_minus(set_union({n - next + 1}, interval(n - nj + 1, n)), {n - prev});
    out.push_back({TermFamily::Quantum, j, j, PlPoly::symbol(K), PlPoly::symbol(interval(n - nj + 1, n)), n - 1 + j});
  }
  return out;
}

std::vector<SuperpotentialTerm> young_view(const FlagShape& shape) {
  int n = shape.n(), r = shape.r(), n1 = shape.step(1), nr = shape.step(r);
  std::vector<SuperpotentialTerm> out;
  for (int i = 1; i < n1; ++i) {
    std::vector<int> den(n1 - i, n - n1), num = den;
    num.push_back(1);
    out.push_back({TermFamily::LeftRange, i, 0, PlPoly::symbol(young(n1, num)), PlPoly::symbol(young(n1, den)), i});
  }
  for (int j = 1; j < r; ++j) {
    int k = shape.step(j), l = shape.step(j + 1);
    for (int m = 1; m < l - k; ++m) {
      // L-operator: p^{(k)}_mu times p^{(l)} of the rectangle (n-l)^{l-m} joined with nu below it.
      auto joined = [&](const std::vector<int>& seq) -> std::optional<Subset> {
        std::vector<int> nu = conjugate_partition(seq, m);
        if (!nu.empty() && nu[0] > n - l) return std::nullopt;
        std::vector<int> lam(l - m, n - l);
        lam.insert(lam.end(), nu.begin(), nu.end());
        return young(l, lam);
      };
      PlPoly num, den;
      std::vector<int> mu(k, 0);
      // All mu with m+1 >= mu_1 >= ... >= mu_k >= 0 and mu_t <= m for t >= 2.
      std::function<void(int)> walk = [&](int t) {
        if (t == k) {
          int size = element_sum(mu);
          if (mu[0] <= m) {
            std::vector<int> seq;
            for (int s = k - 1; s >= 0; --s) seq.push_back(m - mu[s]);
            if (auto K = joined(seq)) den += product_symbol(young(k, mu), *K, sign_of(k * m - size));
          }
          if (mu[0] == m + 1) {
            std::vector<int> seq;
            for (int s = k - 1; s >= 1; --s) seq.push_back(m - mu[s]);
            seq.push_back(0);
            if (auto K = joined(seq)) num += product_symbol(young(k, mu), *K, sign_of(k * m + 1 - size));
          } else if (mu[0] < m) {
            std::vector<int> seq;
            for (int s = k - 1; s >= 0; --s) seq.push_back(m - mu[s]);
            seq.push_back(1);
            if (auto K = joined(seq)) num += product_symbol(young(k, mu), *K, sign_of(k * m - size));
          }
          return;
        }
        int cap = t == 0 ? m + 1 : std::min(mu[t - 1], m);
        for (int v = 0; v <= cap; ++v) {
          mu[t] = v;
          walk(t + 1);
        }
        mu[t] = 0;
      };
      walk(0);
      out.push_back({TermFamily::Middle, k + m, 0, num, den, k + m});
    }
  }
  for (int m = 1; m < n - nr; ++m) {
    std::vector<int> den(nr, m), num = den;
    num[0] = m + 1;
    out.push_back(
        {TermFamily::RightRange, nr + m, 0, PlPoly::symbol(young(nr, num)), PlPoly::symbol(young(nr, den)), nr + m});
  }
  for (int j = 1; j <= r; ++j) {
    int nj = shape.step(j);
    out.push_back({TermFamily::Block, j, 0, PlPoly::symbol(young(nj, {1})), PlPoly::symbol(young(nj, {})), nj});
  }
  for (int j = 1; j <= r; ++j) {
    int nj = shape.step(j), prev = shape.step(j - 1), next = shape.step(j + 1);
    std::vector<int> full(nj, n - nj), cut(nj, n - nj);
    for (int row = prev; row < nj - 1; ++row) cut[row] = n - nj - 1;
    cut[nj - 1] = n - next;
    out.push_back(
        {TermFamily::Quantum, j, j, PlPoly::symbol(young(nj, cut)), PlPoly::symbol(young(nj, full)), n - 1 + j});
  }
  return out;
}

SuperpotentialTerm normalized(SuperpotentialTerm t) {
  if (!t.denominator.is_zero() && t.denominator.terms().begin()->second < 0) {
    t.numerator = -t.numerator;
    t.denominator = -t.denominator;
  }
  return t;
}

std::vector<PlPoly> divisor_equations(const FlagShape& shape) {
  int n = shape.n(), r = shape.r(), n1 = shape.step(1), nr = shape.step(r);
  std::vector<PlPoly> D;
  for (int k = 1; k <= n - 1 + r; ++k) {
    if (k >= n) {
      D.push_back(PlPoly::symbol(interval(n - shape.step(k - n + 1) + 1, n)));
    } else if (shape.step_index(k)) {
      D.push_back(PlPoly::symbol(interval(1, k)));
    } else if (k < n1) {
      D.push_back(PlPoly::symbol(set_minus(interval(1, n), interval(k + 1, n - n1 + k))));
    } else if (k > nr) {
      D.push_back(PlPoly::symbol(interval(k - nr + 1, k)));
    } else {
      int j = 1;
      while (shape.step(j + 1) < k) ++j;
      int nj = shape.step(j), hat = n - shape.step(j + 1) + k - nj;
      PlPoly p;
      for (const Subset& J : subsets(interval(1, std::min(k, hat)), k - nj))
        p += product_symbol(set_minus(interval(1, k), J), set_union(J, interval(hat + 1, n)), sign_of(element_sum(J)));
      D.push_back(p);
    }
  }
  return D;
}

std::optional<int> match_divisor(const PlPoly& p, const std::vector<PlPoly>& divisors) {
  PlPoly neg = -p;
  for (std::size_t k = 0; k < divisors.size(); ++k)
    if (divisors[k] == p || divisors[k] == neg) return static_cast<int>(k) + 1;
  return std::nullopt;
}

std::string render_text(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape) {
  int n = shape.n();
  std::string s;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    if (t) s += " + ";
    if (term.q_index) s += "q" + std::to_string(shape.step(term.q_index)) + "*";
    bool simple = term.numerator.terms().size() == 1 && term.denominator.terms().size() == 1;
    if (simple)
      s += term.numerator.text(n) + "/" + term.denominator.text(n);
    else
      s += "(" + term.numerator.text(n) + ")/(" + term.denominator.text(n) + ")";
  }
  return s;
}

std::string render_latex(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape) {
  int n = shape.n();
  std::string s;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    if (t) s += "+";
    if (term.q_index) s += "q_{" + std::to_string(shape.step(term.q_index)) + "}";
    s += "\\frac{" + term.numerator.latex(n) + "}{" + term.denominator.latex(n) + "}";
  }
  return s;
}

std::string render_young_latex(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape) {
  std::string s;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    if (t) s += "+";
    if (term.q_index) s += "q_{" + std::to_string(shape.step(term.q_index)) + "}";
    s += "\\frac{" + term.numerator.young_latex() + "}{" + term.denominator.young_latex() + "}";
  }
  return s;
}

nlohmann::json terms_json(const std::vector<SuperpotentialTerm>& terms, const FlagShape& shape) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& t : terms) {
    nlohmann::json e{{"family", family_name(t.family)},
                     {"index", t.index},
                     {"numerator", t.numerator.text(shape.n())},
                     {"denominator", t.denominator.text(shape.n())},
                     {"divisor_k", t.divisor}};
    e["q"] = t.q_index ? nlohmann::json("q" + std::to_string(shape.step(t.q_index))) : nlohmann::json(nullptr);
    a.push_back(std::move(e));
  }
  return a;
}

Eigen::MatrixXd dot_word(int n, const std::vector<int>& word) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i : word) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
    s(i - 1, i - 1) = 0;
    s(i, i) = 0;
    s(i - 1, i) = 1;
    s(i, i - 1) = -1;
    m = m * s;
  }
  return m;
}

std::vector<int> reduced_word(const Perm& w) {
  Perm x = w;
  std::vector<int> word;
  for (;;) {
    int k = 0;
    for (int i = 1; i < static_cast<int>(x.size()); ++i)
      if (x[i - 1] > x[i]) {
        k = i;
        break;
      }
    if (!k) break;
    word.push_back(k);
    std::swap(x[k - 1], x[k]);
  }
  std::reverse(word.begin(), word.end());
  return word;
}

Perm longest_parabolic(const FlagShape& shape) {
  Perm w(shape.n());
  for (int j = 1; j <= shape.r() + 1; ++j) {
    int lo = shape.step(j - 1) + 1, hi = shape.step(j);
    for (int i = lo; i <= hi; ++i) w[i - 1] = lo + hi - i;
  }
  return w;
}

Eigen::MatrixXd wP_inverse_w0(const FlagShape& shape) {
  int n = shape.n();
  Eigen::MatrixXd wP = dot_word(n, reduced_word(longest_parabolic(shape)));
  Eigen::MatrixXd w0 = dot_word(n, reduced_word(longest_element(n)));
  return wP.inverse() * w0;
}

ZChart::ZChart(FlagShape shape) : shape_(std::move(shape)) {
  int n = shape_.n();
  base_ = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j <= shape_.r() + 1; ++j) {
    int prev = shape_.step(j - 1), nj = shape_.step(j);
    double sign = prev % 2 ? -1.0 : 1.0;
    for (int t = 1; t <= nj - prev; ++t) {
      base_(prev + t - 1, n - nj + t - 1) = sign;
      if (j <= shape_.r())
        for (int c = 1; c <= n - nj; ++c) coords_.emplace_back(prev + t, c);
    }
  }
  std::sort(coords_.begin(), coords_.end());
  int d = dim();
  symbolic_.assign(n, std::vector<MPoly>(n, MPoly(d)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (base_(a, b) != 0) symbolic_[a][b] = MPoly::constant(d, static_cast<long>(base_(a, b)));
  for (int v = 0; v < d; ++v) symbolic_[coords_[v].first - 1][coords_[v].second - 1] = MPoly::variable(d, v);
}

CMatrix ZChart::matrix(const CVector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("ZChart: wrong number of coordinates");
  CMatrix z = base_.cast<std::complex<double>>();
  for (int v = 0; v < dim(); ++v) z(coords_[v].first - 1, coords_[v].second - 1) = x(v);
  return z;
}

const MPoly& ZChart::pluecker(const Subset& K) const {
  auto it = cache_.find(K);
  if (it != cache_.end()) return it->second;
  int k = static_cast<int>(K.size());
  std::vector<std::vector<MPoly>> m(k, std::vector<MPoly>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) m[a][b] = symbolic_[a][K[b] - 1];
  return cache_.emplace(K, poly_det(m)).first->second;
}

Perm longest_coset_rep(const FlagShape& shape) {
  return compose(longest_parabolic(shape), longest_element(shape.n()));
}

std::vector<int> random_reduced_word(const Perm& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Perm x = w;
  std::vector<int> word;
  for (;;) {
    std::vector<int> descents;
    for (int i = 1; i < static_cast<int>(x.size()); ++i)
      if (x[i - 1] > x[i]) descents.push_back(i);
    if (descents.empty()) break;
    int k = descents[std::uniform_int_distribution<std::size_t>(0, descents.size() - 1)(rng)];
    word.push_back(k);
    std::swap(x[k - 1], x[k]);
  }
  std::reverse(word.begin(), word.end());
  return word;
}

std::vector<MPoly> torus_chart(const FlagShape& shape, const std::vector<int>& word) {
  int n = shape.n(), m = static_cast<int>(word.size());
  ZChart chart(shape);
  if (m != chart.dim()) throw std::invalid_argument("torus_chart: word length must equal the chart dimension");
  using PMatrix = std::vector<std::vector<MPoly>>;
  auto identity = [&] {
    PMatrix a(n, std::vector<MPoly>(n, MPoly(m)));
    for (int i = 0; i < n; ++i) a[i][i] = MPoly::constant(m, 1);
    return a;
  };
  auto product = [&](const PMatrix& a, const PMatrix& b) {
    PMatrix c(n, std::vector<MPoly>(n, MPoly(m)));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (!a[i][k].is_zero())
          for (int j = 0; j < n; ++j)
            if (!b[k][j].is_zero()) c[i][j] += a[i][k] * b[k][j];
    return c;
  };
  // Right multiplication by x_i(t) adds t times column i to column i+1.
  PMatrix u = identity();
  for (int k = 0; k < m; ++k) {
    int i = word[k];
    MPoly t = MPoly::variable(m, k);
    for (int row = 0; row < n; ++row)
      if (!u[row][i - 1].is_zero()) u[row][i] += u[row][i - 1] * t;
  }
  // blockdiag(u) is unipotent, so its inverse is sum_k (I - B)^k.
  std::vector<int> block(n);
  for (int j = 1; j <= shape.r() + 1; ++j)
    for (int i = shape.step(j - 1); i < shape.step(j); ++i) block[i] = j;
  PMatrix nil(n, std::vector<MPoly>(n, MPoly(m)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (block[i] == block[j]) nil[i][j] = -u[i][j];
  PMatrix inv = identity(), power = identity();
  for (int k = 1; k < n; ++k) {
    power = product(power, nil);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) inv[i][j] += power[i][j];
  }
  PMatrix base(n, std::vector<MPoly>(n, MPoly(m)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (chart.base()(i, j) != 0) base[i][j] = MPoly::constant(m, static_cast<long>(chart.base()(i, j)));
  PMatrix z = product(product(inv, u), base);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool free = std::binary_search(chart.coords().begin(), chart.coords().end(), std::make_pair(i + 1, j + 1));
      if (!free && z[i][j] != base[i][j]) throw std::logic_error("torus_chart: product left the chart");
    }
  std::vector<MPoly> images;
  for (const auto& [row, col] : chart.coords()) images.push_back(z[row - 1][col - 1]);
  return images;
}

std::complex<double> minor(const CMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  int k = static_cast<int>(rows.size());
  if (k == 0) return 1;
  CMatrix s(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) s(a, b) = m(rows[a] - 1, cols[b] - 1);
  return s.determinant();
}

std::complex<double> pluecker(const CMatrix& z, const Subset& K) {
  return minor(z, interval(1, static_cast<int>(K.size())), K);
}

UVFactors uv_from_z(const CMatrix& z, const FlagShape& shape, double pivot_tol) {
  int n = static_cast<int>(z.rows());
  if (n != shape.n()) throw std::invalid_argument("uv_from_z: size mismatch");
  double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  CMatrix L = CMatrix::Zero(n, n), U = CMatrix::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = k; i < n; ++i) {
      std::complex<double> s = z(i, k);
      for (int t = 0; t < k; ++t) s -= L(i, t) * U(t, k);
      L(i, k) = s;
    }
    if (std::abs(L(k, k)) < pivot_tol * scale) throw PivotFailure("uv_from_z: z is outside the big cell");
    for (int j = k + 1; j < n; ++j) {
      std::complex<double> s = z(k, j);
      for (int t = 0; t < k; ++t) s -= L(k, t) * U(t, j);
      U(k, j) = s / L(k, k);
    }
  }
  CMatrix v = wP_inverse_w0(shape).cast<std::complex<double>>() * z.inverse();
  return {L, U, v};
}

std::complex<double> f_minus_uv(const CMatrix& z, const std::vector<std::complex<double>>& q, const FlagShape& shape) {
  UVFactors f = uv_from_z(z, shape);
  std::complex<double> s = 0;
  for (int j = 1; j <= shape.r(); ++j) s += q[j - 1] * f.v(shape.step(j) - 1, shape.step(j));
  for (int i = 1; i < shape.n(); ++i) s += f.u(i - 1, i);
  return s;
}

std::complex<double> f_minus_pluecker(const CMatrix& z, const std::vector<std::complex<double>>& q,
                                      const std::vector<SuperpotentialTerm>& terms, double tol) {
  std::complex<double> s = 0;
  for (const auto& t : terms) {
    double scale = 0;
    std::complex<double> den = t.denominator.evaluate(z, &scale);
    if (std::abs(den) < tol * scale) throw NearPole("f_minus_pluecker: denominator vanishes");
    std::complex<double> v = t.numerator.evaluate(z) / den;
    s += t.q_index ? q[t.q_index - 1] * v : v;
  }
  return s;
}

CompiledPoly::CompiledPoly(const MPoly& p) {
  for (const auto& [e, c] : p.terms()) {
    Term t{c.get_d(), {}};
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
      if (e[i]) {
        t.f.emplace_back(i, e[i]);
        max_deg_ = std::max(max_deg_, e[i]);
      }
    terms_.push_back(std::move(t));
  }
}

std::complex<double> CompiledPoly::operator()(const std::vector<std::vector<std::complex<double>>>& powers) const {
  std::complex<double> s = 0;
  for (const Term& t : terms_) {
    std::complex<double> v = t.c;
    for (const auto& [i, e] : t.f) v *= powers[i][e];
    s += v;
  }
  return s;
}

double CompiledPoly::magnitude(const std::vector<std::vector<std::complex<double>>>& powers) const {
  double s = 0;
  for (const Term& t : terms_) {
    double v = std::abs(t.c);
    for (const auto& [i, e] : t.f) v *= std::abs(powers[i][e]);
    s += v;
  }
  return s;
}

FMinusFunction::FMinusFunction(const FlagShape& shape, std::vector<MPoly> substitution)
    : chart_(shape), substitution_(std::move(substitution)) {
  if (!substitution_.empty() && static_cast<int>(substitution_.size()) != chart_.dim())
    throw std::invalid_argument("FMinusFunction: substitution needs one image per chart coordinate");
  dim_ = substitution_.empty() ? chart_.dim() : substitution_.front().nvars();
  int d = dim_;
  auto chart_poly = [&](const PlPoly& p) {
    MPoly s(chart_.dim());
    for (const auto& [m, c] : p.terms()) {
      MPoly t = MPoly::constant(chart_.dim(), static_cast<long>(c));
      for (const Subset& K : m) t = t * chart_.pluecker(K);
      s += t;
    }
    return substitution_.empty() ? s : s.substitute(substitution_);
  };
  for (const auto& st : superpotential(shape)) {
    MPoly N = chart_poly(st.numerator), D = chart_poly(st.denominator);
    Term t{st.q_index, CompiledPoly(N), CompiledPoly(D), {}, {}, {}, {}};
    std::vector<MPoly> dN(d), dD(d);
    for (int a = 0; a < d; ++a) {
      dN[a] = N.derivative(a);
      dD[a] = D.derivative(a);
      t.dN.emplace_back(dN[a]);
      t.dD.emplace_back(dD[a]);
    }
    t.ddN.resize(d);
    t.ddD.resize(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        t.ddN[a].emplace_back(dN[a].derivative(b));
        t.ddD[a].emplace_back(dD[a].derivative(b));
      }
    max_deg_ = std::max({max_deg_, t.N.max_degree(), t.D.max_degree()});
    terms_.push_back(std::move(t));
  }
}

FMinusFunction::Eval FMinusFunction::evaluate(const CVector& x, const std::vector<std::complex<double>>& q,
                                              bool hessian) const {
  int d = dim();
  std::vector<std::vector<std::complex<double>>> pw(d, std::vector<std::complex<double>>(max_deg_ + 1, 1.0));
  for (int a = 0; a < d; ++a)
    for (int e = 1; e <= max_deg_; ++e) pw[a][e] = pw[a][e - 1] * x(a);
  Eval out{0, CVector::Zero(d), hessian ? CMatrix::Zero(d, d) : CMatrix(), 1e300, 0};
  std::vector<std::complex<double>> gN(d), gD(d);
  for (const Term& t : terms_) {
    std::complex<double> c = t.q_index ? q[t.q_index - 1] : 1.0;
    std::complex<double> N = t.N(pw), D = t.D(pw);
    out.min_relative_denominator = std::min(out.min_relative_denominator, std::abs(D) / t.D.magnitude(pw));
    out.value += c * N / D;
    out.term_scale += std::abs(c * N / D);
    for (int a = 0; a < d; ++a) {
      gN[a] = t.dN[a](pw);
      gD[a] = t.dD[a](pw);
      out.gradient(a) += c * (gN[a] / D - N * gD[a] / (D * D));
    }
    if (!hessian) continue;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        std::complex<double> h = t.ddN[a][b](pw) / D - (gN[a] * gD[b] + gN[b] * gD[a]) / (D * D) -
                                 N * t.ddD[a][b](pw) / (D * D) + 2.0 * N * gD[a] * gD[b] / (D * D * D);
        out.hessian(a, b) += c * h;
        if (a != b) out.hessian(b, a) += c * h;
      }
  }
  return out;
}

CVector FMinusFunction::to_chart(const CVector& t) const {
  if (substitution_.empty()) return t;
  std::vector<std::complex<double>> tv(t.data(), t.data() + t.size());
  CVector x(chart_.dim());
  for (int a = 0; a < chart_.dim(); ++a) x(a) = substitution_[a].evaluate(tv);
  return x;
}

std::complex<double> FMinusFunction::value(const CVector& x, const std::vector<std::complex<double>>& q) const {
  return evaluate(x, q, false).value;
}

}  // namespace flagmirror
