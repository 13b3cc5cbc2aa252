#include "flagmirror/schubring.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace flagmirror {

namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime), hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  return s >= kPrime ? s - kPrime : s;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kPrime ? s - kPrime : s;
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a);
    a = mulmod(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t to_mod(long long v) {
  long long m = v % static_cast<long long>(kPrime);
  return static_cast<std::uint64_t>(m < 0 ? m + static_cast<long long>(kPrime) : m);
}

long long from_mod(std::uint64_t v) {
  return v > kPrime / 2 ? static_cast<long long>(v) - static_cast<long long>(kPrime) : static_cast<long long>(v);
}

long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer coefficient overflow");
  return r;
}

long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer coefficient overflow");
  return r;
}

long long to_ll(const Rational& r) {
  if (r.get_den() != 1 || !r.get_num().fits_slong_p()) throw std::domain_error("expected a machine-size integer coefficient");
  return r.get_num().get_si();
}

std::uint64_t pack_q(const Exponent& e, int offset, int count) {
  std::uint64_t p = 0;
  for (int i = 0; i < count; ++i) {
    if (e[offset + i] > 255) throw std::overflow_error("q exponent too large to pack");
    p |= static_cast<std::uint64_t>(e[offset + i]) << (8 * i);
  }
  return p;
}

Perm truncate_to_support(const Perm& w) {
  int s = std::max(1, support_size(w));
  return Perm(w.begin(), w.begin() + s);
}

// Elementary monomial slices: rows are monomials x^a with a_k <= m-k, columns e-indices.
struct ESlice {
  std::map<Exponent, int> row;
  std::vector<EIndex> cols;
  std::vector<std::vector<std::pair<int, long long>>> col_entries;
  std::vector<std::uint64_t> inverse;  // row-major, mod kPrime
};

void enumerate_bounded(int pos, int m, int remaining, Exponent& a, const std::function<int(int)>& bound,
                       const std::function<void(const Exponent&)>& emit) {
  if (pos == m) {
    if (remaining == 0) emit(a);
    return;
  }
  for (int v = 0; v <= std::min(bound(pos), remaining); ++v) {
    a[pos] = v;
    enumerate_bounded(pos + 1, m, remaining - v, a, bound, emit);
  }
  a[pos] = 0;
}

std::map<Exponent, long long> elementary_terms(int k, int i, int m) {
  std::map<Exponent, long long> t;
  for (const auto& S : subsets(interval(1, k), i)) {
    Exponent e(m, 0);
    for (int v : S) e[v - 1] = 1;
    t[e] += 1;
  }
  return t;
}

const ESlice& e_slice(int m, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<ESlice>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{m, degree}];
  if (slot) return *slot;
  auto s = std::make_unique<ESlice>();
  Exponent a(m, 0);
  int nrows = 0;
  enumerate_bounded(0, m, degree, a, [m](int pos) { return m - 1 - pos; },
                    [&](const Exponent& e) { s->row[e] = nrows++; });
  s->cols = e_indices(m, degree);
  if (static_cast<int>(s->cols.size()) != nrows) throw std::logic_error("e_slice: basis size mismatch");
  int N = nrows;
  std::vector<std::uint64_t> mat(static_cast<std::size_t>(N) * N, 0);
  for (int c = 0; c < N; ++c) {
    std::map<Exponent, long long> prod{{Exponent(m, 0), 1}};
    for (int k = 1; k <= m - 1; ++k) {
      int i = s->cols[c][k - 1];
      if (i == 0) continue;
      std::map<Exponent, long long> next;
      for (const auto& [e1, c1] : prod)
        for (const auto& [e2, c2] : elementary_terms(k, i, m)) {
          Exponent e = e1;
          for (int t = 0; t < m; ++t) e[t] += e2[t];
          next[e] = checked_add(next[e], checked_mul(c1, c2));
        }
      prod.swap(next);
    }
    std::vector<std::pair<int, long long>> entries;
    for (const auto& [e, v] : prod) {
      auto it = s->row.find(e);
      if (it == s->row.end()) throw std::logic_error("e_slice: monomial outside the staircase");
      entries.emplace_back(it->second, v);
      mat[static_cast<std::size_t>(it->second) * N + c] = to_mod(v);
    }
    s->col_entries.push_back(std::move(entries));
  }
  // Gauss-Jordan inverse mod p.
  std::vector<std::uint64_t> inv(static_cast<std::size_t>(N) * N, 0);
  for (int i = 0; i < N; ++i) inv[static_cast<std::size_t>(i) * N + i] = 1;
  for (int c = 0; c < N; ++c) {
    int p = c;
    while (p < N && mat[static_cast<std::size_t>(p) * N + c] == 0) ++p;
    if (p == N) throw std::logic_error("e_slice: singular change of basis");
    if (p != c)
      for (int j = 0; j < N; ++j) {
        std::swap(mat[static_cast<std::size_t>(p) * N + j], mat[static_cast<std::size_t>(c) * N + j]);
        std::swap(inv[static_cast<std::size_t>(p) * N + j], inv[static_cast<std::size_t>(c) * N + j]);
      }
    std::uint64_t piv = powmod(mat[static_cast<std::size_t>(c) * N + c], kPrime - 2);
    for (int j = 0; j < N; ++j) {
      mat[static_cast<std::size_t>(c) * N + j] = mulmod(mat[static_cast<std::size_t>(c) * N + j], piv);
      inv[static_cast<std::size_t>(c) * N + j] = mulmod(inv[static_cast<std::size_t>(c) * N + j], piv);
    }
    for (int i = 0; i < N; ++i) {
      if (i == c) continue;
      std::uint64_t f = mat[static_cast<std::size_t>(i) * N + c];
      if (!f) continue;
      std::uint64_t nf = kPrime - f;
      for (int j = 0; j < N; ++j) {
        mat[static_cast<std::size_t>(i) * N + j] = addmod(mat[static_cast<std::size_t>(i) * N + j], mulmod(nf, mat[static_cast<std::size_t>(c) * N + j]));
        inv[static_cast<std::size_t>(i) * N + j] = addmod(inv[static_cast<std::size_t>(i) * N + j], mulmod(nf, inv[static_cast<std::size_t>(c) * N + j]));
      }
    }
  }
  s->inverse = std::move(inv);
  slot = std::move(s);
  return *slot;
}

}  // namespace

// ---------------------------------------------------------------- QHClass

void QHClass::add(const Perm& w, const MPoly& c) {
  if (c.is_zero()) return;
  auto it = terms.find(w);
  if (it == terms.end()) {
    terms.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

MPoly QHClass::coefficient(const Perm& w) const {
  auto it = terms.find(w);
  return it == terms.end() ? MPoly(nq) : it->second;
}

QHClass& QHClass::operator+=(const QHClass& o) {
  for (const auto& [w, c] : o.terms) add(w, c);
  return *this;
}

QHClass& QHClass::operator-=(const QHClass& o) {
  for (const auto& [w, c] : o.terms) add(w, -c);
  return *this;
}

QHClass QHClass::operator*(const Rational& c) const {
  QHClass r{nq, {}};
  for (const auto& [w, p] : terms) r.add(w, p * c);
  return r;
}

QHClass QHClass::at_q_zero() const {
  QHClass r{nq, {}};
  Exponent zero(nq, 0);
  for (const auto& [w, p] : terms) r.add(w, MPoly::constant(nq, p.coefficient(zero)));
  return r;
}

std::string QHClass::str(const std::vector<std::string>& qnames) const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : terms) {
    if (!first) os << " + ";
    first = false;
    std::string cs = c.str(qnames);
    if (cs == "1") os << "s[" << perm_to_string(w) << "]";
    else os << "(" << cs << ")*s[" << perm_to_string(w) << "]";
  }
  return os.str();
}

std::vector<std::string> q_names(int nq) {
  std::vector<std::string> v;
  for (int i = 1; i <= nq; ++i) v.push_back("q" + std::to_string(i));
  return v;
}

// ---------------------------------------------------------------- Schubert polynomials

namespace {

const MPoly& schubert_in_support(const Perm& w) {
  static std::recursive_mutex mu;
  static std::map<Perm, MPoly> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;
  int m = static_cast<int>(w.size());
  MPoly p(m);
  if (w == longest_element(m)) {
    Exponent e(m);
    for (int i = 0; i < m; ++i) e[i] = m - 1 - i;
    p = MPoly::monomial(e, 1);
  } else {
    int i = 1;
    while (w[i - 1] > w[i]) ++i;
    p = schubert_in_support(swap_positions(w, i, i + 1)).divided_difference(i - 1);
  }
  return cache.emplace(w, std::move(p)).first->second;
}

}  // namespace

MPoly schubert_polynomial(const Perm& w) {
  if (!is_permutation(w)) throw std::invalid_argument("schubert_polynomial: not a permutation");
  Perm t = truncate_to_support(w);
  const MPoly& p = schubert_in_support(t);
  if (t.size() == w.size()) return p;
  std::vector<int> map(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) map[i] = static_cast<int>(i);
  return p.remap(static_cast<int>(w.size()), map);
}

std::vector<EIndex> e_indices(int n, int degree) {
  std::vector<EIndex> out;
  if (n <= 1) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponent a(n - 1, 0);
  enumerate_bounded(0, n - 1, degree, a, [](int pos) { return pos + 1; },
                    [&](const Exponent& e) { out.push_back(e); });
  return out;
}

std::map<EIndex, long long> e_expansion(const Perm& w) {
  if (!is_permutation(w)) throw std::invalid_argument("e_expansion: not a permutation");
  static std::mutex mu;
  static std::map<Perm, std::map<EIndex, long long>> cache;
  Perm t = truncate_to_support(w);
  std::map<EIndex, long long> base;
  {
    std::unique_lock<std::mutex> lock(mu);
    auto it = cache.find(t);
    if (it != cache.end()) {
      base = it->second;
    } else {
      lock.unlock();
      int m = static_cast<int>(t.size());
      if (m <= 1) {
        base[EIndex{}] = 1;
      } else {
        const ESlice& s = e_slice(m, length(t));
        int N = static_cast<int>(s.cols.size());
        std::vector<long long> rhs(N, 0);
        MPoly st = schubert_in_support(t);
        for (const auto& [e, c] : st.terms()) rhs[s.row.at(e)] = to_ll(c);
        std::vector<long long> alpha(N, 0);
        for (int i = 0; i < N; ++i) {
          std::uint64_t acc = 0;
          for (int j = 0; j < N; ++j)
            if (rhs[j]) acc = addmod(acc, mulmod(s.inverse[static_cast<std::size_t>(i) * N + j], to_mod(rhs[j])));
          alpha[i] = from_mod(acc);
        }
        // Exact check of the lifted solution.
        std::vector<__int128> back(N, 0);
        for (int c = 0; c < N; ++c)
          if (alpha[c])
            for (const auto& [r, v] : s.col_entries[c]) back[r] += static_cast<__int128>(v) * alpha[c];
        for (int r = 0; r < N; ++r)
          if (back[r] != rhs[r]) throw std::logic_error("e_expansion: modular lift failed exact verification");
        for (int c = 0; c < N; ++c)
          if (alpha[c]) base[s.cols[c]] = alpha[c];
      }
      lock.lock();
      cache.emplace(t, base);
    }
  }
  int want = std::max(0, static_cast<int>(w.size()) - 1);
  std::map<EIndex, long long> out;
  for (const auto& [I, c] : base) {
    EIndex J = I;
    J.resize(want, 0);
    out[J] = c;
  }
  return out;
}

// ---------------------------------------------------------------- quantum polynomials

int xq_nvars(int n) { return 2 * n - 1; }

std::vector<int> xq_weights(int n) {
  std::vector<int> w(2 * n - 1, 1);
  for (int i = n; i < 2 * n - 1; ++i) w[i] = 2;
  return w;
}

MPoly x_var(int n, int i) { return MPoly::variable(xq_nvars(n), i - 1); }
MPoly q_var(int n, int i) { return MPoly::variable(xq_nvars(n), n + i - 1); }

MPoly elementary(int k, int i, int n) {
  MPoly p(xq_nvars(n));
  if (i < 0 || i > k) return p;
  for (const auto& S : subsets(interval(1, k), i)) {
    Exponent e(xq_nvars(n), 0);
    for (int v : S) e[v - 1] = 1;
    p.add_term(e, 1);
  }
  return p;
}

MPoly quantum_elementary(int k, int i, int n) {
  static std::recursive_mutex mu;
  static std::map<std::tuple<int, int, int>, MPoly> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  int nv = xq_nvars(n);
  if (i < 0 || i > k || k < 0) return MPoly(nv);
  if (i == 0) return MPoly::constant(nv, 1);
  if (k > n) throw std::invalid_argument("quantum_elementary: k exceeds n");
  auto key = std::make_tuple(k, i, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  MPoly p = quantum_elementary(k - 1, i, n) + x_var(n, k) * quantum_elementary(k - 1, i - 1, n);
  if (k >= 2) p += q_var(n, k - 1) * quantum_elementary(k - 2, i - 2, n);
  cache.emplace(key, p);
  return p;
}

MPoly quantum_elementary_monomial(const EIndex& I, int n) {
  MPoly p = MPoly::constant(xq_nvars(n), 1);
  for (std::size_t k = 1; k <= I.size(); ++k)
    if (I[k - 1]) p = p * quantum_elementary(static_cast<int>(k), I[k - 1], n);
  return p;
}

MPoly quantum_schubert_polynomial(const Perm& w, int n) {
  Perm v = embed(w, n);
  MPoly p(xq_nvars(n));
  for (const auto& [I, a] : e_expansion(v)) p += quantum_elementary_monomial(I, n) * to_rational(a);
  return p;
}

MPoly quantum_complete(int k, int l, int n) {
  int nv = xq_nvars(n);
  if (l < 0) return MPoly(nv);
  if (l == 0) return MPoly::constant(nv, 1);
  if (k + l - 1 > n) throw std::invalid_argument("quantum_complete: needs more than n variables");
  std::vector<std::vector<MPoly>> m(l, std::vector<MPoly>(l, MPoly(nv)));
  for (int r = 1; r <= l; ++r)
    for (int c = 1; c <= l; ++c) m[r - 1][c - 1] = quantum_elementary(k + l - r, c - r + 1, n);
  return poly_det(m);
}

MPoly quantum_complete_monomial(const EIndex& I, int n) {
  MPoly p = MPoly::constant(xq_nvars(n), 1);
  for (std::size_t k = 1; k <= I.size(); ++k)
    if (I[k - 1]) p = p * quantum_complete(static_cast<int>(k), I[k - 1], n);
  return p;
}

MPoly omega(const MPoly& p, int n) {
  int nv = xq_nvars(n);
  MPoly r(nv);
  for (const auto& [e, c] : p.terms()) {
    Exponent f(nv, 0);
    int xdeg = 0;
    for (int k = 1; k <= n; ++k) {
      f[n - k] = e[k - 1];
      xdeg += e[k - 1];
    }
    for (int k = 1; k < n; ++k) f[n + (n - k) - 1] = e[n + k - 1];
    r.add_term(f, xdeg % 2 ? -c : c);
  }
  return r;
}

MPoly quantum_det_formula(const Perm& w, int n) {
  SkewShape s = skew_shape(embed(w, n));
  int k = static_cast<int>(s.flag.size());
  if (k == 0) return MPoly::constant(xq_nvars(n), 1);
  std::vector<std::vector<MPoly>> m(k, std::vector<MPoly>(k, MPoly(xq_nvars(n))));
  for (int r = 1; r <= k; ++r)
    for (int c = 1; c <= k; ++c)
      m[r - 1][c - 1] = quantum_complete(s.flag[r - 1], s.lambda[r - 1] - s.mu[c - 1] - r + c, n);
  return poly_det(m);
}

// ---------------------------------------------------------------- Monk operators

MonkOperators::MonkOperators(int n) : n_(n) {
  if (n < 2 || n > 8) throw std::invalid_argument("MonkOperators: supported for 2 <= n <= 8");
  perms_ = all_permutations(n);
  ops_.assign(n - 1, std::vector<std::vector<Entry>>(perms_.size()));
  for (std::size_t idx = 0; idx < perms_.size(); ++idx) {
    const Perm& w = perms_[idx];
    for (int a = 1; a < n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        int between = 0;
        bool classical = w[a - 1] < w[b - 1];
        int lo = std::min(w[a - 1], w[b - 1]), hi = std::max(w[a - 1], w[b - 1]);
        for (int c = a + 1; c < b; ++c)
          if (w[c - 1] > lo && w[c - 1] < hi) ++between;
        std::uint64_t qexp = 0;
        if (classical) {
          if (between != 0) continue;  // length must rise by exactly one
        } else {
          if (between != b - a - 1) continue;  // length drops by 2(b-a)-1
          for (int m = a; m < b; ++m) qexp += std::uint64_t{1} << (8 * (m - 1));
        }
        Entry e{static_cast<std::uint32_t>(perm_rank(swap_positions(w, a, b))), qexp};
        for (int k = a; k < b; ++k) ops_[k - 1][idx].push_back(e);
      }
  }
}

std::uint32_t MonkOperators::index(const Perm& w) const {
  if (static_cast<int>(w.size()) != n_ || !is_permutation(w)) throw std::invalid_argument("MonkOperators::index: not in S_n");
  return static_cast<std::uint32_t>(perm_rank(w));
}

void MonkOperators::save(const std::filesystem::path& file) const {
  std::filesystem::create_directories(file.parent_path());
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot write operator cache " + tmp.string());
    os << "flagmirror-monk-operators 1\n" << "n " << n_ << " dim " << perms_.size() << "\n";
    for (int k = 1; k < n_; ++k) {
      std::size_t nnz = 0;
      for (const auto& row : ops_[k - 1]) nnz += row.size();
      os << "op " << k << " " << nnz << "\n";
      for (std::size_t r = 0; r < ops_[k - 1].size(); ++r)
        for (const Entry& e : ops_[k - 1][r]) os << r << ' ' << e.target << ' ' << e.qexp << '\n';
    }
  }
  std::filesystem::rename(tmp, file);
}

std::optional<MonkOperators> MonkOperators::load(const std::filesystem::path& file, int n) {
  std::ifstream is(file);
  if (!is) return std::nullopt;
  std::string magic, tag;
  int version = 0, fn = 0;
  std::size_t dim = 0;
  if (!(is >> magic >> version) || magic != "flagmirror-monk-operators" || version != 1) return std::nullopt;
  if (!(is >> tag >> fn) || tag != "n" || fn != n) return std::nullopt;
  if (!(is >> tag >> dim) || tag != "dim" || dim != factorial(n)) return std::nullopt;
  MonkOperators m;
  m.n_ = n;
  m.perms_ = all_permutations(n);
  m.ops_.assign(n - 1, std::vector<std::vector<Entry>>(dim));
  for (int k = 1; k < n; ++k) {
    int kk = 0;
    std::size_t nnz = 0;
    if (!(is >> tag >> kk >> nnz) || tag != "op" || kk != k) return std::nullopt;
    for (std::size_t t = 0; t < nnz; ++t) {
      std::size_t r = 0;
      Entry e{};
      if (!(is >> r >> e.target >> e.qexp) || r >= dim || e.target >= dim) return std::nullopt;
      m.ops_[k - 1][r].push_back(e);
    }
  }
  return m;
}

namespace {
std::mutex g_cache_mu;
std::optional<std::filesystem::path> g_cache_dir;
bool g_cache_dir_set = false;
}  // namespace

std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::string>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return std::filesystem::path(*explicit_dir);
  if (const char* env = std::getenv("FLAGMIRROR_CACHE_DIR"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

void set_cache_dir(const std::optional<std::filesystem::path>& dir) {
  std::lock_guard<std::mutex> lock(g_cache_mu);
  g_cache_dir = dir;
  g_cache_dir_set = true;
}

const MonkOperators& monk_operators(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<MonkOperators>> ops;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = ops[n];
  if (slot) return *slot;
  std::optional<std::filesystem::path> dir;
  {
    std::lock_guard<std::mutex> l2(g_cache_mu);
    dir = g_cache_dir_set ? g_cache_dir : resolve_cache_dir(std::nullopt);
  }
  if (dir && n >= 6) {
    std::filesystem::path file = *dir / ("monk-n" + std::to_string(n) + ".txt");
    if (auto loaded = MonkOperators::load(file, n)) {
      slot = std::make_unique<MonkOperators>(std::move(*loaded));
      return *slot;
    }
    slot = std::make_unique<MonkOperators>(n);
    try {
      slot->save(file);
    } catch (const std::exception&) {
      // An unwritable cache only costs recomputation.
    }
    return *slot;
  }
  slot = std::make_unique<MonkOperators>(n);
  return *slot;
}

// ---------------------------------------------------------------- QVector

QVector QVector::basis(const MonkOperators& ops, const Perm& w) {
  QVector v(ops);
  v.c_[ops.index(w)][0] = 1;
  return v;
}

bool QVector::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const QPoly& p) { return p.empty(); });
}

namespace {
void qpoly_add(QVector::QPoly& p, std::uint64_t e, long long c) {
  if (!c) return;
  auto [it, ins] = p.try_emplace(e, c);
  if (!ins) {
    it->second = checked_add(it->second, c);
    if (!it->second) p.erase(it);
  }
}
}  // namespace

void QVector::axpy(const QVector& x, long long a, std::uint64_t qexp) {
  if (!a) return;
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (const auto& [e, c] : x.c_[i]) qpoly_add(c_[i], e + qexp, checked_mul(a, c));
}

QVector QVector::apply_monk(int k) const {
  QVector out(*ops_);
  const auto& rows = ops_->rows(k);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].empty()) continue;
    for (const auto& ent : rows[i])
      for (const auto& [e, c] : c_[i]) qpoly_add(out.c_[ent.target], e + ent.qexp, c);
  }
  return out;
}

QVector QVector::apply_x(int i) const {
  int n = ops_->n();
  if (i < 1 || i > n) throw std::invalid_argument("QVector::apply_x: index out of range");
  QVector out(*ops_);
  if (i <= n - 1) out = apply_monk(i);
  if (i >= 2) out.axpy(apply_monk(i - 1), -1, 0);
  return out;
}

QVector QVector::apply_quantum_elementary(int k, int i) const {
  if (i < 0 || i > k) return QVector(*ops_);
  if (i == 0) return *this;
  // V[a][b] = E_b^a(X) v, filled by E_b^a = E_b^{a-1} + X_a E_{b-1}^{a-1} + q_{a-1} E_{b-2}^{a-2}.
  std::vector<std::vector<std::optional<QVector>>> V(k + 1, std::vector<std::optional<QVector>>(i + 1));
  std::function<const QVector&(int, int)> get;
  QVector zero(*ops_);
  get = [&](int a, int b) -> const QVector& {
    if (b < 0 || b > a) return zero;
    if (b == 0) return *this;
    auto& slot = V[a][b];
    if (slot) return *slot;
    QVector r = get(a - 1, b);
    r.axpy(get(a - 1, b - 1).apply_x(a), 1, 0);
    if (a >= 2 && b >= 2) r.axpy(get(a - 2, b - 2), 1, std::uint64_t{1} << (8 * (a - 2)));
    slot = std::move(r);
    return *slot;
  };
  return get(k, i);
}

QHClass QVector::to_class() const {
  int nq = ops_->n() - 1;
  QHClass out{nq, {}};
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].empty()) continue;
    MPoly p(nq);
    for (const auto& [e, c] : c_[i]) {
      Exponent f(nq);
      for (int t = 0; t < nq; ++t) f[t] = static_cast<int>((e >> (8 * t)) & 0xff);
      p.add_term(f, Rational(static_cast<long>(c)));
    }
    out.add(ops_->perms()[i], p);
  }
  return out;
}

QHClass apply_polynomial(const MPoly& p, const Perm& v, int n) {
  const MonkOperators& ops = monk_operators(n);
  if (p.nvars() != xq_nvars(n)) throw std::invalid_argument("apply_polynomial: expected 2n-1 variables");
  std::map<Exponent, std::vector<std::pair<std::uint64_t, long long>>> by_x;
  for (const auto& [e, c] : p.terms()) {
    Exponent xe(e.begin(), e.begin() + n);
    by_x[xe].emplace_back(pack_q(e, n, n - 1), to_ll(c));
  }
  QVector acc(ops);
  QVector start = QVector::basis(ops, embed(v, n));
  for (const auto& [xe, qs] : by_x) {
    QVector cur = start;
    for (int i = 1; i <= n; ++i)
      for (int t = 0; t < xe[i - 1]; ++t) cur = cur.apply_x(i);
    for (const auto& [qe, c] : qs) acc.axpy(cur, c, qe);
  }
  return acc.to_class();
}

QHClass class_product(const Perm& u0, const Perm& v0, int n) {
  Perm u = embed(u0, n), v = embed(v0, n);
  if (length(u) > length(v)) std::swap(u, v);
  const MonkOperators& ops = monk_operators(n);
  auto alpha = e_expansion(u);
  std::vector<std::pair<EIndex, long long>> terms(alpha.begin(), alpha.end());
  QVector acc(ops);
  // Depth-first over the factors E^1, E^2, ... so shared prefixes are applied once.
  std::function<void(std::size_t, std::size_t, int, const QVector&)> rec = [&](std::size_t lo, std::size_t hi, int k,
                                                                              const QVector& cur) {
    if (k == n) {
      for (std::size_t t = lo; t < hi; ++t) acc.axpy(cur, terms[t].second, 0);
      return;
    }
    std::size_t t = lo;
    while (t < hi) {
      int ik = terms[t].first[k - 1];
      std::size_t e = t;
      while (e < hi && terms[e].first[k - 1] == ik) ++e;
      rec(t, e, k + 1, cur.apply_quantum_elementary(k, ik));
      t = e;
    }
  };
  rec(0, terms.size(), 1, QVector::basis(ops, v));
  return acc.to_class();
}

QHClass monk_multiply(int k, const Perm& w, int n) {
  const MonkOperators& ops = monk_operators(n);
  return QVector::basis(ops, embed(w, n)).apply_monk(k).to_class();
}

// ---------------------------------------------------------------- normal-form oracle

namespace {

MPoly complete_tail(int m, int k, int n) {
  // h_m(x_k..x_n)
  int nv = xq_nvars(n);
  if (m < 0) return MPoly(nv);
  MPoly p(nv);
  Exponent a(n - k + 1, 0);
  enumerate_bounded(0, n - k + 1, m, a, [m](int) { return m; }, [&](const Exponent& e) {
    Exponent f(nv, 0);
    for (int t = 0; t <= n - k; ++t) f[k - 1 + t] = e[t];
    p.add_term(f, 1);
  });
  return p;
}

MPoly classical_elementary_monomial(const EIndex& I, int n) {
  MPoly e = MPoly::constant(xq_nvars(n), 1);
  for (int k = 1; k < n; ++k)
    if (I[k - 1]) e = e * elementary(k, I[k - 1], n);
  return e;
}

struct ClassicalSlice {
  std::map<Exponent, int> row;  // standard monomials a_k <= k-1
  std::vector<EIndex> cols;
  RMatrix inverse;
};

const ClassicalSlice& classical_slice(int n, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<ClassicalSlice>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, degree});
    if (it != cache.end()) return *it->second;
  }
  auto s = std::make_unique<ClassicalSlice>();
  int nv = xq_nvars(n);
  Exponent a(n, 0);
  int N = 0;
  enumerate_bounded(0, n, degree, a, [](int pos) { return pos; }, [&](const Exponent& e) {
    Exponent f(nv, 0);
    std::copy(e.begin(), e.end(), f.begin());
    s->row[f] = N++;
  });
  s->cols = e_indices(n, degree);
  if (static_cast<int>(s->cols.size()) != N) throw std::logic_error("classical_slice: basis size mismatch");
  RMatrix m(N, N);
  for (int c = 0; c < N; ++c) {
    ClassicalReduction red = classical_reduce(classical_elementary_monomial(s->cols[c], n), n);
    for (const auto& [e, v] : red.remainder.terms()) m(s->row.at(e), c) = v;
  }
  s->inverse = m.inverse();
  std::lock_guard<std::mutex> lock(mu);
  return *cache.emplace(std::make_pair(n, degree), std::move(s)).first->second;
}

struct SchubertSlice {
  std::vector<Perm> perms;
  std::vector<EIndex> cols;
  RMatrix inverse;  // maps E-coefficients to Schubert coefficients
};

const SchubertSlice& schubert_slice(int n, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<SchubertSlice>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, degree});
    if (it != cache.end()) return *it->second;
  }
  auto s = std::make_unique<SchubertSlice>();
  for (const Perm& w : all_permutations(n))
    if (length(w) == degree) s->perms.push_back(w);
  s->cols = e_indices(n, degree);
  int N = static_cast<int>(s->cols.size());
  std::map<EIndex, int> col;
  for (int c = 0; c < N; ++c) col[s->cols[c]] = c;
  RMatrix A(N, N);  // A(I, w) = alpha^w_I
  for (int j = 0; j < N; ++j)
    for (const auto& [I, a] : e_expansion(s->perms[j])) A(col.at(I), j) = to_rational(a);
  s->inverse = A.inverse();
  std::lock_guard<std::mutex> lock(mu);
  return *cache.emplace(std::make_pair(n, degree), std::move(s)).first->second;
}

}  // namespace

ClassicalReduction classical_reduce(const MPoly& p, int n) {
  int nv = xq_nvars(n);
  if (p.nvars() != nv) throw std::invalid_argument("classical_reduce: expected 2n-1 variables");
  std::vector<MPoly> g(n + 1, MPoly(nv)), quot(n + 1, MPoly(nv));
  for (int k = 1; k <= n; ++k) g[k] = complete_tail(k, k, n);
  MPoly rem = p, out(nv);
  while (!rem.is_zero()) {
    const auto [e, c] = *rem.terms().rbegin();
    int k = 1;
    while (k <= n && e[k - 1] < k) ++k;
    MPoly t = MPoly::monomial(e, c);
    if (k > n) {
      out += t;
      rem -= t;
      continue;
    }
    Exponent f = e;
    f[k - 1] -= k;
    MPoly m = MPoly::monomial(f, c);
    quot[k] += m;
    rem -= m * g[k];
  }
  // h_k(x_k..x_n) = sum_{j=1}^k (-1)^{j+1} h_{k-j}(x_k..x_n) e_j^n
  ClassicalReduction r{out, std::vector<MPoly>(n, MPoly(nv))};
  for (int k = 1; k <= n; ++k) {
    if (quot[k].is_zero()) continue;
    for (int j = 1; j <= k; ++j) {
      MPoly t = quot[k] * complete_tail(k - j, k, n);
      if (j % 2) r.cofactors[j - 1] += t;
      else r.cofactors[j - 1] -= t;
    }
  }
  return r;
}

std::map<EIndex, MPoly> e_basis_normal_form(const MPoly& p, int n) {
  if (n > 5) throw std::invalid_argument("normal_form: oracle path supports n <= 5");
  int nv = xq_nvars(n);
  std::map<EIndex, MPoly> result;
  if (p.is_zero()) return result;
  MPoly p0(nv);
  for (const auto& [e, c] : p.terms()) {
    bool qfree = true;
    for (int t = n; t < nv; ++t) qfree &= e[t] == 0;
    if (qfree) p0.add_term(e, c);
  }
  ClassicalReduction red = classical_reduce(p0, n);
  std::map<int, std::map<int, Rational>> by_degree;
  for (const auto& [e, c] : red.remainder.terms()) {
    int d = 0;
    for (int t = 0; t < n; ++t) d += e[t];
    by_degree[d];
  }
  MPoly p1 = p, ideal_part = p0;
  for (const auto& [d, unused] : by_degree) {
    const ClassicalSlice& s = classical_slice(n, d);
    int N = static_cast<int>(s.cols.size());
    std::vector<Rational> rhs(N);
    for (const auto& [e, c] : red.remainder.terms()) {
      int deg = 0;
      for (int t = 0; t < n; ++t) deg += e[t];
      if (deg == d) rhs[s.row.at(e)] = c;
    }
    for (int i = 0; i < N; ++i) {
      Rational beta = 0;
      for (int j = 0; j < N; ++j)
        if (rhs[j] != 0) beta += s.inverse(i, j) * rhs[j];
      if (beta == 0) continue;
      result.try_emplace(s.cols[i], nv).first->second += MPoly::constant(nv, beta);
      p1 -= quantum_elementary_monomial(s.cols[i], n) * beta;
      ideal_part -= classical_elementary_monomial(s.cols[i], n) * beta;
    }
  }
  // p0 minus the chosen e_I combination lies in the classical ideal; lift its cofactors.
  ClassicalReduction lift = classical_reduce(ideal_part, n);
  if (!lift.remainder.is_zero()) throw std::logic_error("normal_form: classical slice solve failed");
  for (int j = 1; j <= n; ++j)
    if (!lift.cofactors[j - 1].is_zero()) p1 -= lift.cofactors[j - 1] * quantum_elementary(n, j, n);
  std::map<int, MPoly> split;
  for (const auto& [e, c] : p1.terms()) {
    int m = n;
    while (m < nv && e[m] == 0) ++m;
    if (m == nv) throw std::logic_error("normal_form: q-free residue after classical lift");
    Exponent f = e;
    --f[m];
    split.try_emplace(m, nv).first->second.add_term(f, c);
  }
  for (const auto& [m, r] : split) {
    Exponent qe(nv, 0);
    qe[m] = 1;
    MPoly qm = MPoly::monomial(qe, 1);
    for (const auto& [I, c] : e_basis_normal_form(r, n)) result.try_emplace(I, nv).first->second += c * qm;
  }
  for (auto it = result.begin(); it != result.end();)
    it = it->second.is_zero() ? result.erase(it) : std::next(it);
  return result;
}

QHClass normal_form(const MPoly& p, int n) {
  auto gamma = e_basis_normal_form(p, n);
  QHClass out{n - 1, {}};
  std::map<int, std::map<EIndex, const MPoly*>> by_degree;
  for (const auto& [I, c] : gamma) {
    int d = 0;
    for (int v : I) d += v;
    by_degree[d][I] = &c;
  }
  std::vector<int> qmap(xq_nvars(n), 0);
  for (int i = 0; i < n - 1; ++i) qmap[n + i] = i;
  for (const auto& [d, coeffs] : by_degree) {
    const SchubertSlice& s = schubert_slice(n, d);
    int N = static_cast<int>(s.cols.size());
    for (int w = 0; w < N; ++w) {
      MPoly c(xq_nvars(n));
      for (int i = 0; i < N; ++i) {
        auto it = coeffs.find(s.cols[i]);
        if (it == coeffs.end() || s.inverse(w, i) == 0) continue;
        c += *it->second * s.inverse(w, i);
      }
      if (c.is_zero()) continue;
      if (!c.integral()) throw std::logic_error("normal_form: non-integral Schubert coefficient");
      for (const auto& [e, v] : c.terms())
        for (int t = 0; t < n; ++t)
          if (e[t]) throw std::logic_error("normal_form: x survived in a coefficient");
      out.add(s.perms[w], c.remap(n - 1, qmap));
    }
  }
  return out;
}

}  // namespace flagmirror
