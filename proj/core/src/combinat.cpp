#include "flagmirror/combinat.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace flagmirror {

bool is_permutation(const Perm& w) {
  std::vector<bool> seen(w.size() + 1, false);
  for (int v : w) {
    if (v < 1 || v > static_cast<int>(w.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Perm identity_perm(int n) {
  Perm w(n);
  std::iota(w.begin(), w.end(), 1);
  return w;
}

Perm longest_element(int n) {
  Perm w(n);
  for (int i = 0; i < n; ++i) w[i] = n - i;
  return w;
}

Perm simple_reflection(int n, int i) {
  if (i < 1 || i >= n) throw std::invalid_argument("simple_reflection: index out of range");
  Perm w = identity_perm(n);
  std::swap(w[i - 1], w[i]);
  return w;
}

int length(const Perm& w) {
  int l = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      if (w[i] > w[j]) ++l;
  return l;
}

Perm inverse(const Perm& w) {
  Perm u(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) u[w[i] - 1] = static_cast<int>(i) + 1;
  return u;
}

Perm compose(const Perm& u, const Perm& v) {
  if (u.size() != v.size()) throw std::invalid_argument("compose: size mismatch");
  Perm w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = u[v[i] - 1];
  return w;
}

Perm swap_positions(Perm w, int a, int b) {
  std::swap(w[a - 1], w[b - 1]);
  return w;
}

std::vector<int> lehmer_code(const Perm& w) {
  std::vector<int> c(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      if (w[j] < w[i]) ++c[i];
  return c;
}

Perm perm_from_code(const std::vector<int>& code) {
  int m = static_cast<int>(code.size());
  for (int i = 0; i < static_cast<int>(code.size()); ++i) m = std::max(m, i + code[i] + 1);
  std::vector<int> avail = identity_perm(m);
  Perm w;
  for (int i = 0; i < m; ++i) {
    int c = i < static_cast<int>(code.size()) ? code[i] : 0;
    if (c >= static_cast<int>(avail.size())) throw std::invalid_argument("perm_from_code: invalid code");
    w.push_back(avail[c]);
    avail.erase(avail.begin() + c);
  }
  return w;
}

Perm embed(const Perm& w, int n) {
  if (n < static_cast<int>(w.size())) throw std::invalid_argument("embed: target smaller than permutation");
  Perm u = w;
  for (int v = static_cast<int>(w.size()) + 1; v <= n; ++v) u.push_back(v);
  return u;
}

int support_size(const Perm& w) {
  for (int i = static_cast<int>(w.size()); i >= 1; --i)
    if (w[i - 1] != i) return i;
  return 0;
}

std::string perm_to_string(const Perm& w) {
  std::ostringstream os;
  bool digits = w.size() <= 9;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!digits && i > 0) os << ',';
    os << w[i];
  }
  return os.str();
}

Perm parse_perm(const std::string& s) {
  Perm w;
  if (s.find(',') != std::string::npos) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        w.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw std::invalid_argument("parse_perm: bad entry '" + tok + "'");
      }
    }
  } else {
    for (char ch : s) {
      if (ch < '1' || ch > '9') throw std::invalid_argument("parse_perm: bad digit in '" + s + "'");
      w.push_back(ch - '0');
    }
  }
  if (w.empty() || !is_permutation(w)) throw std::invalid_argument("parse_perm: not a permutation: '" + s + "'");
  return w;
}

std::vector<Perm> all_permutations(int n) {
  std::vector<Perm> out;
  Perm w = identity_perm(n);
  do out.push_back(w);
  while (std::next_permutation(w.begin(), w.end()));
  return out;
}

std::size_t factorial(int n) {
  std::size_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

std::size_t perm_rank(const Perm& w) {
  std::vector<int> c = lehmer_code(w);
  std::size_t r = 0;
  int n = static_cast<int>(w.size());
  for (int i = 0; i < n; ++i) r = r * static_cast<std::size_t>(n - i) + static_cast<std::size_t>(c[i]);
  return r;
}

Perm perm_unrank(int n, std::size_t r) {
  std::vector<int> c(n, 0);
  for (int i = n - 1; i >= 0; --i) {
    std::size_t base = static_cast<std::size_t>(n - i);
    c[i] = static_cast<int>(r % base);
    r /= base;
  }
  return perm_from_code(c);
}

bool is_321_avoiding(const Perm& w) {
  // No i<j<k with w(i)>w(j)>w(k): for each j, not (larger before and smaller after).
  int n = static_cast<int>(w.size());
  for (int j = 0; j < n; ++j) {
    bool larger_before = false, smaller_after = false;
    for (int i = 0; i < j; ++i) larger_before |= w[i] > w[j];
    for (int k = j + 1; k < n; ++k) smaller_after |= w[k] < w[j];
    if (larger_before && smaller_after) return false;
  }
  return true;
}

Perm grassmannian_perm(std::vector<int> K, int n) {
  std::sort(K.begin(), K.end());
  if (std::adjacent_find(K.begin(), K.end()) != K.end() || (!K.empty() && (K.front() < 1 || K.back() > n)))
    throw std::invalid_argument("grassmannian_perm: invalid subset");
  Perm w = K;
  for (int v : set_minus(interval(1, n), K)) w.push_back(v);
  return w;
}

// ---------------------------------------------------------------- FlagShape

FlagShape::FlagShape(int n, std::vector<int> parts) : n_(n), parts_(std::move(parts)) {
  if (n_ < 2) throw std::invalid_argument("FlagShape: n must be at least 2");
  if (parts_.empty()) throw std::invalid_argument("FlagShape: need at least one step");
  int prev = 0;
  for (int p : parts_) {
    if (p <= prev || p >= n_) throw std::invalid_argument("FlagShape: steps must satisfy 0 < n_1 < ... < n_r < n");
    prev = p;
  }
}

FlagShape FlagShape::parse(const std::string& s) {
  auto semi = s.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("FlagShape: expected 'n_1,...,n_r;n', got '" + s + "'");
  std::vector<int> parts;
  int n = 0;
  try {
    std::stringstream ss(s.substr(0, semi));
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(std::stoi(tok));
    n = std::stoi(s.substr(semi + 1));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("FlagShape: malformed shape '" + s + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("FlagShape: malformed shape '" + s + "'");
  }
  return FlagShape(n, parts);
}

FlagShape FlagShape::complete(int n) { return FlagShape(n, interval(1, n - 1)); }

FlagShape FlagShape::grassmannian(int k, int n) { return FlagShape(n, {k}); }

std::vector<FlagShape> FlagShape::all_shapes(int n) {
  std::vector<FlagShape> out;
  for (int r = 1; r <= n - 1; ++r)
    for (const auto& s : subsets(interval(1, n - 1), r)) out.emplace_back(n, s);
  return out;
}

std::string FlagShape::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
  os << ';' << n_;
  return os.str();
}

int FlagShape::step(int j) const {
  if (j <= 0) return 0;
  if (j > r()) return n_;
  return parts_[j - 1];
}

int FlagShape::step_index(int i) const {
  for (int j = 1; j <= r(); ++j)
    if (parts_[j - 1] == i) return j;
  return 0;
}

int FlagShape::dimension() const {
  int d = 0;
  for (int j = 1; j <= r() + 1; ++j)
    for (int k = j + 1; k <= r() + 1; ++k) d += block_size(j) * block_size(k);
  return d;
}

std::size_t FlagShape::euler_characteristic() const {
  std::size_t e = factorial(n_);
  for (int j = 1; j <= r() + 1; ++j) e /= factorial(block_size(j));
  return e;
}

bool FlagShape::in_WP(const Perm& w) const {
  if (static_cast<int>(w.size()) != n_) return false;
  for (int i = 1; i < n_; ++i)
    if (!step_index(i) && w[i - 1] > w[i]) return false;
  return true;
}

Perm FlagShape::minimal_rep(const Perm& w) const {
  Perm u = w;
  for (int j = 1; j <= r() + 1; ++j) std::sort(u.begin() + step(j - 1), u.begin() + step(j));
  return u;
}

std::vector<Perm> FlagShape::minimal_reps() const {
  std::vector<Perm> out;
  for (const Perm& w : all_permutations(n_))
    if (in_WP(w)) out.push_back(w);
  std::stable_sort(out.begin(), out.end(), [](const Perm& a, const Perm& b) { return length(a) < length(b); });
  return out;
}

bool FlagShape::operator<(const FlagShape& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  if (parts_.size() != o.parts_.size()) return parts_.size() < o.parts_.size();
  return parts_ < o.parts_;
}

// ---------------------------------------------------------------- skew shapes

SkewShape skew_shape(const Perm& w) {
  if (!is_321_avoiding(w)) throw std::invalid_argument("skew_shape: permutation is not 321-avoiding");
  std::vector<int> c = lehmer_code(w);
  SkewShape s;
  std::vector<int> lo, hi;
  for (int j = 1; j <= static_cast<int>(c.size()); ++j) {
    if (c[j - 1] == 0) continue;
    int k = static_cast<int>(s.flag.size()) + 1;
    s.flag.push_back(j);
    lo.push_back(k - j - c[j - 1] + 1);
    hi.push_back(k - j);
  }
  if (s.flag.empty()) return s;
  int base = *std::min_element(lo.begin(), lo.end()) - 1;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    s.lambda.push_back(hi[k] - base);
    s.mu.push_back(lo[k] - 1 - base);
  }
  return s;
}

// ---------------------------------------------------------------- Xi and w_J

bool key_identity_legal(const FlagShape& shape, int j, int i) {
  int n = shape.n();
  return j >= 1 && j <= shape.r() - 1 && n - shape.step(j + 1) < i && i < n - shape.step(j);
}

std::vector<XiEntry> xi_family(const FlagShape& shape, int j, int i) {
  if (!key_identity_legal(shape, j, i))
    throw std::invalid_argument("xi_family: need 1 <= j <= r-1 and n - n_{j+1} < i < n - n_j");
  const int n = shape.n();
  const int nj = shape.step(j), nj1 = shape.step(j + 1), nj2 = shape.step(j + 2);
  const int d = i - (n - nj1);
  std::vector<XiEntry> out;
  for (const auto& J : subsets(interval(1, std::min(i, nj + d)), d)) {
    XiEntry e;
    e.J = J;
    std::vector<int> x = set_minus(interval(1, i), J);
    std::vector<int> b1, b2, b3, b4;
    if (nj >= d) {
      b1 = set_union(J, interval(i + 1, i + nj - d));
      b2 = set_union({x[0]}, interval(i + nj - d + 1, n - 1));
    } else {
      if (!(x[0] < J[nj])) {
        out.push_back(e);
        continue;
      }
      b1.assign(J.begin(), J.begin() + nj);
      b2 = set_union({x[0]}, set_union(std::vector<int>(J.begin() + nj, J.end()), interval(i + 1, n - 1)));
    }
    int m3 = nj2 - nj1;
    b3.assign(x.begin() + 1, x.begin() + m3);
    b3.push_back(n);
    b4.assign(x.begin() + m3, x.end());
    Perm w;
    for (auto* b : {&b1, &b2, &b3, &b4}) w.insert(w.end(), b->begin(), b->end());
    if (!is_permutation(w) || static_cast<int>(w.size()) != n)
      throw std::logic_error("xi_family: construction did not produce a permutation");
    e.w = w;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- partitions and sets

std::vector<int> partition_of_subset(const std::vector<int>& J) {
  std::vector<int> lam;
  for (int k = static_cast<int>(J.size()); k >= 1; --k) lam.push_back(J[k - 1] - k);
  return lam;
}

std::vector<int> subset_of_partition(const std::vector<int>& lambda) {
  int k = static_cast<int>(lambda.size());
  std::vector<int> J(k);
  for (int t = 1; t <= k; ++t) J[t - 1] = lambda[k - t] + t;
  return J;
}

std::vector<int> conjugate_partition(const std::vector<int>& lambda, int parts) {
  std::vector<int> c(parts, 0);
  for (int v : lambda)
    for (int t = 0; t < v && t < parts; ++t) ++c[t];
  return c;
}

std::vector<std::vector<int>> subsets(const std::vector<int>& ground, int k) {
  std::vector<std::vector<int>> out;
  int m = static_cast<int>(ground.size());
  if (k < 0 || k > m) return out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<int> s(k);
    for (int t = 0; t < k; ++t) s[t] = ground[idx[t]];
    out.push_back(s);
    int t = k - 1;
    while (t >= 0 && idx[t] == m - k + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
  }
  return out;
}

std::vector<int> interval(int a, int b) {
  std::vector<int> v;
  for (int t = a; t <= b; ++t) v.push_back(t);
  return v;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int v : a)
    if (std::find(b.begin(), b.end(), v) == b.end()) out.push_back(v);
  return out;
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  for (int v : b)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

int element_sum(const std::vector<int>& s) { return std::accumulate(s.begin(), s.end(), 0); }

}  // namespace flagmirror
