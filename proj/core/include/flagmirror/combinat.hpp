#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace flagmirror {

// One-line notation: w[i-1] = w(i), values in 1..n.
using Perm = std::vector<int>;

bool is_permutation(const Perm& w);
Perm identity_perm(int n);
Perm longest_element(int n);
Perm simple_reflection(int n, int i);
int length(const Perm& w);
Perm inverse(const Perm& w);
// (u*v)(i) = u(v(i))
Perm compose(const Perm& u, const Perm& v);
// w * t_{ab}: swaps the entries in positions a and b (1-based).
Perm swap_positions(Perm w, int a, int b);
// c_i = #{j > i : w(j) < w(i)}
std::vector<int> lehmer_code(const Perm& w);
// Inverse of lehmer_code; the result lives in S_m with m = max(size, needed).
Perm perm_from_code(const std::vector<int>& code);
// Pads with fixed points up to n (n >= w.size()).
Perm embed(const Perm& w, int n);
// Largest i with w(i) != i, 0 for the identity.
int support_size(const Perm& w);

std::string perm_to_string(const Perm& w);
Perm parse_perm(const std::string& s);

std::vector<Perm> all_permutations(int n);
std::size_t factorial(int n);
// Rank in lexicographic order of S_n, and its inverse.
std::size_t perm_rank(const Perm& w);
Perm perm_unrank(int n, std::size_t r);

bool is_321_avoiding(const Perm& w);

// sigma_K: first |K| values are K sorted, then the complement sorted.
Perm grassmannian_perm(std::vector<int> K, int n);

// Parabolic shape (n; n_1 < ... < n_r).
class FlagShape {
 public:
  FlagShape() = default;
  FlagShape(int n, std::vector<int> parts);

  static FlagShape parse(const std::string& s);  // "n_1,...,n_r;n"
  static FlagShape complete(int n);
  static FlagShape grassmannian(int k, int n);
  // Every shape with this n, ordered by (r, parts).
  static std::vector<FlagShape> all_shapes(int n);

  std::string str() const;
  int n() const { return n_; }
  int r() const { return static_cast<int>(parts_.size()); }
  const std::vector<int>& parts() const { return parts_; }
  // n_0 = 0, n_{r+1} = n.
  int step(int j) const;
  int block_size(int j) const { return step(j) - step(j - 1); }
  int qdeg(int j) const { return step(j + 1) - step(j - 1); }
  // j with n_j = i, or 0.
  int step_index(int i) const;
  int dimension() const;
  std::size_t euler_characteristic() const;

  bool in_WP(const Perm& w) const;
  Perm minimal_rep(const Perm& w) const;
  // Sorted by (length, lexicographic).
  std::vector<Perm> minimal_reps() const;

  bool operator==(const FlagShape& o) const { return n_ == o.n_ && parts_ == o.parts_; }
  bool operator!=(const FlagShape& o) const { return !(*this == o); }
  bool operator<(const FlagShape& o) const;

 private:
  int n_ = 0;
  std::vector<int> parts_;
};

// Skew shape lambda/mu and flag phi of a 321-avoiding permutation.
struct SkewShape {
  std::vector<int> flag;
  std::vector<int> lambda;
  std::vector<int> mu;
};
SkewShape skew_shape(const Perm& w);

// Elements of Xi for (shape, j, i) and the permutation w_J when defined.
struct XiEntry {
  std::vector<int> J;
  std::optional<Perm> w;
};
bool key_identity_legal(const FlagShape& shape, int j, int i);
std::vector<XiEntry> xi_family(const FlagShape& shape, int j, int i);

// Young view of a k-subset of [n]: lambda(J) = (j_k - k, ..., j_1 - 1).
std::vector<int> partition_of_subset(const std::vector<int>& J);
std::vector<int> subset_of_partition(const std::vector<int>& lambda);
std::vector<int> conjugate_partition(const std::vector<int>& lambda, int parts);

std::vector<std::vector<int>> subsets(const std::vector<int>& ground, int k);
std::vector<int> interval(int a, int b);  // [a, b], empty if a > b
std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b);
int element_sum(const std::vector<int>& s);

}  // namespace flagmirror
