#include "doctest.h"

#include <algorithm>
#include <set>

#include "flagmirror/combinat.hpp"

using namespace flagmirror;

namespace {

// Pattern search over all triples; shares nothing with is_321_avoiding.
bool has_321_pattern(const Perm& w) {
  int n = static_cast<int>(w.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (w[i] > w[j] && w[j] > w[k]) return true;
  return false;
}

}  // namespace

TEST_CASE("permutation basics") {
  CHECK(length(parse_perm("321")) == 3);
  CHECK(length(identity_perm(5)) == 0);
  CHECK(lehmer_code(parse_perm("1526347")) == std::vector<int>{0, 3, 0, 2, 0, 0, 0});
  CHECK(lehmer_code(parse_perm("3516247")) == std::vector<int>{2, 3, 0, 2, 0, 0, 0});
  CHECK(perm_to_string(parse_perm("2516347")) == "2516347");
  CHECK(perm_to_string(identity_perm(10)) == "1,2,3,4,5,6,7,8,9,10");
  CHECK(parse_perm("1,2,3,4,5,6,7,8,10,9").size() == 10);
  CHECK_THROWS_AS(parse_perm("1224"), std::invalid_argument);
  CHECK(grassmannian_perm({2, 3}, 7) == parse_perm("2314567"));
  CHECK(grassmannian_perm({1, 3}, 7) == parse_perm("1324567"));
  CHECK(compose(parse_perm("231"), inverse(parse_perm("231"))) == identity_perm(3));
  CHECK(swap_positions(parse_perm("123"), 1, 3) == parse_perm("321"));
}

TEST_CASE("code, rank and unrank round trips") {
  for (int n = 1; n <= 6; ++n) {
    auto all = all_permutations(n);
    REQUIRE(all.size() == factorial(n));
    for (std::size_t r = 0; r < all.size(); ++r) {
      const Perm& w = all[r];
      CHECK(perm_rank(w) == r);
      CHECK(perm_unrank(n, r) == w);
      auto c = lehmer_code(w);
      int s = 0;
      for (int v : c) s += v;
      CHECK(s == length(w));
      CHECK(embed(perm_from_code(c), n) == w);
    }
  }
}

TEST_CASE("flag shapes") {
  FlagShape s = FlagShape::parse("2,4;7");
  CHECK(s.n() == 7);
  CHECK(s.r() == 2);
  CHECK(s.str() == "2,4;7");
  CHECK(s.step(0) == 0);
  CHECK(s.step(3) == 7);
  CHECK(s.qdeg(1) == 4);
  CHECK(s.qdeg(2) == 5);
  CHECK(s.dimension() == 2 * 2 + 2 * 3 + 2 * 3);
  CHECK(s.euler_characteristic() == 210);
  CHECK_THROWS_AS(FlagShape::parse("4,2;7"), std::invalid_argument);
  CHECK_THROWS_AS(FlagShape::parse("2,7;7"), std::invalid_argument);
  CHECK_THROWS_AS(FlagShape::parse("2,4"), std::invalid_argument);

  auto reps = FlagShape::parse("1;2").minimal_reps();
  CHECK(reps == std::vector<Perm>{parse_perm("12"), parse_perm("21")});

  for (int n = 2; n <= 6; ++n)
    for (const FlagShape& sh : FlagShape::all_shapes(n)) {
      auto r = sh.minimal_reps();
      CHECK(r.size() == sh.euler_characteristic());
      CHECK(length(r.back()) == sh.dimension());
      for (std::size_t t = 1; t < r.size(); ++t) CHECK(length(r[t - 1]) <= length(r[t]));
      for (const Perm& w : all_permutations(n)) {
        Perm m = sh.minimal_rep(w);
        CHECK(sh.in_WP(m));
        CHECK(length(m) <= length(w));
      }
    }
  CHECK(FlagShape::all_shapes(4).size() == 7);
}

TEST_CASE("321-avoiding permutations and skew shapes") {
  std::vector<std::size_t> counts;
  for (int n = 1; n <= 6; ++n) {
    std::size_t c = 0, oracle = 0;
    for (const Perm& w : all_permutations(n)) {
      c += is_321_avoiding(w);
      oracle += !has_321_pattern(w);
    }
    CHECK(c == oracle);
    counts.push_back(oracle);
  }
  // Frozen from the brute-force oracle above.
  CHECK(counts == std::vector<std::size_t>{1, 2, 5, 14, 42, 132});

  SkewShape a = skew_shape(parse_perm("1526347"));
  CHECK(a.flag == std::vector<int>{2, 4});
  CHECK(a.lambda == std::vector<int>{3, 2});
  CHECK(a.mu == std::vector<int>{0, 0});
  SkewShape b = skew_shape(parse_perm("2516347"));
  CHECK(b.flag == std::vector<int>{1, 2, 4});
  CHECK(b.lambda == std::vector<int>{3, 3, 2});
  CHECK(b.mu == std::vector<int>{2, 0, 0});
  SkewShape c = skew_shape(parse_perm("3516247"));
  CHECK(c.lambda == std::vector<int>{3, 3, 2});
  CHECK(c.mu == std::vector<int>{1, 0, 0});
  SkewShape d = skew_shape(parse_perm("132"));
  CHECK(d.flag == std::vector<int>{2});
  CHECK(d.lambda == std::vector<int>{1});
  CHECK_THROWS_AS(skew_shape(parse_perm("321")), std::invalid_argument);

  // Box count equals length for every 321-avoiding permutation.
  for (int n = 2; n <= 6; ++n)
    for (const Perm& w : all_permutations(n)) {
      if (!is_321_avoiding(w)) continue;
      SkewShape s = skew_shape(w);
      int boxes = 0;
      for (std::size_t k = 0; k < s.lambda.size(); ++k) {
        boxes += s.lambda[k] - s.mu[k];
        if (k > 0) {
          CHECK(s.lambda[k] <= s.lambda[k - 1]);
          CHECK(s.mu[k] <= s.mu[k - 1]);
        }
      }
      CHECK(boxes == length(w));
    }
}

TEST_CASE("Xi family and w_J") {
  FlagShape s = FlagShape::parse("2,4;7");
  auto xi = xi_family(s, 1, 4);
  REQUIRE(xi.size() == 3);
  CHECK(xi[0].J == std::vector<int>{1});
  CHECK(xi[0].w == parse_perm("1526347"));
  CHECK(xi[1].w == parse_perm("2516347"));
  CHECK(xi[2].w == parse_perm("3516247"));
  CHECK_THROWS_AS(xi_family(s, 1, 2), std::invalid_argument);

  int cases = 0;
  for (int n = 3; n <= 8; ++n)
    for (const FlagShape& sh : FlagShape::all_shapes(n))
      for (int j = 1; j < sh.r(); ++j)
        for (int i = 1; i < n; ++i) {
          if (!key_identity_legal(sh, j, i)) continue;
          ++cases;
          for (const auto& e : xi_family(sh, j, i)) {
            if (!e.w) continue;
            CHECK(sh.in_WP(*e.w));
            CHECK(is_321_avoiding(*e.w));
          }
        }
  CHECK(cases > 0);
}

TEST_CASE("partitions of subsets") {
  CHECK(partition_of_subset({1, 4, 6}) == std::vector<int>{3, 2, 0});
  CHECK(partition_of_subset({1, 2, 3}) == std::vector<int>{0, 0, 0});
  CHECK(partition_of_subset({4, 6}) == std::vector<int>{4, 3});
  CHECK(subset_of_partition({3, 3, 2, 0}) == std::vector<int>{1, 4, 6, 7});
  for (const auto& J : subsets(interval(1, 7), 3)) CHECK(subset_of_partition(partition_of_subset(J)) == J);
  CHECK(conjugate_partition({3, 1}, 3) == std::vector<int>{2, 1, 1});
  CHECK(subsets(interval(1, 5), 2).size() == 10);
}
