#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "flagmirror/crit.hpp"
#include "flagmirror/qhpartial.hpp"

using namespace flagmirror;

namespace {

using cd = std::complex<double>;

std::vector<cd> values_with_multiplicity(const std::vector<CritPoint>& points) {
  std::vector<cd> v;
  for (const CritPoint& p : points) v.insert(v.end(), p.multiplicity, p.value);
  return v;
}

// Greedy nearest matching; adequate when the multisets agree to far below their separation.
double multiset_distance(std::vector<cd> a, std::vector<cd> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (const cd& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cd u, cd v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

// Values at q = (1, 1), frozen after the first computation. Two are -5/phi and 5 phi.
const std::vector<cd> kFl124Values = {
    {-6.04005025093809, -4.44264526454436}, {-6.04005025093809, 4.44264526454436},
    {-3.09016994374947, 0},                 {-3, 0},
    {-1.05094590625197, 0},                 {1.52547295312598, -5.73404842843630},
    {1.52547295312598, 5.73404842843630},   {1.94230463536105, -0.986485481428555},
    {1.94230463536105, 0.986485481428555},  {2.09774561557703, -3.45615978311581},
    {2.09774561557703, 3.45615978311581},   {8.09016994374947, 0},
};

}  // namespace

TEST_CASE("projective line by hand") {
  // One coordinate x; the critical points are x = +-1 with values +-2.
  FlagShape shape = FlagShape::parse("1;2");
  CritStats stats;
  auto points = find_critical_points(shape, {1.0}, {}, &stats);
  REQUIRE(points.size() == 2);
  CHECK(std::abs(points[0].value - cd(-2)) < 1e-12);
  CHECK(std::abs(points[1].value - cd(2)) < 1e-12);
  CHECK(stats.warnings.empty());
  for (const CritPoint& p : points) {
    CHECK(std::abs(std::abs(p.z(0)) - 1) < 1e-12);
    CMatrix m = toeplitz_torus(shape, {1.0}).asDiagonal() * uv_from_z(ZChart(shape).matrix(p.z), shape).lower;
    CHECK(std::abs(m(0, 1)) < 1e-14);
    CHECK(std::abs(m(0, 0) - m(1, 1)) < 1e-12);
  }
  // At q the values scale by sqrt(q).
  auto scaled = find_critical_points(shape, {cd(0, 4)});
  CHECK(multiset_distance(values_with_multiplicity(scaled), {2.0 * std::sqrt(cd(0, 4)), -2.0 * std::sqrt(cd(0, 4))}) <
        1e-12);
}

TEST_CASE("Grassmannian of planes in 4-space") {
  auto points = find_critical_points(FlagShape::parse("2;4"), {1.0});
  REQUIRE(points.size() == 6);
  double r = 4 * std::sqrt(2.0);
  CHECK(multiset_distance(values_with_multiplicity(points), {r, -r, cd(0, r), cd(0, -r), 0, 0}) < 1e-8);
  // The two zero-value points are distinct.
  CHECK((points[2].z - points[3].z).norm() > 1e-3);
}

TEST_CASE("flags of type (1,2;4) at q = (1,1)") {
  FlagShape shape = FlagShape::parse("1,2;4");
  CritStats stats;
  auto points = find_critical_points(shape, {1.0, 1.0}, {}, &stats);
  REQUIRE(points.size() == 12);
  CHECK(stats.warnings.empty());
  CHECK(std::count_if(points.begin(), points.end(), [](const CritPoint& p) { return std::abs(p.value + 3.0) < 1e-8; }) ==
        1);
  CHECK(multiset_distance(values_with_multiplicity(points), kFl124Values) < 1e-10);
  CHECK(multiset_distance(values_with_multiplicity(points), c1_spectrum(shape, {1.0, 1.0})) < 1e-8);
  for (const CritPoint& p : points) {
    CHECK(p.multiplicity == 1);
    CHECK(p.toeplitz_residual < 1e-7);
    CHECK(p.gradient_norm < 1e-11);
    CHECK(p.fd_gradient_norm < 1e-11);
    CHECK(p.hits > 0);
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    cd a = points[i - 1].value, b = points[i].value;
    CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
  }
}

TEST_CASE("a degenerate critical point carries its multiplicity") {
  // At q_1 = q_2 the value 0 is a triple eigenvalue and comes from a single degenerate point.
  FlagShape shape = FlagShape::parse("1,3;4");
  for (cd q : {cd(1), cd(0.9, 0.2)}) {
    CritStats stats;
    auto points = find_critical_points(shape, {q, q}, {}, &stats);
    CHECK(total_multiplicity(points) == 12);
    CHECK(stats.degenerate == 1);
    auto zero = std::find_if(points.begin(), points.end(), [](const CritPoint& p) { return p.multiplicity > 1; });
    REQUIRE(zero != points.end());
    CHECK(zero->multiplicity == 3);
    CHECK(std::abs(zero->value) < 1e-10);
    CHECK(zero->hessian_ratio < 1e-7);
    CHECK(multiset_distance(values_with_multiplicity(points), c1_spectrum(shape, {q, q})) < 1e-8);
  }
  // Off the diagonal q_1 = q_2 all twelve points are nondegenerate.
  auto generic = find_critical_points(shape, {cd(1.1, 0.1), cd(0.8, -0.2)});
  CHECK(generic.size() == 12);
  CHECK(total_multiplicity(generic) == 12);
}

TEST_CASE("determinism and seed independence") {
  FlagShape shape = FlagShape::parse("2;4");
  std::vector<cd> q = {cd(1.2, -0.1)};
  CritConfig cfg;
  cfg.starts = 600;
  cfg.threads = 1;
  auto a = find_critical_points(shape, q, cfg);
  cfg.threads = 4;
  auto b = find_critical_points(shape, q, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].z == b[i].z);
  }
  cfg.starts = 1200;
  cfg.seed = 99;
  auto c = find_critical_points(shape, q, cfg);
  CHECK(multiset_distance(values_with_multiplicity(a), values_with_multiplicity(c)) < 1e-7);
}

TEST_CASE("Toeplitz residual separates critical from generic points") {
  FlagShape shape = FlagShape::parse("1,2;4");
  ZChart chart(shape);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  int large = 0;
  for (int s = 0; s < 20; ++s) {
    CVector x(chart.dim());
    for (int a = 0; a < x.size(); ++a) x(a) = cd(u(rng), u(rng));
    large += toeplitz_residual(chart.matrix(x), shape, {1.0, 1.0}) > 1e-2;
  }
  CHECK(large >= 18);

  CVector t = toeplitz_torus(FlagShape::parse("2,3;5"), {cd(2), cd(3)});
  std::vector<cd> expected = {6, 6, 3, 1, 1};
  for (int i = 0; i < 5; ++i) CHECK(t(i) == expected[i]);
}

TEST_CASE("torus charts agree with the plain chart") {
  for (const char* name : {"1,2;4", "1,3;4", "2;5"}) {
    FlagShape shape = FlagShape::parse(name);
    FMinusFunction chart(shape);
    Perm w = longest_coset_rep(shape);
    std::vector<int> word = random_reduced_word(w, 3);
    CHECK(static_cast<int>(word.size()) == chart.dim());
    FMinusFunction torus(shape, torus_chart(shape, word));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> mod(0.5, 1.5), ph(0, 2 * M_PI);
    std::vector<cd> q = {cd(0.7, 0.4), cd(1.3, -0.2)};
    q.resize(shape.r());
    for (int s = 0; s < 5; ++s) {
      CVector t(torus.dim());
      for (int a = 0; a < t.size(); ++a) t(a) = std::polar(mod(rng), ph(rng));
      CVector x = torus.to_chart(t);
      CHECK(std::abs(torus.value(t, q) - chart.value(x, q)) < 1e-10 * (1 + std::abs(chart.value(x, q))));
      // Full-rank Jacobian of t -> x, by central differences.
      CMatrix J(x.size(), t.size());
      for (int b = 0; b < t.size(); ++b) {
        CVector tp = t, tm = t;
        tp(b) += 1e-6;
        tm(b) -= 1e-6;
        J.col(b) = (torus.to_chart(tp) - torus.to_chart(tm)) / 2e-6;
      }
      CHECK(Eigen::FullPivLU<CMatrix>(J).rank() == chart.dim());
    }
  }
}

TEST_CASE("configuration and input validation") {
  FlagShape shape = FlagShape::parse("1;3");
  CritConfig bad;
  bad.newton_tol = 0;
  CHECK_THROWS_AS(find_critical_points(shape, {1.0}, bad), std::invalid_argument);
  bad = {};
  bad.degenerate_merge_radius = 1e-9;
  CHECK_THROWS_AS(find_critical_points(shape, {1.0}, bad), std::invalid_argument);
  CHECK_THROWS_AS(find_critical_points(shape, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(find_critical_points(shape, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("JSON report") {
  FlagShape shape = FlagShape::parse("1;3");
  CritStats stats;
  auto points = find_critical_points(shape, {1.0}, {}, &stats);
  auto j = crit_report(shape, {1.0}, points, stats);
  CHECK(j["shape"] == shape.str());
  CHECK(j["count"] == 3);
  CHECK(j["expected_dim"] == 3);
  CHECK(j["points"].size() == 3);
  CHECK(j["points"][0].contains("toeplitz_residual"));
  CHECK(j["points"][0]["z"].size() == 2);
  CHECK(j["warnings"].empty());
  // Values are 3 times the cube roots of unity.
  for (const CritPoint& p : points) CHECK(std::abs(std::abs(p.value) - 3) < 1e-12);
}
