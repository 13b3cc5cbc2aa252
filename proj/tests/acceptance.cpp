// Acceptance criteria, one PASS/FAIL line each. Tolerances and runtime budgets are fixed here.
// Exit status counts failures outside kKnownDeviations; --strict counts every failure.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "flagmirror/crit.hpp"
#include "flagmirror/exactalg.hpp"
#include "flagmirror/mirror.hpp"
#include "flagmirror/qhpartial.hpp"
#include "flagmirror/schubring.hpp"
#include "flagmirror/verify.hpp"
#include "reference_data.hpp"

using namespace flagmirror;

namespace {

using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Outcome&)> body;
};

// Failures documented in the decisions ledger; they still print FAIL.
const std::set<int> kKnownDeviations = {1};

// ---------------------------------------------------------------- 1
void superpotential_fidelity(Outcome& o) {
  FlagShape f247 = FlagShape::parse("2,4;7");
  bool f247_ok = reference::canonical(superpotential(f247), f247) == reference::canonical(reference::parse(reference::kF247));
  o.require(f247_ok, "(2,4;7) term-for-term");
  int complete_ok = 0, complete_total = 0, gr_ok = 0, gr_total = 0;
  std::string first_gr_mismatch;
  for (int n = 2; n <= 7; ++n) {
    FlagShape c = FlagShape::complete(n);
    ++complete_total;
    complete_ok += reference::canonical(superpotential(c), c) == reference::complete_flag(n);
    for (int k = 1; k < n; ++k) {
      FlagShape g = FlagShape::grassmannian(k, n);
      ++gr_total;
      bool ok = reference::canonical(superpotential(g), g) == reference::grassmannian(k, n);
      gr_ok += ok;
      if (!ok && first_gr_mismatch.empty()) first_gr_mismatch = g.str();
    }
  }
  o.require(complete_ok == complete_total, "complete flags");
  o.require(gr_ok == gr_total, "Grassmannians, first mismatch " + first_gr_mismatch + " (quantum term)");
  o.detail << "(2,4;7) " << (f247_ok ? "exact" : "differs") << "; complete flags " << complete_ok << "/"
           << complete_total << "; Grassmannians " << gr_ok << "/" << gr_total;
}

// ---------------------------------------------------------------- 2
void divisor_bijection(Outcome& o) {
  int shapes = 0, good = 0;
  for (int n = 2; n <= 8; ++n)
    for (const FlagShape& shape : FlagShape::all_shapes(n)) {
      ++shapes;
      auto divisors = divisor_equations(shape);
      auto terms = superpotential(shape);
      std::set<int> hit;
      bool ok = terms.size() == divisors.size() && static_cast<int>(terms.size()) == n - 1 + shape.r();
      for (const SuperpotentialTerm& t : terms) {
        int found = 0;
        for (std::size_t k = 0; k < divisors.size(); ++k)
          if (t.denominator == divisors[k] || t.denominator == -divisors[k]) found = static_cast<int>(k) + 1;
        ok = ok && found > 0 && hit.insert(found).second;
      }
      good += ok;
      if (!ok) o.require(false, shape.str());
    }
  o.detail << good << "/" << shapes << " shapes with n <= 8 biject onto [n-1+r]";
}

// ---------------------------------------------------------------- 3
void factorization_oracle(Outcome& o) {
  constexpr double kRouteTol = 1e-9, kMinorTol = 1e-10;
  constexpr int kSamples = 100;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> mod(0.3, 1.7), ph(0, 2 * M_PI);
  double worst_route = 0, worst_minor = 0;
  int shapes = 0, samples = 0, resampled = 0;
  for (int n = 2; n <= 7; ++n)
    for (const FlagShape& sh : FlagShape::all_shapes(n)) {
      ++shapes;
      ZChart chart(sh);
      auto terms = superpotential(sh);
      std::vector<cd> q(sh.r(), cd(0.7, 0.4));
      for (int s = 0; s < kSamples;) {
        CVector x(chart.dim());
        for (int a = 0; a < x.size(); ++a) x(a) = std::polar(mod(rng), ph(rng));
        CMatrix z = chart.matrix(x);
        UVFactors f;
        cd a, b;
        try {
          f = uv_from_z(z, sh);
          a = f_minus_uv(z, q, sh);
          b = f_minus_pluecker(z, q, terms);
        } catch (const std::runtime_error&) {
          ++resampled;
          continue;
        }
        worst_route = std::max(worst_route, std::abs(a - b) / (1 + std::abs(a)));
        for (int i = 1; i < n; ++i) {
          cd ratio = minor(z, interval(1, i), set_union(interval(1, i - 1), {i + 1})) / minor(z, interval(1, i), interval(1, i));
          worst_minor = std::max(worst_minor, std::abs(f.u(i - 1, i) - ratio) / (1 + std::abs(ratio)));
        }
        for (int j = 1; j <= sh.r(); ++j) {
          int nj = sh.step(j);
          cd direct = (nj % 2 ? 1.0 : -1.0) * z(nj - 1, n - sh.step(j + 1));
          worst_minor = std::max(worst_minor, std::abs(f.v(nj - 1, nj) - direct) / (1 + std::abs(direct)));
        }
        ++s;
        ++samples;
      }
    }
  o.require(worst_route < kRouteTol, "uv route vs Pluecker route");
  o.require(worst_minor < kMinorTol, "minor formulas");
  o.detail << shapes << " shapes, " << samples << " samples (" << resampled << " near-pole resamples); route "
           << worst_route << " < " << kRouteTol << "; minors " << worst_minor << " < " << kMinorTol;
}

// ---------------------------------------------------------------- 4
void desk_numbers(Outcome& o) {
  constexpr double kValueTol = 1e-8, kBudget = 30;
  auto t0 = Clock::now();
  auto fl = find_critical_points(FlagShape::parse("1,2;4"), {1.0, 1.0});
  double t_fl = std::chrono::duration<double>(Clock::now() - t0).count();
  int near = static_cast<int>(
      std::count_if(fl.begin(), fl.end(), [&](const CritPoint& p) { return std::abs(p.value + 3.0) < kValueTol; }));
  t0 = Clock::now();
  auto gr = find_critical_points(FlagShape::parse("2;4"), {1.0});
  double t_gr = std::chrono::duration<double>(Clock::now() - t0).count();
  o.require(fl.size() == 12, "(1,2;4) count");
  o.require(near == 1, "(1,2;4) one value at -3");
  o.require(gr.size() == 6, "(2;4) count");
  o.require(t_fl < kBudget && t_gr < kBudget, "30 s each");
  o.detail << "(1,2;4): " << fl.size() << " points, " << near << " within " << kValueTol << " of -3 (" << t_fl
           << " s); (2;4): " << gr.size() << " points (" << t_gr << " s)";
}

// ---------------------------------------------------------------- 5 and 9
double g_max_toeplitz = -1;
int g_toeplitz_points = 0;

void mirror_spectrum(Outcome& o) {
  const char* shapes[] = {"1;2", "1;3", "2;4", "1,2;3", "1,2;4", "1,3;4", "2;5", "1,2,3;4"};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int runs = 0, passed = 0;
  double worst_ratio = 0;
  g_max_toeplitz = 0;
  for (const char* name : shapes) {
    FlagShape shape = FlagShape::parse(name);
    for (int k = 0; k < 6; ++k) {
      // k = 0: all ones; otherwise |q_j - 1| < 0.3.
      std::vector<cd> q(shape.r(), cd(1));
      if (k > 0)
        for (cd& v : q) v = cd(1) + std::polar(0.29 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
      CritStats stats;
      auto points = find_critical_points(shape, q, {}, &stats);
      std::vector<cd> values;
      for (const CritPoint& p : points) {
        values.insert(values.end(), p.multiplicity, p.value);
        g_max_toeplitz = std::max(g_max_toeplitz, p.toeplitz_residual);
        ++g_toeplitz_points;
      }
      MirrorSpectrumReport rep = compare_spectra(shape, q, c1_spectrum(shape, q), values);
      ++runs;
      passed += rep.passed();
      if (rep.passed()) worst_ratio = std::max(worst_ratio, rep.max_distance / rep.tolerance);
      else o.require(false, shape.str() + " q#" + std::to_string(k));
    }
  }
  o.detail << passed << "/" << runs << " spectrum matches; worst distance " << worst_ratio
           << " of the tolerance 1e-6 (1 + max modulus)";
}

void toeplitz_criterion(Outcome& o) {
  constexpr double kTol = 1e-7;
  o.require(g_toeplitz_points > 0, "criterion 5 ran");
  o.require(g_max_toeplitz < kTol, "residual");
  o.detail << g_toeplitz_points << " critical points from criterion 5; max residual " << g_max_toeplitz << " < " << kTol;
}

// ---------------------------------------------------------------- 6
void key_identity(Outcome& o) {
  try {
    KeyIdentityReport r = check_key_identity(FlagShape::parse("2,4;7"), 1, 4);
    o.detail << "(2,4;7) j=1 i=4: " << r.terms.size() << " terms, residue zero; ";
  } catch (const IdentityViolation& e) {
    o.require(false, e.what());
  }
  auto sweep = key_identity_sweep(6);
  int good = static_cast<int>(std::count_if(sweep.begin(), sweep.end(), [](const auto& r) { return r.passed(); }));
  o.require(good == static_cast<int>(sweep.size()) && !sweep.empty(), "sweep");
  o.detail << "sweep n <= 6: " << good << "/" << sweep.size() << " exact zero";
}

// ---------------------------------------------------------------- 7
void det_formula(Outcome& o) {
  for (int n = 2; n <= 5; ++n) {
    try {
      DetFormulaReport r = check_det_formula(n);
      o.detail << "n=" << n << ": " << r.entries.size() << " ok; ";
    } catch (const FormulaViolation& e) {
      o.require(false, e.what());
    }
  }
}

// ---------------------------------------------------------------- 8
Rational random_rational(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

void ring_soundness(Outcome& o) {
  const int n = 4;
  auto all = all_permutations(n);
  int products = 0, graded = 0, terms = 0;
  bool agree = true;
  for (const Perm& u : all) {
    MPoly su = quantum_schubert_polynomial(u, n);
    for (const Perm& v : all) {
      QHClass p = class_product(u, v, n);
      agree = agree && normal_form(su * quantum_schubert_polynomial(v, n), n) == p;
      ++products;
      for (const auto& [w, c] : p.terms)
        for (const auto& [e, a] : c.terms()) {
          int qd = 0;
          for (int t : e) qd += t;
          ++terms;
          graded += length(u) + length(v) == length(w) + 2 * qd;
        }
    }
  }
  o.require(agree, "operator route vs normal form");
  o.require(graded == terms, "grading");

  bool commute = true;
  for (int m = 2; m <= 5; ++m) {
    const MonkOperators& ops = monk_operators(m);
    for (const Perm& w : ops.perms()) {
      QVector x = QVector::basis(ops, w);
      for (int a = 1; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          QVector ab = x.apply_monk(a).apply_monk(b);
          ab.axpy(x.apply_monk(b).apply_monk(a), -1, 0);
          commute = commute && ab.is_zero();
        }
    }
  }
  o.require(commute, "Monk operators commute");

  std::mt19937 rng(77);
  int matrices = 0, identities = 0;
  while (matrices < 200) {
    int m = 2 + matrices % 4;
    RMatrix a(m, m), x(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = random_rational(rng), x(i, j) = random_rational(rng);
    Rational d = a.det();
    if (d == 0) continue;
    ++matrices;
    RMatrix ainv = a.inverse(), y = a * x;
    std::uniform_int_distribution<int> size(1, m);
    auto subsets_l = subsets(interval(1, m), size(rng));
    std::uniform_int_distribution<std::size_t> pick(0, subsets_l.size() - 1);
    auto J = subsets_l[pick(rng)], K = subsets_l[pick(rng)];
    bool jacobi = ainv.minor(J, K) ==
                  Rational(jacobi_sign(J, K)) * a.minor(set_minus(interval(1, m), K), set_minus(interval(1, m), J)) / d;
    bool cramer = x.minor(J, K) == cramer_replace(a, y, J, K).det() / d;
    identities += jacobi && cramer;
  }
  o.require(identities == matrices, "Jacobi/Cramer");
  o.detail << products << " products in S_4 agree; " << graded << "/" << terms << " terms graded; Monk operators commute for n <= 5: "
           << (commute ? "yes" : "no") << "; minor identities " << identities << "/" << matrices;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  std::vector<Criterion> criteria = {
      {1, "superpotential formula fidelity", 5, superpotential_fidelity},
      {2, "divisor bijection", 120, divisor_bijection},
      {3, "factorization oracle", 60, factorization_oracle},
      {4, "desk critical-point counts", 60, desk_numbers},
      {5, "c1 spectrum vs critical values", 600, mirror_spectrum},
      {6, "quantum Schubert identity", 900, key_identity},
      {7, "determinantal formula", 600, det_formula},
      {8, "ring engine soundness", 300, ring_soundness},
      {9, "Toeplitz criterion", 1, toeplitz_criterion},
  };
  int failures = 0, unexpected = 0;
  std::cout << std::setprecision(3);
  for (const Criterion& c : criteria) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(seconds < c.budget_seconds, "runtime budget");
    bool known = kKnownDeviations.count(c.id) > 0;
    if (!o.passed) {
      ++failures;
      unexpected += !(known && !strict);
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail.str()
              << " [" << seconds << " s of " << c.budget_seconds << " s]" << (!o.passed && known ? " known deviation" : "")
              << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria pass";
  if (failures > unexpected) std::cout << "; " << failures - unexpected << " known deviation(s), see README";
  std::cout << "\n";
  return unexpected == 0 ? 0 : 1;
}
