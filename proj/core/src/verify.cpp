#include "flagmirror/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "flagmirror/qhpartial.hpp"

namespace flagmirror {

namespace {

using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

nlohmann::json pair_json(cd v) { return nlohmann::json::array({v.real(), v.imag()}); }

std::string shape_subject(const FlagShape& shape, const std::vector<cd>& q) {
  std::ostringstream os;
  os << shape.str() << " at q=(";
  for (std::size_t k = 0; k < q.size(); ++k) os << (k ? ", " : "") << q[k].real() << (q[k].imag() < 0 ? "" : "+") << q[k].imag() << "i";
  os << ")";
  return os.str();
}

QHClass unit_class(const Perm& w, int nq) {
  QHClass c{nq, {}};
  c.add(w, MPoly::constant(nq, 1));
  return c;
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  int t = threads ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  t = std::max(1, std::min(t, count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next++) < count;) body(k);
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

// ---------------------------------------------------------------- reports

std::string markdown_report(const std::vector<CheckRecord>& records, const std::string& title) {
  std::ostringstream os;
  int passed = static_cast<int>(std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return r.passed; }));
  os << "# " << title << "\n\n" << passed << " of " << records.size() << " checks passed.\n\n";
  os << "| check | subject | status | residual | seconds |\n|---|---|---|---|---|\n";
  for (const CheckRecord& r : records) {
    os << "| " << r.kind << " | " << r.subject << " | " << (r.passed ? "PASS" : "FAIL") << " | " << r.residual << " | "
       << r.seconds << " |\n";
  }
  return os.str();
}

nlohmann::json json_report(const std::vector<CheckRecord>& records) {
  nlohmann::json checks = nlohmann::json::array();
  int passed = 0;
  for (const CheckRecord& r : records) {
    passed += r.passed;
    checks.push_back({{"kind", r.kind},
                      {"subject", r.subject},
                      {"status", r.passed ? "PASS" : "FAIL"},
                      {"residual", r.residual},
                      {"seconds", r.seconds},
                      {"details", r.details}});
  }
  return {{"checks", checks}, {"passed", passed}, {"total", records.size()}};
}

// ---------------------------------------------------------------- key identity

IdentityViolation::IdentityViolation(KeyIdentityReport r)
    : std::runtime_error("key identity violated for " + r.shape.str() + ", j=" + std::to_string(r.j) +
                         ", i=" + std::to_string(r.i) + ": " + r.residue.str(q_names(r.shape.n() - 1))),
      report(std::move(r)) {}

namespace {

KeyIdentityReport compute_key_identity(const FlagShape& shape, int j, int i) {
  auto t0 = Clock::now();
  const int n = shape.n(), nj = shape.step(j);
  KeyIdentityReport rep;
  rep.shape = shape;
  rep.j = j;
  rep.i = i;
  rep.d = i - (n - shape.step(j + 1));
  rep.residue = QHClass{n - 1, {}};
  rep.quantum_parts_match = true;
  for (const XiEntry& e : xi_family(shape, j, i)) {
    KeyIdentityTerm t;
    t.J = e.J;
    t.sign = element_sum(e.J) % 2 ? -1 : 1;
    t.wJ = e.w;
    t.grassmannian = grassmannian_perm(set_minus(interval(1, nj + rep.d), e.J), n);
    t.product = QHClass{n - 1, {}};
    if (e.w) {
      t.product = class_product(*e.w, t.grassmannian, n);
      if (t.sign > 0)
        rep.residue += t.product;
      else
        rep.residue -= t.product;
    }
    // Quantum part of the Chevalley product in QH*(X).
    QHClass full = chevalley_multiply(grassmannian_perm(set_union(e.J, interval(i + 1, n)), n), j + 1, shape);
    QHClass quantum = full;
    quantum -= full.at_q_zero();
    QHClass expected{full.nq, {}};
    if (e.w) expected.add(*e.w, MPoly::variable(full.nq, j));
    rep.quantum_parts_match = rep.quantum_parts_match && quantum == expected;
    rep.terms.push_back(std::move(t));
  }
  rep.seconds = since(t0);
  return rep;
}

}  // namespace

KeyIdentityReport check_key_identity(const FlagShape& shape, int j, int i) {
  if (!key_identity_legal(shape, j, i))
    throw std::invalid_argument("check_key_identity: need 1 <= j <= r-1 and n - n_{j+1} < i < n - n_j");
  KeyIdentityReport rep = compute_key_identity(shape, j, i);
  if (!rep.passed()) throw IdentityViolation(std::move(rep));
  return rep;
}

std::vector<KeyIdentityReport> key_identity_sweep(int max_n, int threads) {
  std::vector<std::tuple<FlagShape, int, int>> cases;
  for (int n = 3; n <= max_n; ++n)
    for (const FlagShape& shape : FlagShape::all_shapes(n))
      for (int j = 1; j < shape.r(); ++j)
        for (int i = 1; i < n; ++i)
          if (key_identity_legal(shape, j, i)) cases.emplace_back(shape, j, i);
  std::vector<KeyIdentityReport> out(cases.size());
  parallel_for(static_cast<int>(cases.size()), threads, [&](int k) {
    const auto& [shape, j, i] = cases[k];
    out[k] = compute_key_identity(shape, j, i);
  });
  return out;
}

CheckRecord KeyIdentityReport::record() const {
  CheckRecord r;
  r.kind = "key-identity";
  r.subject = shape.str() + " j=" + std::to_string(j) + " i=" + std::to_string(i);
  r.passed = passed();
  r.residual = static_cast<double>(residue.terms.size());
  r.seconds = seconds;
  nlohmann::json terms_json = nlohmann::json::array();
  for (const KeyIdentityTerm& t : terms)
    terms_json.push_back({{"J", t.J},
                          {"sign", t.sign},
                          {"w_J", t.wJ ? perm_to_string(*t.wJ) : std::string()},
                          {"grassmannian", perm_to_string(t.grassmannian)},
                          {"product", t.product.str(q_names(shape.n() - 1))}});
  r.details = {{"d", d},
               {"terms", terms_json},
               {"residue", residue.is_zero() ? "0" : residue.str(q_names(shape.n() - 1))},
               {"quantum_parts_match", quantum_parts_match}};
  return r;
}

// ---------------------------------------------------------------- determinantal formula

FormulaViolation::FormulaViolation(DetFormulaReport r)
    : std::runtime_error("determinantal formula violated in S_" + std::to_string(r.n)), report(std::move(r)) {}

bool DetFormulaReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const DetFormulaEntry& e) { return e.passed; });
}

DetFormulaReport check_det_formula(int n) {
  if (n < 2 || n > 5) throw std::invalid_argument("check_det_formula: need 2 <= n <= 5");
  auto t0 = Clock::now();
  DetFormulaReport rep;
  rep.n = n;
  for (const Perm& w : all_permutations(n)) {
    if (!is_321_avoiding(w)) continue;
    DetFormulaEntry e;
    e.w = w;
    e.skew = skew_shape(w);
    e.residue = normal_form(quantum_det_formula(w, n), n);
    e.residue -= unit_class(w, n - 1);
    e.passed = e.residue.is_zero();
    rep.entries.push_back(std::move(e));
  }
  rep.seconds = since(t0);
  if (!rep.passed()) throw FormulaViolation(std::move(rep));
  return rep;
}

CheckRecord DetFormulaReport::record() const {
  CheckRecord r;
  r.kind = "det-formula";
  r.subject = "321-avoiding permutations in S_" + std::to_string(n);
  r.passed = passed();
  r.seconds = seconds;
  nlohmann::json list = nlohmann::json::array();
  int failures = 0;
  for (const DetFormulaEntry& e : entries) {
    failures += !e.passed;
    list.push_back({{"w", perm_to_string(e.w)},
                    {"flag", e.skew.flag},
                    {"lambda", e.skew.lambda},
                    {"mu", e.skew.mu},
                    {"status", e.passed ? "PASS" : "FAIL"}});
  }
  r.residual = failures;
  r.details = {{"count", entries.size()}, {"permutations", list}};
  return r;
}

// ---------------------------------------------------------------- mirror spectrum

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  // Hungarian method with potentials, 1-based internally.
  const int rows = static_cast<int>(cost.size());
  if (!rows) return {};
  const int cols = static_cast<int>(cost[0].size());
  if (rows > cols) throw std::invalid_argument("min_cost_assignment: more rows than columns");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0), v(cols + 1, 0);
  std::vector<int> match(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        double c = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (c < minv[j]) minv[j] = c, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j])
          u[match[j]] += delta, v[j] -= delta;
        else
          minv[j] -= delta;
      }
      j0 = j1;
    } while (match[j0]);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(rows, -1);
  for (int j = 1; j <= cols; ++j)
    if (match[j]) result[match[j] - 1] = j - 1;
  return result;
}

MirrorSpectrumReport compare_spectra(const FlagShape& shape, const std::vector<cd>& q, std::vector<cd> eigenvalues,
                                     std::vector<cd> critical_values) {
  MirrorSpectrumReport rep;
  rep.shape = shape;
  rep.q = q;
  rep.eigenvalues = std::move(eigenvalues);
  rep.critical_values = std::move(critical_values);
  const auto& A = rep.eigenvalues;
  const auto& B = rep.critical_values;
  double modulus = 0;
  for (const cd& v : A) modulus = std::max(modulus, std::abs(v));
  for (const cd& v : B) modulus = std::max(modulus, std::abs(v));
  rep.tolerance = 1e-6 * (1 + modulus);
  // Squared distances favour matchings with a small maximum.
  bool a_rows = A.size() <= B.size();
  const auto& R = a_rows ? A : B;
  const auto& C = a_rows ? B : A;
  std::vector<std::vector<double>> cost(R.size(), std::vector<double>(C.size()));
  for (std::size_t i = 0; i < R.size(); ++i)
    for (std::size_t j = 0; j < C.size(); ++j) cost[i][j] = std::norm(R[i] - C[j]);
  std::vector<int> assignment = min_cost_assignment(cost);
  std::vector<bool> a_used(A.size()), b_used(B.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    int a = a_rows ? static_cast<int>(i) : assignment[i], b = a_rows ? assignment[i] : static_cast<int>(i);
    rep.pairs.emplace_back(a, b);
    a_used[a] = b_used[b] = true;
    rep.max_distance = std::max(rep.max_distance, std::abs(A[a] - B[b]));
  }
  std::sort(rep.pairs.begin(), rep.pairs.end());
  for (std::size_t k = 0; k < A.size(); ++k)
    if (!a_used[k]) rep.unmatched_eigenvalues.push_back(static_cast<int>(k));
  for (std::size_t k = 0; k < B.size(); ++k)
    if (!b_used[k]) rep.unmatched_critical_values.push_back(static_cast<int>(k));
  return rep;
}

MirrorSpectrumReport check_mirror_spectrum(const FlagShape& shape, const std::vector<cd>& q, const CritConfig& cfg) {
  auto t0 = Clock::now();
  CritStats stats;
  auto points = find_critical_points(shape, q, cfg, &stats);
  std::vector<cd> values;
  for (const CritPoint& p : points) values.insert(values.end(), p.multiplicity, p.value);
  MirrorSpectrumReport rep = compare_spectra(shape, q, c1_spectrum(shape, q), std::move(values));
  rep.crit_stats = std::move(stats);
  rep.seconds = since(t0);
  return rep;
}

bool MirrorSpectrumReport::passed() const {
  return eigenvalues.size() == critical_values.size() && max_distance < tolerance;
}

CheckRecord MirrorSpectrumReport::record() const {
  CheckRecord r;
  r.kind = "mirror-spectrum";
  r.subject = shape_subject(shape, q);
  r.passed = passed();
  r.residual = max_distance;
  r.seconds = seconds;
  nlohmann::json pj = nlohmann::json::array(), ua = nlohmann::json::array(), ub = nlohmann::json::array();
  for (const auto& [a, b] : pairs)
    pj.push_back({{"eigenvalue", pair_json(eigenvalues[a])},
                  {"critical_value", pair_json(critical_values[b])},
                  {"distance", std::abs(eigenvalues[a] - critical_values[b])}});
  for (int a : unmatched_eigenvalues) ua.push_back(pair_json(eigenvalues[a]));
  for (int b : unmatched_critical_values) ub.push_back(pair_json(critical_values[b]));
  r.details = {{"eigenvalue_count", eigenvalues.size()},
               {"critical_value_count", critical_values.size()},
               {"tolerance", tolerance},
               {"pairs", pj},
               {"unmatched_eigenvalues", ua},
               {"unmatched_critical_values", ub},
               {"crit_starts", crit_stats.starts},
               {"crit_converged", crit_stats.converged},
               {"crit_degenerate", crit_stats.degenerate},
               {"crit_warnings", crit_stats.warnings}};
  return r;
}

// ---------------------------------------------------------------- tau symmetry

CMatrix w0_dot(int n) { return dot_word(n, reduced_word(longest_element(n))).cast<cd>(); }

CMatrix tau(const CMatrix& g) {
  CMatrix w0 = w0_dot(static_cast<int>(g.rows()));
  return w0 * g.inverse().transpose() * w0.transpose();
}

cd g_function(const CMatrix& g, int m, int i) {
  const int n = static_cast<int>(g.rows());
  if (i < 1 || i > m || m >= n) throw std::invalid_argument("g_function: need 1 <= i <= m < n");
  std::vector<int> cols = interval(m + 1, n), rows = set_union({m - i + 1}, interval(m + 2, n));
  return minor(g, rows, cols) / minor(g, cols, cols);
}

FlagShape complementary_shape(const FlagShape& shape) {
  std::vector<int> parts;
  for (int j = shape.r(); j >= 1; --j) parts.push_back(shape.n() - shape.step(j));
  return FlagShape(shape.n(), parts);
}

bool TauReport::passed() const {
  return involution < tolerance && unipotent < tolerance && superdiagonal < tolerance && g_symmetry < tolerance &&
         coset < tolerance;
}

TauReport check_tau_symmetry(const FlagShape& shape, int samples, std::uint64_t seed) {
  auto t0 = Clock::now();
  const int n = shape.n();
  TauReport rep;
  rep.shape = shape;
  rep.complementary = complementary_shape(shape);
  rep.samples = samples;
  ZChart chart(shape);
  CMatrix w0 = w0_dot(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.5, 1.5), phase(0, 2 * std::numbers::pi);
  auto random_cd = [&] { return std::polar(mod(rng), phase(rng)); };
  auto rel = [](cd a, cd b) { return std::abs(a - b) / (1 + std::abs(b)); };
  for (int s = 0; s < samples; ++s) {
    CVector x(chart.dim());
    for (int a = 0; a < x.size(); ++a) x(a) = random_cd();
    UVFactors f = uv_from_z(chart.matrix(x), shape);
    CMatrix tu = tau(f.u);
    rep.involution = std::max(rep.involution, (tau(tau(f.u)) - f.u).norm() / f.u.norm());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c <= r; ++c) rep.unipotent = std::max(rep.unipotent, std::abs(tu(r, c) - cd(r == c ? 1 : 0)));
    for (int i = 1; i < n; ++i)
      rep.superdiagonal = std::max(rep.superdiagonal, std::abs(tu(n - i - 1, n - i) - f.u(i - 1, i)));

    CVector t(n);
    for (int a = 0; a < n; ++a) t(a) = random_cd();
    CMatrix bm = t.asDiagonal() * f.lower;
    CMatrix g = bm * w0, tg = tau(bm) * w0;
    CMatrix lower = CMatrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c <= r; ++c) lower(r, c) = r == c ? random_cd() : cd(0.3) * random_cd();
    rep.involution = std::max(rep.involution, (tau(tau(bm)) - bm).norm() / bm.norm());
    for (int j = 1; j <= shape.r(); ++j) {
      int m = shape.step(j);
      rep.g_symmetry = std::max(rep.g_symmetry, rel(g_function(tg, n - m, 1), g_function(g, m, 1)));
      for (int i = 1; i <= m; ++i) rep.coset = std::max(rep.coset, rel(g_function(g * lower, m, i), g_function(g, m, i)));
    }
  }
  rep.seconds = since(t0);
  return rep;
}

CheckRecord TauReport::record() const {
  CheckRecord r;
  r.kind = "tau-symmetry";
  r.subject = shape.str() + " vs " + complementary.str();
  r.passed = passed();
  r.residual = std::max({involution, unipotent, superdiagonal, g_symmetry, coset});
  r.seconds = seconds;
  r.details = {{"samples", samples},         {"involution", involution}, {"unipotent", unipotent},
               {"superdiagonal", superdiagonal}, {"g_symmetry", g_symmetry}, {"coset", coset},
               {"tolerance", tolerance}};
  return r;
}

UMiddleReport check_u_middle(const FlagShape& shape, const std::vector<cd>& q, const CritConfig& cfg) {
  auto t0 = Clock::now();
  const int n = shape.n(), r = shape.r();
  UMiddleReport rep;
  rep.shape = shape;
  rep.q = q;
  ZChart chart(shape);
  CMatrix w0 = w0_dot(n);
  CVector t = toeplitz_torus(shape, q);
  for (const CritPoint& p : find_critical_points(shape, q, cfg)) {
    ++rep.points;
    UVFactors f = uv_from_z(chart.matrix(p.z), shape);
    CMatrix g = t.asDiagonal() * f.lower * w0;
    for (int j = 1; j <= r; ++j) {
      for (int i = n - shape.step(j + 1) + 1; i < n - shape.step(j); ++i) {
        cd predicted = -(g_function(g, shape.step(j), 1) + (j < r ? g_function(g, shape.step(j + 1), 1) : cd(0)));
        rep.max_residual = std::max(rep.max_residual, std::abs(f.u(i - 1, i) - predicted) / (1 + std::abs(predicted)));
        ++rep.checks;
      }
    }
    for (int i = n - shape.step(1) + 1; i < n; ++i) {
      cd predicted = -g_function(g, shape.step(1), 1);
      rep.max_residual = std::max(rep.max_residual, std::abs(f.u(i - 1, i) - predicted) / (1 + std::abs(predicted)));
      ++rep.checks;
    }
  }
  rep.seconds = since(t0);
  return rep;
}

CheckRecord UMiddleReport::record() const {
  CheckRecord r;
  r.kind = "u-from-G";
  r.subject = shape_subject(shape, q);
  r.passed = passed();
  r.residual = max_residual;
  r.seconds = seconds;
  r.details = {{"critical_points", points}, {"checks", checks}, {"tolerance", tolerance}};
  return r;
}

}  // namespace flagmirror
