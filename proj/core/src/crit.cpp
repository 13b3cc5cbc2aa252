#include "flagmirror/crit.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace flagmirror {

namespace {

using cd = std::complex<double>;

enum class Outcome { Converged, Pole, Failed };

struct Run {
  Outcome outcome = Outcome::Failed;
  CVector x;
  cd value;
  double gradient_norm = 0;
};

bool finite(const CVector& v) {
  for (int a = 0; a < v.size(); ++a)
    if (!std::isfinite(v(a).real()) || !std::isfinite(v(a).imag())) return false;
  return true;
}

// Damped Newton on grad F = 0, halving the step up to 20 times until |grad| drops. In
// logarithmic mode the unknowns are y with x = exp(y): the merit |dF/dy| grows along most
// directions to the boundary of the torus, whereas |dF/dx| levels off wherever F is
// asymptotically linear and lets the iteration drift to infinity.
Run newton(const FMinusFunction& F, const std::vector<cd>& q, const CVector& x0, bool logarithmic,
           const CritConfig& cfg) {
  Run run;
  CVector y = logarithmic ? CVector(x0.array().log()) : x0;
  auto coords = [&](const CVector& yy) { return logarithmic ? CVector(yy.array().exp()) : yy; };
  auto eval = [&](const CVector& yy, CVector& gy) {
    CVector x = coords(yy);
    auto e = F.evaluate(x, q);
    if (!logarithmic) {
      gy = e.gradient;
      return e;
    }
    gy = x.cwiseProduct(e.gradient);
    e.hessian = x.asDiagonal() * e.hessian * x.asDiagonal();
    e.hessian.diagonal() += gy;
    return e;
  };
  CVector gy;
  auto e = eval(y, gy);
  if (e.min_relative_denominator < cfg.pole_guard) return run.outcome = Outcome::Pole, run;
  for (int it = 0; it <= cfg.newton_max_iter; ++it) {
    // In logarithmic mode the test is on dF/dy: near the boundary of the torus dF/dx need not
    // vanish although the limit point is critical in the chart. Polishing decides.
    double g = logarithmic ? gy.norm() : e.gradient.norm();
    CVector x = coords(y);
    if (logarithmic ? !(y.real().cwiseAbs().maxCoeff() < std::log(cfg.escape_radius)) : !(x.norm() < cfg.escape_radius))
      break;
    if (g < cfg.newton_tol * (1 + e.term_scale)) {
      run = {Outcome::Converged, x, e.value, g};
      return run;
    }
    if (it == cfg.newton_max_iter) break;
    CVector dy = e.hessian.fullPivLu().solve(-gy);
    if (!finite(dy)) break;
    bool accepted = false, pole = false;
    double step = 1, m = gy.norm();
    for (int halving = 0; halving <= 20 && !accepted; ++halving, step /= 2) {
      CVector yn = y + step * dy, gn;
      auto en = eval(yn, gn);
      if (en.min_relative_denominator < cfg.pole_guard) {
        pole = true;
        continue;
      }
      if (gn.norm() < m) {
        y = yn;
        gy = gn;
        e = std::move(en);
        accepted = true;
      }
    }
    if (!accepted) {
      run.outcome = pole ? Outcome::Pole : Outcome::Failed;
      break;
    }
  }
  // Failed runs keep their last iterate: torus runs that drift to the boundary of the torus
  // often approach a critical point of the chart lying off the torus.
  if (run.outcome == Outcome::Failed) run.x = coords(y);
  return run;
}

// Plain Newton in chart coordinates; keeps the best point seen.
Run polish(const FMinusFunction& F, const std::vector<cd>& q, CVector x, const CritConfig& cfg) {
  Run run;
  for (int it = 0; it < 20; ++it) {
    auto e = F.evaluate(x, q);
    if (e.min_relative_denominator < cfg.pole_guard || !(x.norm() < cfg.escape_radius)) return run;
    double g = e.gradient.norm();
    if (run.outcome != Outcome::Converged || g < run.gradient_norm) {
      if (g < cfg.newton_tol * (1 + e.term_scale)) run = {Outcome::Converged, x, e.value, g};
    }
    CVector dx = e.hessian.fullPivLu().solve(-e.gradient);
    if (!finite(dx) || dx.norm() < 1e-15 * (1 + x.norm())) break;
    x += dx;
  }
  return run;
}

// Numerical gradient from values only: F is holomorphic in each coordinate, so dF/dx_a is the
// trapezoid rule for the Cauchy integral over a circle around x_a, which converges geometrically.
// The radius shrinks until two resolutions agree, keeping the circle clear of poles.
double fd_gradient_norm(const FMinusFunction& F, const std::vector<cd>& q, const CVector& x) {
  auto contour = [&](int a, double r, int nodes) {
    cd s = 0;
    for (int k = 0; k < nodes; ++k) {
      cd w = std::polar(r, 2 * std::numbers::pi * (k + 0.5) / nodes);
      CVector y = x;
      y(a) += w;
      s += F.value(y, q) / w;
    }
    return s / static_cast<double>(nodes);
  };
  double total = 0;
  for (int a = 0; a < x.size(); ++a) {
    cd d = 0;
    for (double r = 0.05 * (1 + std::abs(x(a))); r > 1e-6; r /= 4) {
      cd d1 = contour(a, r, 32), d2 = contour(a, r, 64);
      d = d2;
      if (std::abs(d1 - d2) <= 1e-13 * (1 + std::abs(d2))) break;
    }
    total += std::norm(d);
  }
  return std::sqrt(total);
}

double hessian_ratio(const CMatrix& h) {
  Eigen::JacobiSVD<CMatrix> svd(h);
  const auto& sv = svd.singularValues();
  return sv.size() && sv(0) > 0 ? sv(sv.size() - 1) / sv(0) : 0;
}

// Counts the critical points of F + eps <l, x> within the morsification radius of x. They are
// nondegenerate for generic l and their number is the Milnor number of the critical point.
int local_multiplicity(const FMinusFunction& F, const std::vector<cd>& q, const CVector& x, const CritConfig& cfg,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  int d = static_cast<int>(x.size());
  CVector l(d);
  for (int a = 0; a < d; ++a) l(a) = cd(gauss(rng), gauss(rng));
  l.normalize();
  auto e0 = F.evaluate(x, q);
  double eps = cfg.morsification_eps * e0.hessian.norm(), radius = cfg.morsification_radius * (1 + x.norm());
  std::vector<CVector> found;
  for (int s = 0; s < 40 * d; ++s) {
    CVector y(d);
    for (int a = 0; a < d; ++a) y(a) = cd(gauss(rng), gauss(rng));
    y = x + y * (radius / 5 / std::sqrt(2.0 * d));
    for (int it = 0; it < 60; ++it) {
      auto e = F.evaluate(y, q);
      if (e.min_relative_denominator < cfg.pole_guard) break;
      CVector g = e.gradient + eps * l;
      if (g.norm() < cfg.newton_tol * (1 + e.term_scale)) {
        if ((y - x).norm() < radius &&
            std::none_of(found.begin(), found.end(), [&](const CVector& f) { return (f - y).norm() < eps * 1e2 + 1e-9; }))
          found.push_back(y);
        break;
      }
      CVector dy = e.hessian.fullPivLu().solve(-g);
      if (!finite(dy)) break;
      y += dy;
      if (!((y - x).norm() < 2 * radius)) break;
    }
  }
  return std::max<int>(1, static_cast<int>(found.size()));
}

bool value_less(const Run& a, const Run& b) {
  if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
  if (a.value.imag() != b.value.imag()) return a.value.imag() < b.value.imag();
  for (int i = 0; i < a.x.size(); ++i) {
    if (a.x(i).real() != b.x(i).real()) return a.x(i).real() < b.x(i).real();
    if (a.x(i).imag() != b.x(i).imag()) return a.x(i).imag() < b.x(i).imag();
  }
  return false;
}

// Deduplicates converged runs into critical points sorted by value. Degenerate points attract
// linearly convergent runs that scatter beyond dedupe_radius, so they absorb every other hit
// within degenerate_merge_radius.
std::vector<CritPoint> collect(const FMinusFunction& F, const FlagShape& shape, const std::vector<cd>& q,
                               std::vector<Run>& converged, const CritConfig& cfg, int& degenerate_count) {
  std::sort(converged.begin(), converged.end(), value_less);
  struct Rep {
    const Run* run;
    double ratio;
  };
  std::vector<Rep> reps;
  for (const Run& r : converged) {
    if (std::none_of(reps.begin(), reps.end(), [&](const Rep& p) {
          return (r.x - p.run->x).norm() <= cfg.dedupe_radius * (1 + p.run->x.norm());
        }))
      reps.push_back({&r, hessian_ratio(F.evaluate(r.x, q).hessian)});
  }
  auto degenerate = [&](const Rep& r) { return r.ratio < cfg.degenerate_ratio; };
  std::stable_sort(reps.begin(), reps.end(), [&](const Rep& a, const Rep& b) {
    if (degenerate(a) != degenerate(b)) return degenerate(a);
    return degenerate(a) && a.run->gradient_norm < b.run->gradient_norm;
  });
  std::vector<Rep> kept;
  for (const Rep& r : reps) {
    if (std::none_of(kept.begin(), kept.end(), [&](const Rep& p) {
          double rad = degenerate(p) ? cfg.degenerate_merge_radius : cfg.dedupe_radius;
          return (r.run->x - p.run->x).norm() <= rad * (1 + p.run->x.norm());
        }))
      kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(), [](const Rep& a, const Rep& b) { return value_less(*a.run, *b.run); });

  std::vector<CritPoint> out;
  degenerate_count = 0;
  for (const Rep& r : kept) {
    const CVector& x = r.run->x;
    CritPoint p{x, r.run->value, r.run->gradient_norm, fd_gradient_norm(F, q, x),
                toeplitz_residual(F.chart().matrix(x), shape, q), r.ratio};
    if (degenerate(r)) {
      p.multiplicity = local_multiplicity(F, q, x, cfg, cfg.seed + out.size());
      ++degenerate_count;
    }
    out.push_back(std::move(p));
  }
  for (const Run& r : converged) {
    int best = -1;
    double bd = 0;
    for (int k = 0; k < static_cast<int>(out.size()); ++k) {
      double d = (r.x - out[k].z).norm();
      if (best < 0 || d < bd) best = k, bd = d;
    }
    if (best >= 0) ++out[best].hits;
  }
  return out;
}

}  // namespace

void CritConfig::validate() const {
  if (starts < 0 || newton_max_iter <= 0 || !(newton_tol > 0) || !(dedupe_radius > 0) || !(pole_guard > 0) ||
      !(start_min_modulus > 0) || !(start_max_modulus >= start_min_modulus) || !(escape_radius > start_max_modulus) || threads < 0)
    throw std::invalid_argument("CritConfig: tolerances and budgets must be positive");
  if (!(degenerate_ratio > 0) || !(degenerate_merge_radius >= dedupe_radius) || !(morsification_eps > 0) ||
      !(morsification_radius > 0) || max_batches < 1)
    throw std::invalid_argument("CritConfig: degeneracy parameters must be positive");
}

CritSolver::CritSolver(const FlagShape& shape, int torus_charts) : chart_(shape) {
  Perm w = longest_coset_rep(shape);
  std::vector<std::vector<int>> words;
  for (std::uint64_t k = 0; static_cast<int>(words.size()) < torus_charts && k < 64; ++k) {
    auto word = k ? random_reduced_word(w, k) : reduced_word(w);
    if (std::find(words.begin(), words.end(), word) == words.end()) words.push_back(word);
  }
  for (const auto& word : words) tori_.emplace_back(shape, torus_chart(shape, word));
}

std::vector<CritPoint> find_critical_points(const FlagShape& shape, const std::vector<cd>& q,
                                            const CritConfig& cfg, CritStats* stats) {
  return CritSolver(shape).solve(q, cfg, stats);
}

std::vector<CritPoint> CritSolver::solve(const std::vector<cd>& q, const CritConfig& cfg, CritStats* stats) const {
  cfg.validate();
  const FlagShape& shape = this->shape();
  const FMinusFunction& F = chart_;
  if (static_cast<int>(q.size()) != shape.r()) throw std::invalid_argument("find_critical_points: expected one q per step");
  for (const cd& v : q)
    if (v == cd(0)) throw std::invalid_argument("find_critical_points: q must be nonzero");

  std::size_t expected = shape.euler_characteristic();
  // A fixed budget, or batches of 100 starts per expected point until the multiplicities add
  // up to the expected count.
  int batch = cfg.starts ? cfg.starts : static_cast<int>(100 * expected);
  int max_batches = cfg.starts ? 1 : cfg.max_batches;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> mod(cfg.start_min_modulus, cfg.start_max_modulus),
      phase(0, 2 * std::numbers::pi), unit(0, 1);
  // Even starts use the chart in plain coordinates, started uniformly in the disk of radius
  // start_max_modulus; odd starts cycle through the tori, started in the annulus.
  int systems = 1 + static_cast<int>(tori_.size());
  auto system_index = [&](int s) { return s % 2 ? 1 + (s / 2) % (systems - 1) : 0; };
  auto system = [&](int s) -> const FMinusFunction& { return system_index(s) ? tori_[system_index(s) - 1] : chart_; };
  int nthreads = cfg.threads ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nthreads = std::min(nthreads, batch);

  CritStats st;
  st.expected = expected;
  st.converged_by_system.assign(systems, 0);
  std::vector<Run> converged;
  std::vector<CritPoint> out;
  for (int b = 0; b < max_batches; ++b) {
    int first = b * batch, last = first + batch;
    std::vector<CVector> x0(batch);
    for (int s = first; s < last; ++s) {
      CVector& x = x0[s - first];
      x.resize(system(s).dim());
      for (int a = 0; a < x.size(); ++a)
        x(a) = system_index(s) ? std::polar(mod(rng), phase(rng))
                               : std::polar(cfg.start_max_modulus * std::sqrt(unit(rng)), phase(rng));
    }
    std::vector<Run> runs(batch);
    std::atomic<int> next{first};
    auto worker = [&] {
      for (int s; (s = next++) < last;) {
        const FMinusFunction& G = system(s);
        Run r = newton(G, q, x0[s - first], system_index(s) != 0, cfg);
        bool boundary = r.outcome == Outcome::Failed && system_index(s) && r.x.size() && finite(r.x);
        if (r.outcome == Outcome::Converged || boundary) {
          Run p = polish(F, q, G.to_chart(r.x), cfg);
          r = p.outcome == Outcome::Converged ? p : Run{Outcome::Failed, {}, 0, 0};
        }
        runs[s - first] = std::move(r);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    st.starts = last;
    for (int s = first; s < last; ++s) {
      Run& r = runs[s - first];
      st.converged_by_system[system_index(s)] += r.outcome == Outcome::Converged;
      st.pole_rejected += r.outcome == Outcome::Pole;
      st.failed += r.outcome == Outcome::Failed;
      if (r.outcome == Outcome::Converged) converged.push_back(std::move(r));
    }
    st.converged = static_cast<int>(converged.size());
    out = collect(F, shape, q, converged, cfg, st.degenerate);
    if (static_cast<std::size_t>(total_multiplicity(out)) == expected) break;
  }

  std::size_t total = static_cast<std::size_t>(total_multiplicity(out));
  if (total != expected)
    st.warnings.push_back("found " + std::to_string(out.size()) + " critical points of total multiplicity " +
                          std::to_string(total) + ", expected " + std::to_string(expected));
  if (stats) *stats = std::move(st);
  return out;
}

int total_multiplicity(const std::vector<CritPoint>& points) {
  int m = 0;
  for (const CritPoint& p : points) m += p.multiplicity;
  return m;
}

CVector toeplitz_torus(const FlagShape& shape, const std::vector<cd>& q) {
  int n = shape.n(), r = shape.r();
  CVector t(n);
  cd c = 1;
  for (int j = r + 1; j >= 1; --j) {
    if (j <= r) c *= q[j - 1];
    for (int i = shape.step(j - 1) + 1; i <= shape.step(j); ++i) t(i - 1) = c;
  }
  return t;
}

double toeplitz_residual(const CMatrix& z, const FlagShape& shape, const std::vector<cd>& q) {
  int n = shape.n();
  CMatrix m = toeplitz_torus(shape, q).asDiagonal() * uv_from_z(z, shape).lower;
  double spread = 0;
  for (int d = 0; d < n; ++d) {
    double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
    for (int i = 0; i + d < n; ++i) {
      cd e = m(i + d, i);
      lo_re = std::min(lo_re, e.real());
      hi_re = std::max(hi_re, e.real());
      lo_im = std::min(lo_im, e.imag());
      hi_im = std::max(hi_im, e.imag());
    }
    spread = std::max(spread, std::hypot(hi_re - lo_re, hi_im - lo_im));
  }
  return spread / m.norm();
}

nlohmann::json crit_report(const FlagShape& shape, const std::vector<cd>& q, const std::vector<CritPoint>& points,
                           const CritStats& stats) {
  auto pair = [](cd v) { return nlohmann::json::array({v.real(), v.imag()}); };
  nlohmann::json qs = nlohmann::json::array(), pts = nlohmann::json::array();
  for (const cd& v : q) qs.push_back(pair(v));
  for (const CritPoint& p : points) {
    nlohmann::json z = nlohmann::json::array();
    for (int a = 0; a < p.z.size(); ++a) z.push_back(pair(p.z(a)));
    pts.push_back({{"z", z},
                   {"value", pair(p.value)},
                   {"gradient_norm", p.gradient_norm},
                   {"fd_gradient_norm", p.fd_gradient_norm},
                   {"toeplitz_residual", p.toeplitz_residual},
                   {"hessian_ratio", p.hessian_ratio},
                   {"multiplicity", p.multiplicity},
                   {"hits", p.hits}});
  }
  return {{"shape", shape.str()},      {"q", qs},
          {"points", pts},             {"count", points.size()},
          {"total_multiplicity", total_multiplicity(points)},
          {"expected_dim", stats.expected}, {"starts", stats.starts},
          {"converged_runs", stats.converged}, {"warnings", stats.warnings}};
}

}  // namespace flagmirror
