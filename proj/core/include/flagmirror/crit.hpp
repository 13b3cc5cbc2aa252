#pragma once

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "flagmirror/mirror.hpp"

namespace flagmirror {

struct CritConfig {
  int starts = 0;       // 0: batches of 100 per expected critical point, see max_batches
  int max_batches = 20;  // batches stop once the multiplicities add up to the expected count
  std::uint64_t seed = 1;
  int newton_max_iter = 100;
  double newton_tol = 1e-12;    // on the gradient norm, relative to 1 + term scale
  double dedupe_radius = 1e-6;  // relative, in chart coordinates
  double pole_guard = 1e-10;    // on |D| / (sum of |monomials of D|)
  double start_min_modulus = 0.2, start_max_modulus = 2.0;
  double escape_radius = 1e6;  // runs leaving this ball in chart coordinates fail
  // A point is degenerate when sigma_min / sigma_max of its Hessian falls below this; Newton
  // converges only linearly there, so hits within degenerate_merge_radius are merged.
  double degenerate_ratio = 1e-7;
  double degenerate_merge_radius = 1e-3;  // relative
  // Multiplicity of a degenerate point: nondegenerate critical points of F + eps <l, x> near it,
  // for a random unit l, with eps relative to the Hessian norm.
  double morsification_eps = 1e-8;
  double morsification_radius = 0.05;  // relative; starts within a fifth of it
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct CritPoint {
  CVector z;
  std::complex<double> value;
  double gradient_norm;
  double fd_gradient_norm;  // from values on small circles, independent of the symbolic gradient
  double toeplitz_residual;
  double hessian_ratio;  // sigma_min / sigma_max
  int multiplicity = 1;
  int hits = 0;  // converged starts attributed to this point
};

struct CritStats {
  int starts = 0, converged = 0, pole_rejected = 0, failed = 0, degenerate = 0;
  std::size_t expected = 0;
  std::vector<int> converged_by_system;  // chart first, then the torus charts
  std::vector<std::string> warnings;
};

// Multistart damped Newton over an atlas: the chart itself and torus charts from reduced words
// of w_P w_0 in logarithmic coordinates. Torus charts converge from most starts; the chart
// reaches critical points off the tori. Every hit, including torus runs that stall near the
// boundary of their torus, is polished and deduplicated in chart coordinates.
class CritSolver {
 public:
  explicit CritSolver(const FlagShape& shape, int torus_charts = 3);
  const FlagShape& shape() const { return chart_.chart().shape(); }
  const FMinusFunction& chart_function() const { return chart_; }
  std::vector<CritPoint> solve(const std::vector<std::complex<double>>& q, const CritConfig& cfg = {},
                               CritStats* stats = nullptr) const;

 private:
  FMinusFunction chart_;
  std::vector<FMinusFunction> tori_;
};

// Critical points of F_- at fixed q, deduplicated and sorted by value. Multiplicities sum to
// the expected count when the solve is complete.
std::vector<CritPoint> find_critical_points(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                                            const CritConfig& cfg = {}, CritStats* stats = nullptr);

int total_multiplicity(const std::vector<CritPoint>& points);

// Spread of the diagonals of t * L(z), relative to its norm; zero exactly on Toeplitz matrices.
double toeplitz_residual(const CMatrix& z, const FlagShape& shape, const std::vector<std::complex<double>>& q);
// Block-constant diagonal t with t_n = 1 and t_{n_j} / t_{n_j+1} = q_j.
CVector toeplitz_torus(const FlagShape& shape, const std::vector<std::complex<double>>& q);

nlohmann::json crit_report(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                           const std::vector<CritPoint>& points, const CritStats& stats);

}  // namespace flagmirror
