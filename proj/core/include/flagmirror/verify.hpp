#pragma once

#include <nlohmann/json.hpp>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagmirror/combinat.hpp"
#include "flagmirror/crit.hpp"
#include "flagmirror/mirror.hpp"
#include "flagmirror/schubring.hpp"

namespace flagmirror {

// One line of a verification report.
struct CheckRecord {
  std::string kind;
  std::string subject;
  bool passed = false;
  double residual = 0;  // 0 for exact checks that pass
  double seconds = 0;
  nlohmann::json details;
};

std::string markdown_report(const std::vector<CheckRecord>& records, const std::string& title);
nlohmann::json json_report(const std::vector<CheckRecord>& records);

// ---------------------------------------------------------------- key identity

struct KeyIdentityTerm {
  std::vector<int> J;
  int sign;                // (-1)^{sum J}
  std::optional<Perm> wJ;  // absent: the term is zero
  Perm grassmannian;       // sigma_{[1, n_j + d] - J}
  QHClass product;         // in QH*(Fl_n)
};

struct KeyIdentityReport {
  FlagShape shape;
  int j = 0, i = 0, d = 0;
  std::vector<KeyIdentityTerm> terms;
  QHClass residue;
  // The quantum part of sigma_{J u [i+1,n]} * sigma_{s_{n_{j+1}}} in QH*(X) is q_{n_{j+1}} sigma_{w_J}
  // (zero when w_J is undefined), for every J.
  bool quantum_parts_match = false;
  double seconds = 0;
  bool passed() const { return residue.is_zero() && quantum_parts_match; }
  CheckRecord record() const;
};

struct IdentityViolation : std::runtime_error {
  KeyIdentityReport report;
  explicit IdentityViolation(KeyIdentityReport r);
};

// Sum over Xi of (-1)^{|J|} sigma_{w_J} sigma_{[1,n_j+d] - J} in QH*(Fl_n), which must vanish
// exactly. Throws IdentityViolation otherwise, and std::invalid_argument for illegal (j, i).
KeyIdentityReport check_key_identity(const FlagShape& shape, int j, int i);
// Every legal (shape, j, i) with n <= max_n, in parallel; violations are returned, not thrown.
std::vector<KeyIdentityReport> key_identity_sweep(int max_n, int threads = 0);

// ---------------------------------------------------------------- determinantal formula

struct DetFormulaEntry {
  Perm w;
  SkewShape skew;
  bool passed = false;
  QHClass residue;  // normal form of the determinant minus sigma_w
};

struct DetFormulaReport {
  int n = 0;
  std::vector<DetFormulaEntry> entries;  // every 321-avoiding w in S_n
  double seconds = 0;
  bool passed() const;
  CheckRecord record() const;
};

struct FormulaViolation : std::runtime_error {
  DetFormulaReport report;
  explicit FormulaViolation(DetFormulaReport r);
};

// Throws FormulaViolation when some determinant differs from its quantum Schubert class, and
// std::invalid_argument outside 2 <= n <= 5.
DetFormulaReport check_det_formula(int n);

// ---------------------------------------------------------------- mirror spectrum

// Minimum-cost assignment of rows to columns (rows <= columns); result[row] = column.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

struct MirrorSpectrumReport {
  FlagShape shape;
  std::vector<std::complex<double>> q;
  std::vector<std::complex<double>> eigenvalues;      // A
  std::vector<std::complex<double>> critical_values;  // B, with multiplicity
  std::vector<std::pair<int, int>> pairs;             // (index in A, index in B)
  std::vector<int> unmatched_eigenvalues, unmatched_critical_values;
  double max_distance = 0, tolerance = 0;
  CritStats crit_stats;
  double seconds = 0;
  bool passed() const;
  CheckRecord record() const;
};

// PASS iff |A| = |B| and the optimal matching has max distance < 1e-6 (1 + max modulus).
MirrorSpectrumReport check_mirror_spectrum(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                                           const CritConfig& cfg = {});
MirrorSpectrumReport compare_spectra(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                                     std::vector<std::complex<double>> eigenvalues,
                                     std::vector<std::complex<double>> critical_values);

// ---------------------------------------------------------------- tau symmetry

// tau(g) = w0 (g^{-1})^T w0^{-1} with the signed representative of w0.
CMatrix tau(const CMatrix& g);
// Representative of the longest element, dot_word of a reduced word of w0.
CMatrix w0_dot(int n);
// G_i^m(g B_-) = Delta^{{m-i+1} u [m+2,n]}_{[m+1,n]}(g) / Delta^{[m+1,n]}_{[m+1,n]}(g), rows above.
std::complex<double> g_function(const CMatrix& g, int m, int i);
// The shape with steps n - n_r < ... < n - n_1.
FlagShape complementary_shape(const FlagShape& shape);

struct TauReport {
  FlagShape shape, complementary;
  int samples = 0;
  double involution = 0;      // |tau(tau(g)) - g| / |g|
  double unipotent = 0;       // distance of tau(u) from U_+
  double superdiagonal = 0;   // |tau(u)_{n-i,n-i+1} - u_{i,i+1}|
  double g_symmetry = 0;      // |G_1^{n-m}(tau(b_-) w0) - G_1^m(b_- w0)|, relative
  double coset = 0;           // change of G_1^m under g -> g b for random b in B_-, relative
  double tolerance = 1e-9;
  double seconds = 0;
  bool passed() const;
  CheckRecord record() const;
};

// Samples z in the chart of shape, u from z = L u, and b_- = t L with random diagonal t.
TauReport check_tau_symmetry(const FlagShape& shape, int samples, std::uint64_t seed = 1);

// At critical points: u_{i,i+1} = -(G_1^{n_j} + G_1^{n_{j+1}}) (b_- w0) for n - n_{j+1} < i < n - n_j,
// with G_1^{n_{r+1}} read as 0, and b_- = t L(z) for the Toeplitz torus t.
struct UMiddleReport {
  FlagShape shape;
  std::vector<std::complex<double>> q;
  int points = 0, checks = 0;
  double max_residual = 0, tolerance = 1e-7;
  double seconds = 0;
  bool passed() const { return max_residual < tolerance; }
  CheckRecord record() const;
};
UMiddleReport check_u_middle(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                             const CritConfig& cfg = {});

}  // namespace flagmirror
