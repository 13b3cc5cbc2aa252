#include "flagmirror/qhpartial.hpp"

#include <algorithm>
#include <stdexcept>

namespace flagmirror {

namespace {

// Terms (target, degree vector) of sigma_{s_{n_j}} * sigma_w.
std::vector<std::pair<Perm, std::vector<int>>> chevalley_terms(const Perm& w, int j, const FlagShape& shape) {
  int n = shape.n(), r = shape.r(), nj = shape.step(j), lw = length(w);
  std::vector<std::pair<Perm, std::vector<int>>> out;
  for (int a = 1; a <= nj; ++a)
    for (int b = nj + 1; b <= n; ++b) {
      Perm t = swap_positions(w, a, b);
      int lt = length(t);
      if (lt == lw + 1) {
        if (shape.in_WP(t)) out.emplace_back(t, std::vector<int>(r, 0));
        continue;
      }
      std::vector<int> d(r, 0);
      int c1 = 0;
      for (int m = 1; m <= r; ++m)
        if (a <= shape.step(m) && shape.step(m) < b) {
          d[m - 1] = 1;
          c1 += shape.qdeg(m);
        }
      Perm rep = shape.minimal_rep(t);
      if (length(rep) == lw + 1 - c1) out.emplace_back(rep, d);
    }
  return out;
}

}  // namespace

PartialRing::PartialRing(FlagShape shape) : shape_(std::move(shape)), basis_(shape_.minimal_reps()) {
  for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = static_cast<int>(i);
  ops_.resize(shape_.r());
  for (int j = 1; j <= shape_.r(); ++j) {
    auto& op = ops_[j - 1];
    op.resize(basis_.size());
    for (std::size_t c = 0; c < basis_.size(); ++c)
      for (auto& [t, d] : chevalley_terms(basis_[c], j, shape_)) op[c].push_back({index_.at(t), std::move(d)});
  }
}

int PartialRing::index(const Perm& w) const {
  auto it = index_.find(w);
  if (it == index_.end()) throw std::invalid_argument("PartialRing: not a minimal representative");
  return it->second;
}

QHClass PartialRing::multiply(const Perm& w, int j) const {
  QHClass out{shape_.r(), {}};
  for (const Entry& e : chevalley(j)[index(w)]) out.add(basis_[e.target], MPoly::monomial(e.qexp, 1));
  return out;
}

Eigen::MatrixXcd PartialRing::matrix(int j, const std::vector<std::complex<double>>& q) const {
  if (static_cast<int>(q.size()) != shape_.r()) throw std::invalid_argument("PartialRing: expected one q per step");
  int N = static_cast<int>(dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
  for (int c = 0; c < N; ++c)
    for (const Entry& e : chevalley(j)[c]) {
      std::complex<double> v = 1;
      for (int t = 0; t < shape_.r(); ++t)
        for (int p = 0; p < e.qexp[t]; ++p) v *= q[t];
      m(e.target, c) += v;
    }
  return m;
}

Eigen::MatrixXcd PartialRing::c1_matrix(const std::vector<std::complex<double>>& q) const {
  int N = static_cast<int>(dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 1; j <= shape_.r(); ++j) m += static_cast<double>(shape_.qdeg(j)) * matrix(j, q);
  return m;
}

QHClass chevalley_multiply(const Perm& w, int j, const FlagShape& shape) {
  if (!shape.in_WP(w)) throw std::invalid_argument("chevalley_multiply: not a minimal representative");
  if (j < 1 || j > shape.r()) throw std::invalid_argument("chevalley_multiply: step index out of range");
  QHClass out{shape.r(), {}};
  for (const auto& [t, d] : chevalley_terms(w, j, shape)) out.add(t, MPoly::monomial(d, 1));
  return out;
}

QHClass c1_class(const FlagShape& shape) {
  QHClass out{shape.r(), {}};
  for (int j = 1; j <= shape.r(); ++j)
    out.add(simple_reflection(shape.n(), shape.step(j)), MPoly::constant(shape.r(), shape.qdeg(j)));
  return out;
}

std::vector<std::complex<double>> c1_spectrum(const FlagShape& shape, const std::vector<std::complex<double>>& q) {
  for (const auto& v : q)
    if (v == std::complex<double>(0)) throw std::invalid_argument("c1_spectrum: q must be nonzero");
  PartialRing ring(shape);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(ring.c1_matrix(q), false);
  if (es.info() != Eigen::Success) throw std::runtime_error("c1_spectrum: eigenvalue iteration failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

std::vector<std::string> partial_q_names(const FlagShape& shape) {
  std::vector<std::string> names;
  for (int j = 1; j <= shape.r(); ++j) names.push_back("q" + std::to_string(shape.step(j)));
  return names;
}

nlohmann::json spectrum_report(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                               const std::vector<std::complex<double>>& eigenvalues) {
  auto pairs = [](const std::vector<std::complex<double>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
  };
  return {{"shape", shape.str()},
          {"q", pairs(q)},
          {"eigenvalues", pairs(eigenvalues)},
          {"dim", shape.euler_characteristic()}};
}

}  // namespace flagmirror
