#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <vector>

#include "flagmirror/combinat.hpp"
#include "flagmirror/schubring.hpp"

namespace flagmirror {

// QH*(Fl(n_1,...,n_r;n)) in the Schubert basis over W^P. Quantum parameter j-1 of a
// QHClass is q_{n_j}.
class PartialRing {
 public:
  struct Entry {
    int target;
    std::vector<int> qexp;  // size r
  };
  explicit PartialRing(FlagShape shape);

  const FlagShape& shape() const { return shape_; }
  const std::vector<Perm>& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }
  int index(const Perm& w) const;
  // Column w of multiplication by sigma_{s_{n_j}}, j in 1..r.
  const std::vector<std::vector<Entry>>& chevalley(int j) const { return ops_[j - 1]; }
  QHClass multiply(const Perm& w, int j) const;
  // Matrix of multiplication by sigma_{s_{n_j}} at numeric q (column convention).
  Eigen::MatrixXcd matrix(int j, const std::vector<std::complex<double>>& q) const;
  Eigen::MatrixXcd c1_matrix(const std::vector<std::complex<double>>& q) const;

 private:
  FlagShape shape_;
  std::vector<Perm> basis_;
  std::map<Perm, int> index_;
  std::vector<std::vector<std::vector<Entry>>> ops_;
};

// Quantum Chevalley rule: sigma_{s_{n_j}} * sigma_w for w in W^P.
QHClass chevalley_multiply(const Perm& w, int j, const FlagShape& shape);
// sum_j (n_{j+1} - n_{j-1}) sigma_{s_{n_j}}
QHClass c1_class(const FlagShape& shape);
std::vector<std::complex<double>> c1_spectrum(const FlagShape& shape, const std::vector<std::complex<double>>& q);
std::vector<std::string> partial_q_names(const FlagShape& shape);

nlohmann::json spectrum_report(const FlagShape& shape, const std::vector<std::complex<double>>& q,
                               const std::vector<std::complex<double>>& eigenvalues);

}  // namespace flagmirror
