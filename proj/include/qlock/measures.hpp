#pragma once

// Entropies (in bits) and directly computable entanglement quantities.

#include <span>
#include <string>
#include <vector>

#include "qlock/densop.hpp"

namespace qlock {

/// Probability vector summing to one within 1e-10.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> probabilities);
  static Spectrum of(const DensityOperator& rho);

  const std::vector<double>& probabilities() const noexcept { return p_; }
  std::size_t size() const noexcept { return p_.size(); }

 private:
  std::vector<double> p_;
};

struct EnsembleMember {
  double probability = 0.0;
  DensityOperator state;
};

/// Probabilities summing to one over states on a common space.
using Ensemble = std::vector<EnsembleMember>;

void check_ensemble(const Ensemble& ensemble);
DensityOperator ensemble_average(const Ensemble& ensemble);

double shannon_entropy(const Spectrum& p);
double von_neumann_entropy(const DensityOperator& rho);

/// (1/(1-alpha)) log2 sum_i p_i^alpha for alpha in [0, 1).
double renyi_entropy(const Spectrum& p, double alpha);
double renyi_entropy(const DensityOperator& rho, double alpha);

/// Tr rho (log2 rho - log2 sigma); +infinity when the support of rho is not
/// contained in the support of sigma.
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

double log_negativity(const DensityOperator& rho, const BipartiteCut& cut);
double log_negativity(const DensityOperator& rho);  // cut from party labels

struct PptResult {
  bool is_ppt = false;
  double min_eigenvalue = 0.0;
};

PptResult ppt_check(const DensityOperator& rho, const BipartiteCut& cut);
PptResult ppt_check(const DensityOperator& rho);

/// Wootters concurrence of a state with dims [2, 2].
double concurrence_two_qubit(const DensityOperator& rho);

/// Closed-form entanglement of formation of a state with dims [2, 2].
double eof_two_qubit(const DensityOperator& rho);

/// Binary entropy h(x) in bits.
double binary_entropy(double x);

/// S(sum_i p_i rho_i) - sum_i p_i S(rho_i).
double mixing_gap(const Ensemble& ensemble);

/// Entropy of the reduced state on the A-side of the cut.
double marginal_entropy(const DensityOperator& rho, const BipartiteCut& cut);

}  // namespace qlock
