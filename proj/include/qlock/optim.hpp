#pragma once

// Numerical optimizers for entanglement quantities that have no closed form:
//
//  * convex_roof_upper: upper bound on a convex-roof measure (entanglement of
//    formation, or the Renyi-alpha roof). Ensembles realizing the state are
//    generated by measurements on a purification, i.e. by m x r isometries
//    acting on the scaled eigenvectors of the state; the average marginal
//    entropy is minimized over the Stiefel manifold with Riemannian conjugate
//    gradients and random restarts.
//
//  * rel_ent_ppt: relative entropy to the set of states with a positive
//    partial transpose, minimized by spectral projected gradient descent.
//    The PPT set contains the separable states, so the value lower-bounds the
//    relative entropy of entanglement, with equality in 2x2 and 2x3.

#include <cstdint>
#include <string>
#include <vector>

#include "qlock/densop.hpp"
#include "qlock/measures.hpp"

namespace qlock {

struct RoofObjective {
  enum class Kind { kVonNeumann, kRenyi };
  Kind kind = Kind::kVonNeumann;
  double alpha = 0.0;  // Renyi order, used when kind == kRenyi

  static RoofObjective von_neumann() { return {}; }
  static RoofObjective renyi(double alpha);

  /// Entropy of a (reduced) state under this objective.
  double entropy(const Spectrum& spectrum) const;
  std::string name() const;
};

struct RoofSettings {
  RoofObjective objective;
  int ensemble_size = 0;  // 0 selects rank + 2
  int restarts = 16;
  int iterations = 500;
  double tolerance = 1e-7;  // on successive objective decrease
  std::uint64_t seed = 42;
  int threads = 1;  // restarts evaluated concurrently, result order-independent
};

struct RoofProblem {
  DensityOperator state;
  BipartiteCut cut;
  RoofSettings settings;
};

struct RoofResult {
  double value = 0.0;             // average marginal entropy of `ensemble`
  Ensemble ensemble;              // pure members in the state's own layout
  bool converged = false;         // best restart met the tolerance
  int best_restart = 0;
  std::vector<double> history;    // objective per iteration, best restart
  double reconstruction_error = 0.0;
};

RoofResult convex_roof_upper(const RoofProblem& problem);

/// Convenience: cut from the party labels.
RoofResult convex_roof_upper(const DensityOperator& state, const RoofSettings& settings);

struct RexSettings {
  int max_iterations = 5000;
  double tolerance = 1e-8;  // on successive objective decrease
  std::uint64_t seed = 42;
};

struct RexProblem {
  DensityOperator state;
  BipartiteCut cut;
  RexSettings settings;
};

struct RexResult {
  double value = 0.0;
  DensityOperator closest_state;
  bool converged = false;
  int iterations = 0;
  double ppt_min_eigenvalue = 0.0;  // of closest_state's partial transpose
};

RexResult rel_ent_ppt(const RexProblem& problem);
RexResult rel_ent_ppt(const DensityOperator& state, const RexSettings& settings);

struct ErDropResult {
  double before = 0.0;
  double after_measurement = 0.0;
  double after_twirl = 0.0;
  double measurement_drop = 0.0;
  double twirl_drop = 0.0;
  bool converged = false;
};

/// PPT relative entropy before and after dephasing qubit `qubit` and after
/// replacing it with the maximally mixed state. The qubit must belong to A.
ErDropResult er_drop_experiment(const DensityOperator& rho, int qubit,
                                const RexSettings& settings);

struct FlagAdditivity {
  double flagged = 0.0;
  double first = 0.0;
  double second = 0.0;
  double slack = 0.0;  // |flagged - p first - (1-p) second|
};

/// Roof of p rho (x) |0><0| + (1-p) rho_tilde (x) |1><1| against the
/// weighted roofs of its branches, all three by convex_roof_upper.
FlagAdditivity flag_additivity_check(const DensityOperator& rho,
                                     const DensityOperator& rho_tilde, double p,
                                     const RoofSettings& settings);

struct LockingGap {
  double flagged_value = 0.0;   // roof of the flagged state
  double reduced_upper = 0.0;   // upper bound on the roof after dropping the flag
  double gap = 0.0;             // flagged_value - reduced_upper
  bool certified = false;       // flagged_value is exact, so gap is a lower bound
};

/// Locking gap of (1-eps) rho1 (x) |0><0| + eps gamma1 (x) |1><1| when the
/// flag qubit is discarded. The flagged roof is the weighted average of the
/// branch roofs; branches are evaluated exactly when pure (marginal entropy)
/// or, for the von Neumann objective on two qubits, by the concurrence
/// formula. Other branches fall back to convex_roof_upper and the result is
/// marked uncertified.
LockingGap locking_gap_lower_bound(const DensityOperator& rho1,
                                   const DensityOperator& gamma1, double eps,
                                   const RoofSettings& settings);

}  // namespace qlock
