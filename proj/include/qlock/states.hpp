#pragma once

// Factories for the explicit states used in the locking experiments. Every
// factory returns a validated DensityOperator whose party labels define the
// natural A:B cut.

#include <cstddef>
#include <utility>

#include "qlock/densop.hpp"

namespace qlock {

/// Correlated-basis size d and the d x d unitary whose transpose sits in the
/// off-diagonal qubit block of the locking state.
struct LockingFamilyParams {
  int d = 2;
  Matrix u;

  /// u = H^{\otimes log2 d}; d must be a power of two.
  static LockingFamilyParams hadamard(int d);
  void check() const;
};

/// Which block layout to use for the flower state.
enum class FlowerForm {
  /// Qubit-diagonal blocks tau_0^{n}, tau_1^{n}; off-diagonal blocks
  /// alpha^n (tau_1^G - tau_0^G)^{n}. Dephasing Alice's qubit leaves
  /// (1/2) sum_i |ii><ii| (x) tau_i^{n}.
  kSeparateBranches,
  /// Both diagonal blocks tau_0^{n}; off-diagonal blocks
  /// alpha^n (tau_0^G - tau_1^G)^{n}. Kept for comparison only.
  kSymmetricBlocks,
};

struct FlowerFamilyParams {
  int d = 2;   // local Werner dimension
  int l = 2;   // copies inside each hiding state
  int n = 1;   // tensor power of the key part
  double alpha = 1.0;
  FlowerForm form = FlowerForm::kSeparateBranches;

  void check() const;
};

/// (1/d) sum_i |ii><ii| on C^d (x) C^d.
DensityOperator max_correlated(int d);

/// Projector onto (1/sqrt d) sum_i |ii>.
DensityOperator bell_state(int d);

/// H^{\otimes k}, a real orthogonal matrix of size 2^k.
Matrix hadamard_power(int k);

/// State on (C^2 (x) C^d)_A (x) (C^2 (x) C^d)_B, dims [2, d, 2, d] and
/// parties [A, A, B, B]. Qubit blocks 00 and 11 carry sigma/2; the 00-11
/// block carries (1/2d) sum_ij u_ji |ii><jj| and its adjoint mirrors it.
DensityOperator locking_state(const LockingFamilyParams& params);

/// Pure state on A (x) B (x) E, dims [2, d, 2, d, d], whose E-marginal
/// complement reproduces locking_state exactly. The second branch carries
/// u^dagger|i> on E so the reduced off-diagonal block is u^T.
DensityOperator locking_purification(const LockingFamilyParams& params);

/// Normalised symmetric and antisymmetric projectors on C^d (x) C^d.
std::pair<DensityOperator, DensityOperator> werner_projector_states(int d);

/// tau_0 = rho_s^{(x) l}, tau_1 = ((rho_s + rho_a)/2)^{(x) l}, with the l
/// A-factors grouped before the l B-factors.
std::pair<DensityOperator, DensityOperator> hiding_pair(
    int d, int l, std::size_t dimension_cap = default_dimension_cap());

/// The flower block operator without the positivity check; same layout as
/// flower_state.
HermitianOperator flower_operator(const FlowerFamilyParams& params,
                                  std::size_t dimension_cap = default_dimension_cap());

/// Flower state on (C^2 (x) (C^{d^l})^{(x) n}) per party; subsystem order is
/// [A qubit, A hiding factors..., B qubit, B hiding factors...]. Throws
/// InvalidState with the minimum eigenvalue if the requested alpha does not
/// give a positive operator.
DensityOperator flower_state(const FlowerFamilyParams& params,
                             std::size_t dimension_cap = default_dimension_cap());

/// The separable state (1/2) sum_i |i><i|_A (x) |i><i|_B (x) tau_i^{(x) n},
/// laid out like flower_state.
DensityOperator flower_dephased_reference(
    const FlowerFamilyParams& params,
    std::size_t dimension_cap = default_dimension_cap());

/// p rho (x) |0><0| + (1-p) rho_tilde (x) |1><1|, the flag qubit appended as
/// the last subsystem and assigned to party A.
DensityOperator flag_mixture(const DensityOperator& rho,
                             const DensityOperator& rho_tilde, double p);

struct FlaggedPair {
  DensityOperator flagged;  // (1-eps) rho1 (x) |0><0| + eps gamma1 (x) |1><1|
  DensityOperator reduced;  // (1-eps) rho1 + eps gamma1
};

FlaggedPair flagged_pair(const DensityOperator& rho1, const DensityOperator& gamma1,
                         double eps);

}  // namespace qlock
