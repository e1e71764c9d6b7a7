#pragma once

// Single-subsystem channels: computational-basis dephasing and measurement,
// the qubit Pauli twirl, and their explicit ancilla-circuit realizations.
// Measurement in another basis is obtained by conjugating the state with a
// local unitary (apply_local) first.

#include <vector>

#include "qlock/densop.hpp"

namespace qlock {

struct MeasurementOutcome {
  int outcome = 0;        // computational-basis label of the measured factor
  double probability = 0.0;
  DensityOperator state;  // conditional state with the measured factor removed
};

struct MeasurementOutcomeSet {
  int subsystem = 0;
  int subsystem_dim = 0;
  Party subsystem_party = Party::A;
  std::vector<MeasurementOutcome> outcomes;

  /// sum_i p_i |i><i| (x) rho_i, the measured factor re-inserted at its
  /// original position. Equals dephase_subsystem of the measured state.
  DensityOperator recombine() const;
};

/// Outcomes with probability below this threshold are dropped.
inline constexpr double kOutcomePruneThreshold = 1e-14;

/// Zeroes every coherence between distinct basis states of factor k.
DensityOperator dephase_subsystem(const DensityOperator& rho, int k);

MeasurementOutcomeSet measure_subsystem(const DensityOperator& rho, int k);

/// (I/2 on factor k) (x) Tr_k rho, factor k being a qubit.
DensityOperator pauli_twirl_qubit(const DensityOperator& rho, int k);

/// Ancilla I/2, controlled-{I, Z} onto qubit k, ancilla traced out.
DensityOperator ancilla_dephasing_circuit(const DensityOperator& rho, int k);

/// Two-qubit ancilla (I/2)^{(x)2}, controlled-{I, X, Y, Z} onto qubit k,
/// ancillas traced out.
DensityOperator ancilla_twirl_circuit(const DensityOperator& rho, int k);

/// The four single-qubit Pauli matrices I, X, Y, Z.
const std::vector<Matrix>& pauli_matrices();

}  // namespace qlock
