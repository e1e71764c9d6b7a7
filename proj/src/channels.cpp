#include "qlock/channels.hpp"

#include <string>

namespace qlock {

namespace {

void check_index(const DensityOperator& rho, int k) {
  if (k < 0 || k >= static_cast<int>(rho.num_subsystems())) {
    throw InvalidArgument("subsystem index " + std::to_string(k) + " out of range");
  }
}

void check_qubit(const DensityOperator& rho, int k) {
  check_index(rho, k);
  if (rho.dims()[k] != 2) {
    throw InvalidArgument("subsystem " + std::to_string(k) + " is not a qubit");
  }
}

// Digit of factor k in every basis index.
std::vector<int> digits_of(const Dims& dims, int k) {
  std::size_t right = 1;
  for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
  const std::size_t total = total_dimension(dims);
  std::vector<int> out(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    out[idx] = static_cast<int>((idx / right) % dims[k]);
  }
  return out;
}

// Runs rho through sum_i |i><i|_anc (x) U_i on an ancilla prepared in the
// maximally mixed state of dimension `controls.size()`, then traces the
// ancilla.
DensityOperator controlled_random_unitary(const DensityOperator& rho, int k,
                                          const std::vector<Matrix>& controls,
                                          const Dims& ancilla_dims) {
  const int anc_dim = static_cast<int>(controls.size());
  const DensityOperator ancilla = DensityOperator::trusted(
      Matrix::Identity(anc_dim, anc_dim) / anc_dim, ancilla_dims,
      Parties(ancilla_dims.size(), Party::A));
  const DensityOperator joint = tensor(ancilla, rho);

  const int n = rho.dim();
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(anc_dim) * n,
                          static_cast<Eigen::Index>(anc_dim) * n);
  for (int i = 0; i < anc_dim; ++i) {
    u.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(i) * n, n, n) =
        embed_local(controls[i], k, rho.dims());
  }
  Matrix out = u * joint.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  const DensityOperator evolved =
      DensityOperator::trusted(std::move(out), joint.dims(), joint.party());

  std::vector<int> drop;
  for (std::size_t i = 0; i < ancilla_dims.size(); ++i) drop.push_back(static_cast<int>(i));
  return partial_trace(evolved, drop);
}

}  // namespace

const std::vector<Matrix>& pauli_matrices() {
  static const std::vector<Matrix> paulis = [] {
    Matrix i2 = Matrix::Identity(2, 2);
    Matrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    z << 1, 0, 0, -1;
    return std::vector<Matrix>{i2, x, y, z};
  }();
  return paulis;
}

DensityOperator dephase_subsystem(const DensityOperator& rho, int k) {
  check_index(rho, k);
  const auto digit = digits_of(rho.dims(), k);
  Matrix m = rho.matrix();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (digit[i] != digit[j]) m(i, j) = 0.0;
    }
  }
  return DensityOperator::trusted(std::move(m), rho.dims(), rho.party());
}

MeasurementOutcomeSet measure_subsystem(const DensityOperator& rho, int k) {
  check_index(rho, k);
  if (rho.num_subsystems() < 2) {
    throw InvalidArgument("measured subsystem must leave something behind");
  }
  const int dk = rho.dims()[k];
  MeasurementOutcomeSet result;
  result.subsystem = k;
  result.subsystem_dim = dk;
  result.subsystem_party = rho.party()[k];

  const std::vector<int> drop = {k};
  for (int outcome = 0; outcome < dk; ++outcome) {
    const Matrix proj = embed_local(basis_projector(dk, outcome, outcome), k, rho.dims());
    const Matrix branch = proj * rho.matrix() * proj;
    const double p = branch.trace().real();
    if (p < kOutcomePruneThreshold) continue;
    const HermitianOperator unnormalised(0.5 * (branch + branch.adjoint()), rho.dims(),
                                         rho.party());
    const HermitianOperator reduced = partial_trace(unnormalised, drop);
    result.outcomes.push_back(
        {outcome, p,
         DensityOperator::trusted(reduced.matrix() / p, reduced.dims(), reduced.party())});
  }
  return result;
}

DensityOperator MeasurementOutcomeSet::recombine() const {
  if (outcomes.empty()) throw InvalidArgument("no outcomes to recombine");
  const DensityOperator& first = outcomes.front().state;
  Dims dims = first.dims();
  dims.insert(dims.begin() + subsystem, subsystem_dim);
  Parties party = first.party();
  party.insert(party.begin() + subsystem, subsystem_party);

  Matrix sum = Matrix::Zero(first.dim() * subsystem_dim, first.dim() * subsystem_dim);
  for (const auto& o : outcomes) {
    const DensityOperator flag = DensityOperator::trusted(
        basis_projector(subsystem_dim, o.outcome, o.outcome), {subsystem_dim},
        {subsystem_party});
    sum += o.probability * insert_subsystem(o.state, flag, subsystem).matrix();
  }
  return DensityOperator::trusted(std::move(sum), std::move(dims), std::move(party));
}

DensityOperator pauli_twirl_qubit(const DensityOperator& rho, int k) {
  check_qubit(rho, k);
  if (rho.num_subsystems() == 1) {
    return DensityOperator::trusted(Matrix::Identity(2, 2) / 2.0, rho.dims(), rho.party());
  }
  const std::vector<int> drop = {k};
  const DensityOperator rest = partial_trace(rho, drop);
  const DensityOperator mixed = DensityOperator::trusted(Matrix::Identity(2, 2) / 2.0, {2},
                                                         {rho.party()[k]});
  return insert_subsystem(rest, mixed, k);
}

DensityOperator ancilla_dephasing_circuit(const DensityOperator& rho, int k) {
  check_qubit(rho, k);
  const auto& p = pauli_matrices();
  return controlled_random_unitary(rho, k, {p[0], p[3]}, {2});
}

DensityOperator ancilla_twirl_circuit(const DensityOperator& rho, int k) {
  check_qubit(rho, k);
  return controlled_random_unitary(rho, k, pauli_matrices(), {2, 2});
}

}  // namespace qlock
