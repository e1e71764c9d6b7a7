#include <doctest.h>

#include "qlock/channels.hpp"
#include "qlock/measures.hpp"
#include "qlock/random.hpp"
#include "qlock/states.hpp"
#include "testing.hpp"

using namespace qlock;
using qlock::testing::digits;

namespace {

// Keeps only entries whose digit k agrees between row and column.
Matrix pinch_oracle(const Matrix& m, const Dims& dims, int k) {
  Matrix out = m;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (digits(i, dims)[k] != digits(j, dims)[k]) out(i, j) = 0.0;
  return out;
}

// (I/2 on qubit k) (x) Tr_k rho, assembled element-wise.
Matrix twirl_oracle(const Matrix& m, const Dims& dims, int k) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      auto di = digits(i, dims);
      auto dj = digits(j, dims);
      if (di[k] != dj[k]) continue;
      std::complex<double> sum = 0.0;
      for (int q = 0; q < 2; ++q) {
        di[k] = dj[k] = q;
        sum += m(qlock::testing::undigits(di, dims), qlock::testing::undigits(dj, dims));
      }
      out(i, j) = 0.5 * sum;
    }
  }
  return out;
}

DensityOperator plus_state() {
  Matrix m = Matrix::Constant(2, 2, 0.5);
  return DensityOperator(m, {2}, {Party::A});
}

}  // namespace

TEST_CASE("dephasing zeroes coherences of one factor") {
  CHECK(max_abs_diff(dephase_subsystem(plus_state(), 0).matrix(), Matrix::Identity(2, 2) / 2.0) ==
        0.0);
  const DensityOperator diag = max_correlated(3);
  CHECK(max_abs_diff(dephase_subsystem(diag, 1).matrix(), diag.matrix()) == 0.0);

  Rng rng(21);
  const Dims dims = {2, 3, 2};
  const DensityOperator rho = random_density(dims, {Party::A, Party::B, Party::B}, 4, rng);
  for (int k = 0; k < 3; ++k) {
    const DensityOperator out = dephase_subsystem(rho, k);
    CHECK(max_abs_diff(out.matrix(), pinch_oracle(rho.matrix(), dims, k)) == 0.0);
    CHECK(max_abs_diff(dephase_subsystem(out, k).matrix(), out.matrix()) == 0.0);
    CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(max_abs_diff(dephase_subsystem(dephase_subsystem(rho, 0), 2).matrix(),
                     dephase_subsystem(dephase_subsystem(rho, 2), 0).matrix()) == 0.0);
  CHECK_THROWS_AS(dephase_subsystem(rho, 3), InvalidArgument);
}

TEST_CASE("dephasing Alice's qubit removes locking-state negativity") {
  for (int d : {2, 4, 8}) {
    const DensityOperator rho = locking_state(LockingFamilyParams::hadamard(d));
    const DensityOperator out = dephase_subsystem(rho, 0);
    CHECK(std::abs(log_negativity(out)) < 1e-10);
    CHECK(ppt_check(out).is_ppt);
  }
}

TEST_CASE("computational-basis measurement") {
  const DensityOperator zero(basis_projector(2, 0, 0), {2}, {Party::A});
  const DensityOperator zz = tensor(zero, DensityOperator(basis_projector(2, 1, 1), {2}, {Party::B}));
  const MeasurementOutcomeSet one = measure_subsystem(zz, 0);
  REQUIRE(one.outcomes.size() == 1);
  CHECK(one.outcomes[0].probability == doctest::Approx(1.0));
  CHECK(one.outcomes[0].outcome == 0);

  const DensityOperator mixed(Matrix::Identity(4, 4) / 4.0, {2, 2}, {Party::A, Party::B});
  const MeasurementOutcomeSet two = measure_subsystem(mixed, 1);
  REQUIRE(two.outcomes.size() == 2);
  CHECK(two.outcomes[0].probability == doctest::Approx(0.5));
  CHECK(two.outcomes[1].probability == doctest::Approx(0.5));
  CHECK(two.outcomes[0].state.dims() == Dims{2});

  Rng rng(22);
  const DensityOperator rho = random_density({3, 2, 2}, {Party::A, Party::B, Party::A}, 3, rng);
  for (int k = 0; k < 3; ++k) {
    const MeasurementOutcomeSet set = measure_subsystem(rho, k);
    double total = 0.0;
    for (const auto& o : set.outcomes) {
      total += o.probability;
      CHECK(o.state.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(set.recombine().matrix(), dephase_subsystem(rho, k).matrix()) < 1e-14);
  }
}

TEST_CASE("measuring the flower qubit leaves the separable block mixture") {
  for (int n : {1, 2}) {
    const FlowerFamilyParams p{2, 2, n, 0.9, FlowerForm::kSeparateBranches};
    const HermitianOperator op = flower_operator(p);
    const DensityOperator as_matrix = DensityOperator::trusted(op.matrix(), op.dims(), op.party());
    const DensityOperator ref = flower_dephased_reference(p);
    CHECK(max_abs_diff(dephase_subsystem(as_matrix, 0).matrix(), ref.matrix()) < 1e-12);
    CHECK(std::abs(log_negativity(ref)) < 1e-10);
    CHECK(ppt_check(ref).is_ppt);
  }
}

TEST_CASE("Pauli twirl equals the replace-by-I/2 formula") {
  CHECK(max_abs_diff(pauli_twirl_qubit(plus_state(), 0).matrix(), Matrix::Identity(2, 2) / 2.0) <
        1e-15);
  Rng rng(23);
  const Dims dims = {2, 2, 2};
  const Parties party = {Party::A, Party::A, Party::B};
  for (int s = 0; s < 10; ++s) {
    const DensityOperator rho = random_density(dims, party, 1 + s % 8, rng);
    for (int k = 0; k < 3; ++k) {
      CHECK(max_abs_diff(pauli_twirl_qubit(rho, k).matrix(), twirl_oracle(rho.matrix(), dims, k)) <
            1e-12);
    }
  }
  const DensityOperator q = random_density({2}, {Party::A}, 2, rng);
  const DensityOperator rest = random_density({3}, {Party::B}, 2, rng);
  const DensityOperator mixed(Matrix::Identity(2, 2) / 2.0, {2}, {Party::A});
  CHECK(max_abs_diff(pauli_twirl_qubit(tensor(q, rest), 0).matrix(),
                     tensor(mixed, rest).matrix()) < 1e-15);
  CHECK_THROWS_AS(pauli_twirl_qubit(rest, 0), InvalidArgument);
}

TEST_CASE("ancilla circuits reproduce dephasing and twirling") {
  CHECK(max_abs_diff(ancilla_dephasing_circuit(plus_state(), 0).matrix(),
                     Matrix::Identity(2, 2) / 2.0) < 1e-15);
  const DensityOperator zero(basis_projector(2, 0, 0), {2}, {Party::A});
  CHECK(max_abs_diff(ancilla_twirl_circuit(zero, 0).matrix(), Matrix::Identity(2, 2) / 2.0) <
        1e-15);
  const DensityOperator diag = max_correlated(2);
  CHECK(max_abs_diff(ancilla_dephasing_circuit(diag, 1).matrix(), diag.matrix()) < 1e-15);

  double dephase_err = 0.0;
  double twirl_err = 0.0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(derive_seed(24, s));
    const DensityOperator rho = random_density({2, 2}, {Party::A, Party::B}, 1 + s % 4, rng);
    for (int k = 0; k < 2; ++k) {
      dephase_err = std::max(dephase_err, max_abs_diff(ancilla_dephasing_circuit(rho, k).matrix(),
                                                       dephase_subsystem(rho, k).matrix()));
      twirl_err = std::max(twirl_err, max_abs_diff(ancilla_twirl_circuit(rho, k).matrix(),
                                                   pauli_twirl_qubit(rho, k).matrix()));
    }
    const DensityOperator tw = pauli_twirl_qubit(rho, 0);
    CHECK(max_abs_diff(dephase_subsystem(tw, 0).matrix(), tw.matrix()) < 1e-15);
  }
  CHECK(dephase_err <= 1e-12);
  CHECK(twirl_err <= 1e-12);
  CHECK_THROWS_AS(ancilla_dephasing_circuit(max_correlated(3), 0), InvalidArgument);
  CHECK_THROWS_AS(ancilla_twirl_circuit(max_correlated(3), 1), InvalidArgument);
}

TEST_CASE("Pauli matrices") {
  const auto& p = pauli_matrices();
  REQUIRE(p.size() == 4);
  for (int i = 1; i < 4; ++i) {
    CHECK(max_abs_diff(p[i] * p[i], Matrix::Identity(2, 2)) < 1e-15);
    CHECK(std::abs(p[i].trace()) < 1e-15);
  }
  CHECK(max_abs_diff(p[1] * p[2], std::complex<double>(0, 1) * p[3]) < 1e-15);
}
