#include <doctest.h>

#include <cmath>

#include "qlock/measures.hpp"
#include "qlock/random.hpp"
#include "qlock/states.hpp"
#include "testing.hpp"

using namespace qlock;
using qlock::testing::permute_oracle;

namespace {

// Locking state from its matrix elements, layout [qA, iA, qB, iB].
Matrix locking_oracle(const Matrix& u) {
  const int d = static_cast<int>(u.rows());
  const int n = 4 * d * d;
  auto index = [d](int qa, int ia, int qb, int ib) { return ((qa * d + ia) * 2 + qb) * d + ib; };
  Matrix m = Matrix::Zero(n, n);
  for (int q = 0; q < 2; ++q)
    for (int i = 0; i < d; ++i) m(index(q, i, q, i), index(q, i, q, i)) = 1.0 / (2.0 * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      m(index(0, i, 0, i), index(1, j, 1, j)) = u(j, i) / (2.0 * d);
      m(index(1, j, 1, j), index(0, i, 0, i)) = std::conj(u(j, i)) / (2.0 * d);
    }
  }
  return m;
}

Matrix swap_operator(int d) {
  Matrix f = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  return f;
}

// rho^{(x) l} on [A1, B1, A2, B2, ...] regrouped to [A1..Al, B1..Bl].
Matrix grouped_power(const Matrix& rho, int d, int l) {
  Matrix m = rho;
  for (int k = 1; k < l; ++k) m = kron(m, rho);
  std::vector<int> perm;
  for (int k = 0; k < l; ++k) perm.push_back(2 * k);
  for (int k = 0; k < l; ++k) perm.push_back(2 * k + 1);
  return permute_oracle(m, Dims(2 * l, d), perm);
}

// Transpose on the last `half` factors of `dims`.
Matrix transpose_second_half(const Matrix& m, const Dims& dims) {
  const int half = static_cast<int>(dims.size()) / 2;
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      auto di = qlock::testing::digits(i, dims);
      auto dj = qlock::testing::digits(j, dims);
      for (int k = half; k < 2 * half; ++k) std::swap(di[k], dj[k]);
      out(qlock::testing::undigits(di, dims), qlock::testing::undigits(dj, dims)) = m(i, j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("maximally correlated and maximally entangled states") {
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  CHECK(max_abs_diff(max_correlated(2).matrix(), expected) == 0.0);
  for (int d : {2, 3, 5}) {
    const DensityOperator s = max_correlated(d);
    CHECK(s.trace() == doctest::Approx(1.0));
    CHECK((eig_hermitian(s).values.array() > 1e-12).count() == d);
  }
  CHECK(ppt_check(max_correlated(3)).is_ppt);
  CHECK_THROWS_AS(max_correlated(1), InvalidArgument);

  const DensityOperator phi = bell_state(3);
  CHECK(max_abs_diff(partial_trace(phi, std::vector<int>{0}).matrix(),
                     Matrix::Identity(3, 3) / 3.0) < 1e-15);
  CHECK(std::abs((phi.matrix() * phi.matrix()).trace() - 1.0) < 1e-14);
  CHECK(log_negativity(bell_state(2)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Hadamard powers") {
  const Matrix h1 = hadamard_power(1);
  const double s = 1.0 / std::sqrt(2.0);
  Matrix ref(2, 2);
  ref << s, s, s, -s;
  CHECK(max_abs_diff(h1, ref) < 1e-15);
  for (int k = 2; k <= 3; ++k) {
    const Matrix h = hadamard_power(k);
    const double entry = std::pow(2.0, -k / 2.0);
    CHECK((h.cwiseAbs().array() - entry).abs().maxCoeff() < 1e-15);
    CHECK(h.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs_diff(h.adjoint() * h, Matrix::Identity(1 << k, 1 << k)) < 1e-14);
  }
}

TEST_CASE("locking state matches its element formula") {
  for (int d : {2, 4, 8}) {
    const LockingFamilyParams p = LockingFamilyParams::hadamard(d);
    const DensityOperator rho = locking_state(p);
    CHECK(rho.dims() == Dims{2, d, 2, d});
    CHECK(rho.party() == Parties{Party::A, Party::A, Party::B, Party::B});
    CHECK(max_abs_diff(rho.matrix(), locking_oracle(p.u)) < 1e-15);
    CHECK(validate(rho).ok);
  }
  Rng rng(11);
  const Matrix u = random_unitary(3, rng);
  const DensityOperator rho = locking_state({3, u});
  CHECK(max_abs_diff(rho.matrix(), locking_oracle(u)) < 1e-15);

  // u = I: two copies of the maximally correlated state glued coherently.
  const DensityOperator id_state = locking_state({3, Matrix::Identity(3, 3)});
  CHECK(validate(id_state).ok);
  CHECK(std::abs(id_state.matrix()(0, 21) - 1.0 / 6.0) < 1e-15);
  CHECK(std::abs(id_state.matrix()(0, 35)) < 1e-15);

  CHECK_THROWS_AS(LockingFamilyParams::hadamard(6), InvalidArgument);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(locking_state({2, bad}), InvalidArgument);
}

TEST_CASE("purification reproduces the locking state, also for complex unitaries") {
  Rng rng(12);
  std::vector<LockingFamilyParams> cases = {LockingFamilyParams::hadamard(2),
                                            LockingFamilyParams::hadamard(4)};
  for (int d : {2, 3}) cases.push_back({d, random_unitary(d, rng)});
  for (const auto& p : cases) {
    const DensityOperator psi = locking_purification(p);
    CHECK(psi.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig_hermitian(psi).values[0] == doctest::Approx(1.0).epsilon(1e-12));
    const DensityOperator ab = partial_trace(psi, std::vector<int>{4});
    CHECK(max_abs_diff(ab.matrix(), locking_oracle(p.u)) < 1e-12);
    const DensityOperator e = partial_trace(psi, std::vector<int>{0, 1, 2, 3});
    CHECK(max_abs_diff(e.matrix(), Matrix::Identity(p.d, p.d) / p.d) < 1e-12);
  }
}

TEST_CASE("Werner projector states") {
  for (int d : {2, 3}) {
    const auto [rs, ra] = werner_projector_states(d);
    const Matrix id = Matrix::Identity(d * d, d * d);
    const Matrix f = swap_operator(d);
    CHECK(max_abs_diff(rs.matrix(), (id + f) / (d * (d + 1.0))) < 1e-15);
    CHECK(max_abs_diff(ra.matrix(), (id - f) / (d * (d - 1.0))) < 1e-15);
    CHECK(std::abs((rs.matrix() * ra.matrix()).trace()) < 1e-15);
  }
  const auto [rs, ra] = werner_projector_states(2);
  const auto es = eig_hermitian(ra).values;
  CHECK(es[0] == doctest::Approx(1.0));
  CHECK(std::abs(es[1]) < 1e-14);
  const auto ss = eig_hermitian(rs).values;
  CHECK(ss[2] == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(ss[3]) < 1e-14);
}

TEST_CASE("hiding pair layout and trace distance") {
  for (int d : {2, 3}) {
    for (int l : {1, 2, 3}) {
      if (std::pow(d, 2 * l) > 4096) continue;
      const auto [t0, t1] = hiding_pair(d, l);
      const auto [rs, ra] = werner_projector_states(d);
      CHECK(max_abs_diff(t0.matrix(), grouped_power(rs.matrix(), d, l)) < 1e-15);
      CHECK(max_abs_diff(t1.matrix(),
                         grouped_power(0.5 * (rs.matrix() + ra.matrix()), d, l)) < 1e-15);
      Parties party(l, Party::A);
      party.insert(party.end(), l, Party::B);
      CHECK(t0.party() == party);
      CHECK(trace_norm(t0 - t1) == doctest::Approx(2.0 - std::pow(2.0, 1 - l)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(hiding_pair(2, 2, 8), DimensionCapExceeded);
  CHECK_THROWS_AS(hiding_pair(2, 0), InvalidArgument);
}

TEST_CASE("flower operator blocks") {
  for (int n : {1, 2}) {
    const FlowerFamilyParams p{2, 2, n, 0.9, FlowerForm::kSeparateBranches};
    const HermitianOperator op = flower_operator(p);
    const auto [t0, t1] = hiding_pair(p.d, p.l);
    const Dims hdims = t0.dims();
    Matrix x = transpose_second_half(t1.matrix(), hdims) - transpose_second_half(t0.matrix(), hdims);
    Matrix a = t0.matrix(), b = t1.matrix(), xn = x;
    Dims blk = hdims;
    for (int k = 1; k < n; ++k) {
      a = kron(a, t0.matrix());
      b = kron(b, t1.matrix());
      xn = kron(xn, x);
      blk.insert(blk.end(), hdims.begin(), hdims.end());
    }
    // Raw layout [qA, qB, block factors]; each copy holds l A then l B factors.
    const int per = static_cast<int>(blk.size());
    Matrix raw = Matrix::Zero(4 * a.rows(), 4 * a.cols());
    const Eigen::Index s = a.rows();
    raw.block(0, 0, s, s) = 0.5 * a;
    raw.block(3 * s, 3 * s, s, s) = 0.5 * b;
    raw.block(0, 3 * s, s, s) = 0.5 * std::pow(p.alpha, n) * xn;
    raw.block(3 * s, 0, s, s) = 0.5 * std::pow(p.alpha, n) * xn;
    Dims raw_dims = {2, 2};
    raw_dims.insert(raw_dims.end(), blk.begin(), blk.end());
    std::vector<int> perm = {0};
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < p.l; ++k) perm.push_back(2 + c * 2 * p.l + k);
    perm.push_back(1);
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < p.l; ++k) perm.push_back(2 + c * 2 * p.l + p.l + k);
    CHECK(static_cast<int>(perm.size()) == per + 2);
    CHECK(max_abs_diff(op.matrix(), permute_oracle(raw, raw_dims, perm)) < 1e-15);
    CHECK(op.dims().front() == 2);
    CHECK(op.party()[0] == Party::A);
    CHECK(op.party()[1 + n * p.l] == Party::B);
  }
}

TEST_CASE("flower operator: negativity formula and positivity report") {
  for (double alpha : {0.7, 0.9, 1.0}) {
    for (int n : {1, 2}) {
      const FlowerFamilyParams p{2, 2, n, alpha, FlowerForm::kSeparateBranches};
      const HermitianOperator op = flower_operator(p);
      const double en = std::log2(trace_norm(partial_transpose(op, BipartiteCut::from_parties(op.party()))));
      CHECK(en == doctest::Approx(std::log2(1.0 + std::pow(alpha * 1.5, n))).epsilon(1e-10));
      // The literal construction is not positive; the state factory reports it.
      CHECK(eig_hermitian(op).values.minCoeff() < -1e-3);
      CHECK_THROWS_AS(flower_state(p), InvalidState);
    }
  }
  const FlowerFamilyParams zero{2, 2, 1, 0.0, FlowerForm::kSeparateBranches};
  const DensityOperator z = flower_state(zero);
  CHECK(max_abs_diff(z.matrix(), flower_dephased_reference(zero).matrix()) == 0.0);
  CHECK(ppt_check(z).is_ppt);
  CHECK_THROWS_AS(flower_state({2, 2, 1, 1.5, FlowerForm::kSeparateBranches}), InvalidArgument);
  CHECK_THROWS_AS(flower_state({2, 3, 2, 0.5, FlowerForm::kSeparateBranches}),
                  DimensionCapExceeded);
}

TEST_CASE("flag mixture and flagged pair") {
  Rng rng(13);
  const Dims dims = {2, 2};
  const Parties party = {Party::A, Party::B};
  const DensityOperator r = random_density(dims, party, 2, rng);
  const DensityOperator g = random_density(dims, party, 3, rng);
  CHECK(max_abs_diff(flag_mixture(r, g, 1.0).matrix(), kron(r.matrix(), basis_projector(2, 0, 0))) ==
        0.0);
  CHECK(max_abs_diff(flag_mixture(r, g, 0.0).matrix(), kron(g.matrix(), basis_projector(2, 1, 1))) ==
        0.0);
  const DensityOperator fm = flag_mixture(r, g, 0.3);
  CHECK(fm.party().back() == Party::A);
  CHECK(max_abs_diff(partial_trace(fm, std::vector<int>{2}).matrix(),
                     0.3 * r.matrix() + 0.7 * g.matrix()) < 1e-15);

  const FlaggedPair fp = flagged_pair(r, g, 0.25);
  CHECK(max_abs_diff(partial_trace(fp.flagged, std::vector<int>{2}).matrix(),
                     fp.reduced.matrix()) < 1e-12);
  CHECK(max_abs_diff(fp.reduced.matrix(), 0.75 * r.matrix() + 0.25 * g.matrix()) < 1e-15);
  const FlaggedPair none = flagged_pair(r, g, 0.0);
  CHECK(max_abs_diff(none.reduced.matrix(), r.matrix()) == 0.0);
  CHECK(max_abs_diff(flagged_pair(r, r, 0.5).reduced.matrix(), r.matrix()) < 1e-15);

  const DensityOperator other = random_density({2, 3}, party, 2, rng);
  CHECK_THROWS_AS(flag_mixture(r, other, 0.5), InvalidArgument);
  CHECK_THROWS_AS(flagged_pair(r, g, 1.5), InvalidArgument);
}
