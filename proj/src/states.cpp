#include "qlock/states.hpp"

#include <cmath>
#include <string>

namespace qlock {

namespace {

const Parties kAB = {Party::A, Party::B};

bool is_power_of_two(int d) { return d > 0 && (d & (d - 1)) == 0; }

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_cap(std::size_t total, std::size_t cap) {
  if (total > cap) {
    throw DimensionCapExceeded("state dimension " + std::to_string(total) +
                               " exceeds cap " + std::to_string(cap));
  }
}

template <class Op>
Op tensor_power(const Op& x, int n) {
  Op out = x;
  for (int i = 1; i < n; ++i) out = tensor(out, x);
  return out;
}

// Diagonal and off-diagonal pieces of the flower construction on the
// hiding-state layout [A^l, B^l] repeated n times.
struct FlowerBlocks {
  Matrix diag0;
  Matrix diag1;
  Matrix off;
  Dims dims;
  Parties party;
};

FlowerBlocks flower_blocks(const FlowerFamilyParams& p, std::size_t cap) {
  p.check();
  const std::size_t side = 2 * ipow(ipow(static_cast<std::size_t>(p.d), p.l), p.n);
  check_cap(side * side, cap);
  const auto [tau0, tau1] = hiding_pair(p.d, p.l, cap);
  const BipartiteCut cut = BipartiteCut::from_parties(tau0.party());
  const HermitianOperator pt0 = partial_transpose(tau0, cut);
  const HermitianOperator pt1 = partial_transpose(tau1, cut);

  const bool symmetric = p.form == FlowerForm::kSymmetricBlocks;
  const HermitianOperator x = symmetric ? pt0 - pt1 : pt1 - pt0;
  const HermitianOperator xn = tensor_power(x, p.n);
  const HermitianOperator t0 = tensor_power<HermitianOperator>(tau0, p.n);
  const HermitianOperator t1 =
      symmetric ? t0 : tensor_power<HermitianOperator>(tau1, p.n);

  FlowerBlocks b;
  b.diag0 = t0.matrix();
  b.diag1 = t1.matrix();
  b.off = std::pow(p.alpha, p.n) * xn.matrix();
  b.dims = t0.dims();
  b.party = t0.party();
  return b;
}

HermitianOperator assemble_flower(const FlowerBlocks& b, bool with_coherences) {
  const Matrix p00 = kron(basis_projector(2, 0, 0), basis_projector(2, 0, 0));
  const Matrix p11 = kron(basis_projector(2, 1, 1), basis_projector(2, 1, 1));
  const Matrix p01 = kron(basis_projector(2, 0, 1), basis_projector(2, 0, 1));
  const Matrix p10 = kron(basis_projector(2, 1, 0), basis_projector(2, 1, 0));

  Matrix m = kron(p00, b.diag0) + kron(p11, b.diag1);
  if (with_coherences) m += kron(p01, b.off) + kron(p10, b.off);
  m *= 0.5;

  Dims dims = {2, 2};
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  Parties party = kAB;
  party.insert(party.end(), b.party.begin(), b.party.end());

  // Qubits first in the raw layout; regroup so each party's factors are
  // contiguous with its qubit leading.
  const HermitianOperator raw(std::move(m), dims, party);
  return permute_subsystems(raw, grouping_permutation(raw.party()));
}

DensityOperator as_state(const HermitianOperator& x) {
  return DensityOperator(x.matrix(), x.dims(), x.party());
}

}  // namespace

// --- parameter checks ------------------------------------------------------

LockingFamilyParams LockingFamilyParams::hadamard(int d) {
  if (!is_power_of_two(d) || d < 2) {
    throw InvalidArgument("Hadamard unitary needs d a power of two, d >= 2");
  }
  int k = 0;
  while ((1 << k) < d) ++k;
  return {d, hadamard_power(k)};
}

void LockingFamilyParams::check() const {
  if (d < 2) throw InvalidArgument("locking state needs d >= 2");
  if (u.rows() != d || u.cols() != d) {
    throw InvalidArgument("unitary must be d x d");
  }
  const double defect = max_abs_diff(u.adjoint() * u, Matrix::Identity(d, d));
  if (!(defect <= tol::kHermitian)) {
    throw InvalidArgument("u is not unitary (defect " + std::to_string(defect) + ")");
  }
}

void FlowerFamilyParams::check() const {
  if (d < 2) throw InvalidArgument("flower state needs d >= 2");
  if (l < 1) throw InvalidArgument("flower state needs l >= 1");
  if (n < 1) throw InvalidArgument("flower state needs n >= 1");
  if (!(std::abs(alpha) <= 1.0)) throw InvalidArgument("flower state needs |alpha| <= 1");
}

// --- simple families -------------------------------------------------------

DensityOperator max_correlated(int d) {
  if (d < 2) throw InvalidArgument("max_correlated needs d >= 2");
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) m(i * d + i, i * d + i) = 1.0 / d;
  return DensityOperator(std::move(m), {d, d}, kAB);
}

DensityOperator bell_state(int d) {
  if (d < 2) throw InvalidArgument("bell_state needs d >= 2");
  Vector psi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return DensityOperator::pure(psi, {d, d}, kAB);
}

Matrix hadamard_power(int k) {
  if (k < 1) throw InvalidArgument("hadamard_power needs k >= 1");
  Matrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  Matrix out = h;
  for (int i = 1; i < k; ++i) out = kron(out, h);
  return out;
}

// --- locking state ---------------------------------------------------------

DensityOperator locking_state(const LockingFamilyParams& params) {
  params.check();
  const int d = params.d;
  const int dim = 4 * d * d;
  // index of |q, i>_A |q', j>_B
  auto index = [d](int qa, int ia, int qb, int ib) {
    return ((qa * d + ia) * 2 + qb) * d + ib;
  };
  Matrix m = Matrix::Zero(dim, dim);
  const double w = 1.0 / (2.0 * d);
  for (int i = 0; i < d; ++i) {
    m(index(0, i, 0, i), index(0, i, 0, i)) = w;
    m(index(1, i, 1, i), index(1, i, 1, i)) = w;
    for (int j = 0; j < d; ++j) {
      const Complex v = w * params.u(j, i);
      m(index(0, i, 0, i), index(1, j, 1, j)) = v;
      m(index(1, j, 1, j), index(0, i, 0, i)) = std::conj(v);
    }
  }
  return DensityOperator(std::move(m), {2, d, 2, d},
                         {Party::A, Party::A, Party::B, Party::B});
}

DensityOperator locking_purification(const LockingFamilyParams& params) {
  params.check();
  const int d = params.d;
  const Matrix u_dag = params.u.adjoint();
  auto index = [d](int qa, int ia, int qb, int ib, int e) {
    return (((qa * d + ia) * 2 + qb) * d + ib) * d + e;
  };
  Vector psi = Vector::Zero(4 * d * d * d);
  const double amp = 1.0 / std::sqrt(2.0 * d);
  for (int i = 0; i < d; ++i) {
    psi(index(0, i, 0, i, i)) += amp;
    for (int e = 0; e < d; ++e) psi(index(1, i, 1, i, e)) += amp * u_dag(e, i);
  }
  return DensityOperator::pure(psi, {2, d, 2, d, d},
                               {Party::A, Party::A, Party::B, Party::B, Party::E});
}

// --- hiding states ---------------------------------------------------------

std::pair<DensityOperator, DensityOperator> werner_projector_states(int d) {
  if (d < 2) throw InvalidArgument("Werner states need d >= 2");
  const int n = d * d;
  Matrix flip = Matrix::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) flip(i * d + j, j * d + i) = 1.0;
  }
  const Matrix id = Matrix::Identity(n, n);
  const double dim_sym = d * (d + 1) / 2.0;
  const double dim_asym = d * (d - 1) / 2.0;
  Matrix sym = (id + flip) / (2.0 * dim_sym);
  Matrix asym = (id - flip) / (2.0 * dim_asym);
  return {DensityOperator(std::move(sym), {d, d}, kAB),
          DensityOperator(std::move(asym), {d, d}, kAB)};
}

std::pair<DensityOperator, DensityOperator> hiding_pair(int d, int l,
                                                        std::size_t dimension_cap) {
  if (d < 2) throw InvalidArgument("hiding states need d >= 2");
  if (l < 1) throw InvalidArgument("hiding states need l >= 1");
  const std::size_t side = ipow(static_cast<std::size_t>(d), l);
  check_cap(side * side, dimension_cap);

  const auto [rho_s, rho_a] = werner_projector_states(d);
  const DensityOperator mixed = DensityOperator::trusted(
      0.5 * (rho_s.matrix() + rho_a.matrix()), rho_s.dims(), rho_s.party());
  const DensityOperator t0 = tensor_power(rho_s, l);
  const DensityOperator t1 = tensor_power(mixed, l);
  const auto perm = grouping_permutation(t0.party());
  return {permute_subsystems(t0, perm), permute_subsystems(t1, perm)};
}

HermitianOperator flower_operator(const FlowerFamilyParams& params,
                                  std::size_t dimension_cap) {
  return assemble_flower(flower_blocks(params, dimension_cap), true);
}

DensityOperator flower_state(const FlowerFamilyParams& params, std::size_t dimension_cap) {
  return as_state(flower_operator(params, dimension_cap));
}

DensityOperator flower_dephased_reference(const FlowerFamilyParams& params,
                                          std::size_t dimension_cap) {
  return as_state(assemble_flower(flower_blocks(params, dimension_cap), false));
}

// --- flagged mixtures ------------------------------------------------------

DensityOperator flag_mixture(const DensityOperator& rho, const DensityOperator& rho_tilde,
                             double p) {
  if (rho.dims() != rho_tilde.dims()) throw InvalidArgument("flag_mixture: dims differ");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("flag_mixture: p outside [0, 1]");
  Matrix m = kron(p * rho.matrix(), basis_projector(2, 0, 0)) +
             kron((1.0 - p) * rho_tilde.matrix(), basis_projector(2, 1, 1));
  Dims dims = rho.dims();
  dims.push_back(2);
  Parties party = rho.party();
  party.push_back(Party::A);
  return DensityOperator::trusted(std::move(m), std::move(dims), std::move(party));
}

FlaggedPair flagged_pair(const DensityOperator& rho1, const DensityOperator& gamma1,
                         double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps outside [0, 1]");
  if (rho1.dims() != gamma1.dims()) throw InvalidArgument("flagged_pair: dims differ");
  DensityOperator flagged = flag_mixture(rho1, gamma1, 1.0 - eps);
  DensityOperator reduced = DensityOperator::trusted(
      (1.0 - eps) * rho1.matrix() + eps * gamma1.matrix(), rho1.dims(), rho1.party());
  return {std::move(flagged), std::move(reduced)};
}

}  // namespace qlock
