#include <doctest.h>

#include <cmath>

#include "qlock/channels.hpp"
#include "qlock/continuity.hpp"
#include "qlock/random.hpp"
#include "qlock/states.hpp"
#include "testing.hpp"

using namespace qlock;
using qlock::testing::h2;

namespace {

DensityOperator diag_qubit(double p0) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = p0;
  m(1, 1) = 1.0 - p0;
  return DensityOperator(m, {2}, {Party::A});
}

// Binomial bookkeeping for a two-level base spectrum (p, 1-p): k counts the
// copies of the second level.
struct BinomialOracle {
  double p;
  int n;
  double eps;

  double log2_choose(int k) const {
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
  }
  double log2_eigen(int k) const { return (n - k) * std::log2(p) + k * std::log2(1.0 - p); }
  bool typical(int k) const { return std::abs(-log2_eigen(k) / n - h2(p)) <= eps; }

  double kept_mass() const {
    double mass = 0.0;
    for (int k = 0; k <= n; ++k)
      if (typical(k)) mass += std::exp2(log2_choose(k) + log2_eigen(k));
    return mass;
  }
  double truncated_renyi_density(double alpha) const {
    const double kept = kept_mass();
    double sum = 0.0;
    for (int k = 0; k <= n; ++k)
      if (typical(k)) sum += std::exp2(log2_choose(k) + alpha * (log2_eigen(k) - std::log2(kept)));
    return std::log2(sum) / ((1.0 - alpha) * n);
  }
};

}  // namespace

TEST_CASE("positive and negative parts") {
  Rng rng(51);
  const DensityOperator rho = random_density({3}, {Party::A}, 3, rng);
  const SignedParts psd = positive_negative_parts(rho);
  CHECK(max_abs_diff(psd.positive.matrix(), rho.matrix()) < 1e-14);
  CHECK(psd.negative.matrix().cwiseAbs().maxCoeff() < 1e-14);

  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const SignedParts zp = positive_negative_parts(HermitianOperator(z, {2}, {Party::A}));
  CHECK(max_abs_diff(zp.positive.matrix(), basis_projector(2, 0, 0)) < 1e-15);
  CHECK(max_abs_diff(zp.negative.matrix(), basis_projector(2, 1, 1)) < 1e-15);

  for (int s = 0; s < 20; ++s) {
    const DensityOperator a = random_density({2, 2}, {Party::A, Party::B}, 2, rng);
    const DensityOperator b = random_density({2, 2}, {Party::A, Party::B}, 3, rng);
    const HermitianOperator h = a - b;
    const SignedParts sp = positive_negative_parts(h);
    CHECK(max_abs_diff(sp.positive.matrix() - sp.negative.matrix(), h.matrix()) < 1e-14);
    CHECK(eig_hermitian(sp.positive).values.minCoeff() >= -1e-12);
    CHECK(eig_hermitian(sp.negative).values.minCoeff() >= -1e-12);
    CHECK((sp.positive.matrix() * sp.negative.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sp.positive.trace() == doctest::Approx(sp.negative.trace()).epsilon(1e-12));
    CHECK(trace_norm(h) == doctest::Approx(sp.positive.trace() + sp.negative.trace()).epsilon(1e-12));
  }
}

TEST_CASE("Araki-Moriya decomposition") {
  const AMDecomposition basic = araki_moriya(diag_qubit(1.0), diag_qubit(0.0));
  CHECK(basic.delta == doctest::Approx(1.0));
  CHECK(max_abs_diff(basic.gamma1.matrix(), basis_projector(2, 1, 1)) < 1e-15);
  CHECK(max_abs_diff(basic.gamma2.matrix(), basis_projector(2, 0, 0)) < 1e-15);
  CHECK(max_abs_diff(basic.sigma.matrix(), Matrix::Identity(2, 2) / 2.0) < 1e-15);

  // Commuting pair: delta is half the l1 distance of the diagonals.
  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a.diagonal() << 0.5, 0.3, 0.2;
  b.diagonal() << 0.1, 0.6, 0.3;
  const AMDecomposition comm = araki_moriya(DensityOperator(a, {3}, {Party::A}),
                                            DensityOperator(b, {3}, {Party::A}));
  CHECK(comm.delta == doctest::Approx(0.5 * (0.4 + 0.3 + 0.1)).epsilon(1e-12));

  for (int s = 0; s < 100; ++s) {
    Rng rng(derive_seed(52, s));
    const Dims dims = s % 2 ? Dims{2} : Dims{2, 2};
    const Parties party = s % 2 ? Parties{Party::A} : Parties{Party::A, Party::B};
    const DensityOperator r1 = random_density(dims, party, 1 + s % 2, rng);
    const DensityOperator r2 = random_density(dims, party, 1 + (s / 2) % 2, rng);
    const AMDecomposition am = araki_moriya(r1, r2);
    const Matrix s1 = (r1.matrix() + am.delta * am.gamma1.matrix()) / (1.0 + am.delta);
    const Matrix s2 = (r2.matrix() + am.delta * am.gamma2.matrix()) / (1.0 + am.delta);
    CHECK(max_abs_diff(s1, am.sigma.matrix()) < 1e-12);
    CHECK(max_abs_diff(s2, am.sigma.matrix()) < 1e-12);
    CHECK(std::abs(2.0 * am.delta - trace_norm(r1 - r2)) < 1e-12);
    CHECK(validate(am.gamma1).ok);
    CHECK(validate(am.gamma2).ok);
  }
  CHECK_THROWS_AS(araki_moriya(diag_qubit(0.3), diag_qubit(0.3)), InvalidArgument);
}

TEST_CASE("functionals and affinity defects") {
  Rng rng(53);
  Matrix obs = ginibre(2, 2, rng);
  obs = (obs + obs.adjoint()).eval() / 2.0;
  const Functional lin = Functional::expectation(HermitianOperator(obs, {2}, {Party::A}));
  const DensityOperator r = random_density({2}, {Party::A}, 2, rng);
  const DensityOperator s = random_density({2}, {Party::A}, 2, rng);
  CHECK(std::abs(affinity_defect(lin, r, s, 0.3)) < 1e-14);

  const Functional vn = Functional::von_neumann();
  CHECK(affinity_defect(vn, diag_qubit(1.0), diag_qubit(0.0), 0.5) == doctest::Approx(-1.0));

  const Functional ren = Functional::parse("renyi:0.5");
  CHECK(ren.kind() == Functional::Kind::kRenyi);
  CHECK(ren.alpha() == 0.5);
  CHECK(Functional::parse("von_neumann").kind() == Functional::Kind::kVonNeumann);
  CHECK_THROWS_AS(Functional::parse("renyi:1.5"), InvalidArgument);
  CHECK_THROWS_AS(Functional::parse("bogus"), InvalidArgument);

  for (int k = 0; k < 50; ++k) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double p = unif(rng);
    const DensityOperator a = random_density({2}, {Party::A}, 1 + k % 2, rng);
    const DensityOperator b = random_density({2}, {Party::A}, 2, rng);
    const double dv = affinity_defect(vn, a, b, p);
    CHECK(dv <= 1e-12);
    CHECK(dv >= -h2(p) - 1e-9);
    const double dr = affinity_defect(ren, a, b, p);
    CHECK(dr <= 1e-12);
    CHECK(dr >= -1.0 - 1e-12);
  }
}

TEST_CASE("proof defects and the difference identity") {
  Rng rng(54);
  Matrix obs = ginibre(4, 4, rng);
  obs = (obs + obs.adjoint()).eval() / 2.0;
  const std::vector<Functional> fs = {
      Functional::von_neumann(), Functional::renyi(0.5),
      Functional::expectation(HermitianOperator(obs, {2, 2}, {Party::A, Party::B}))};
  for (int s = 0; s < 100; ++s) {
    const DensityOperator r1 = random_density({2, 2}, {Party::A, Party::B}, 1 + s % 4, rng);
    const DensityOperator r2 = random_density({2, 2}, {Party::A, Party::B}, 1 + (s / 4) % 4, rng);
    for (const auto& f : fs) {
      const ProofDefects d = proof_defects(f, r1, r2);
      const double rebuilt =
          d.delta * (d.f_gamma2 - d.f_gamma1) + (1.0 + d.delta) * (d.x1 - d.x2);
      CHECK(std::abs(f(r1) - f(r2) - rebuilt) < 1e-9);
      CHECK(d.identity_residual < 1e-9);
      if (f.kind() == Functional::Kind::kVonNeumann) {
        CHECK(std::abs(d.x1) <= 1.0 + 1e-12);
        CHECK(std::abs(d.x2) <= 1.0 + 1e-12);
      }
      if (f.kind() == Functional::Kind::kExpectation) {
        CHECK(std::abs(d.x1) < 1e-12);
        CHECK(std::abs(d.x2) < 1e-12);
      }
    }
  }
}

TEST_CASE("continuity bound for the von Neumann entropy") {
  const Functional vn = Functional::von_neumann();
  Rng rng(55);
  for (int s = 0; s < 50; ++s) {
    const DensityOperator a = random_density({2}, {Party::A}, 1 + s % 2, rng);
    const DensityOperator b = random_density({2}, {Party::A}, 2, rng);
    const ContinuityCheck c = continuity_bound_check(vn, 1.0, 1.0, a, b);
    CHECK(c.slack >= -1e-9);
    CHECK(c.bound == doctest::Approx(trace_norm(a - b) + 4.0).epsilon(1e-12));
  }
  const DensityOperator a = random_density({2, 2}, {Party::A, Party::B}, 3, rng);
  CHECK(continuity_bound_check(vn, 1.0, 0.25, a, a).slack == doctest::Approx(1.0));
}

TEST_CASE("typical truncation on flat and pure spectra") {
  const TypicalSpectrum flat = typical_truncation(Spectrum({0.5, 0.5}), 40, 0.01);
  CHECK(flat.kept_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.truncated_renyi_density(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.full_renyi_density(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.trace_distance() < 1e-12);

  const TypicalSpectrum pure = typical_truncation(Spectrum({1.0, 0.0}), 10, 0.01);
  CHECK(pure.kept_mass == doctest::Approx(1.0));
  CHECK(pure.levels.size() == 1);
  CHECK(std::abs(pure.truncated_entropy_density()) < 1e-12);

  CHECK_THROWS_AS(typical_truncation(Spectrum({0.9, 0.1}), 0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(typical_truncation(Spectrum({0.9, 0.1}), 10, 0.0), InvalidArgument);
  // One copy: surprisals 0.152 and 3.32 are both far from S = 0.469.
  CHECK_THROWS_AS(typical_truncation(Spectrum({0.9, 0.1}), 1, 0.05), InvalidArgument);
}

TEST_CASE("typical truncation against binomial sums") {
  for (int n : {50, 200, 1000, 2000}) {
    for (double eps : {0.03, 0.05}) {
      const BinomialOracle oracle{0.9, n, eps};
      const TypicalSpectrum t = typical_truncation(Spectrum({0.9, 0.1}), n, eps);
      CHECK(t.kept_mass == doctest::Approx(oracle.kept_mass()).epsilon(1e-9));
      CHECK(t.truncated_renyi_density(0.5) ==
            doctest::Approx(oracle.truncated_renyi_density(0.5)).epsilon(1e-9));
      CHECK(t.full_renyi_density(0.5) ==
            doctest::Approx(2.0 * std::log2(std::sqrt(0.9) + std::sqrt(0.1))).epsilon(1e-12));
      CHECK(t.trace_distance() == doctest::Approx(2.0 * (1.0 - t.kept_mass)).epsilon(1e-9));
    }
  }
  // Three-level base: multinomial classes, checked by brute force at small n.
  const std::vector<double> base = {0.6, 0.3, 0.1};
  const int n = 6;
  const double s = qlock::testing::shannon(base);
  double mass = 0.0;
  for (int idx = 0; idx < 729; ++idx) {
    int rest = idx;
    double lp = 0.0;
    for (int c = 0; c < n; ++c) {
      lp += std::log2(base[rest % 3]);
      rest /= 3;
    }
    if (std::abs(-lp / n - s) <= 0.2) mass += std::exp2(lp);
  }
  CHECK(typical_truncation(Spectrum(base), n, 0.2).kept_mass == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("Renyi gap curve") {
  const auto flat = renyi_gap_curve(Spectrum({0.5, 0.5}), 0.5, {10, 100}, 0.03);
  for (const auto& row : flat) {
    CHECK(row.density_truncated == doctest::Approx(1.0));
    CHECK(row.density_full == doctest::Approx(1.0));
  }
  const std::vector<int> grid = {50, 100, 200, 500, 1000, 2000};
  const auto rows = renyi_gap_curve(Spectrum({0.9, 0.1}), 0.5, grid, 0.03);
  REQUIRE(rows.size() == grid.size());
  const double s_half = 2.0 * std::log2(std::sqrt(0.9) + std::sqrt(0.1));
  const double s_vn = h2(0.9);
  for (const auto& row : rows) {
    CHECK(row.density_full == doctest::Approx(s_half).epsilon(1e-9));
    CHECK(row.vn_entropy == doctest::Approx(s_vn).epsilon(1e-12));
    CHECK(row.density_truncated < row.density_full);
  }
  CHECK(std::abs(rows.back().density_truncated - s_vn) <= 0.05);
  CHECK(rows.back().trace_distance < rows.front().trace_distance);
  CHECK(rows.back().kept_mass > rows[1].kept_mass);
}

TEST_CASE("Renyi continuity witness grows with n") {
  const TypicalSpectrum small = typical_truncation(Spectrum({0.9, 0.1}), 2000, 0.03);
  const TypicalSpectrum large = typical_truncation(Spectrum({0.9, 0.1}), 10000, 0.03);
  const ContinuityCheck a = renyi_truncation_witness(small, 0.5, 1.0, 1.0);
  const ContinuityCheck b = renyi_truncation_witness(large, 0.5, 1.0, 1.0);
  CHECK(b.slack < a.slack);
  CHECK(b.slack < 0.0);
  CHECK(b.lhs == doctest::Approx(10000 * (large.full_renyi_density(0.5) -
                                          large.truncated_renyi_density(0.5))).epsilon(1e-9));
}

TEST_CASE("reduced measure over dephasing maps") {
  const DensityOperator rho = locking_state(LockingFamilyParams::hadamard(2));
  const ReducedMeasureResult id = reduced_measure_restricted(rho, ReducedMeasureTag::kLogNegativity, {});
  CHECK(id.value == doctest::Approx(log_negativity(rho)).epsilon(1e-12));
  CHECK(id.family.size() == 1);

  const ReducedMeasureResult r =
      reduced_measure_restricted(rho, ReducedMeasureTag::kLogNegativity, {{0}});
  const DensityOperator deph = dephase_subsystem(rho, 0);
  const double ds = von_neumann_entropy(deph) - von_neumann_entropy(rho);
  CHECK(ds == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.entropy_production[1] == doctest::Approx(ds).epsilon(1e-12));
  CHECK(r.measure[1] == doctest::Approx(log_negativity(deph)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(std::min(log_negativity(rho), log_negativity(deph) + ds)).epsilon(1e-12));

  const DensityOperator diag = max_correlated(2);
  const ReducedMeasureResult dr =
      reduced_measure_restricted(diag, ReducedMeasureTag::kLogNegativity, {{0}, {1}, {0, 1}});
  CHECK(std::abs(dr.value) < 1e-12);
  for (double t : dr.entropy_production) CHECK(std::abs(t) < 1e-12);

  const ReducedMeasureResult bell =
      reduced_measure_restricted(bell_state(2), ReducedMeasureTag::kEofTwoQubit, {{1}});
  CHECK(bell.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(parse_reduced_measure(to_string(ReducedMeasureTag::kRelEntPpt)) ==
        ReducedMeasureTag::kRelEntPpt);
  CHECK_THROWS_AS(parse_reduced_measure("nope"), InvalidArgument);
  CHECK_THROWS_AS(reduced_measure_restricted(rho, ReducedMeasureTag::kLogNegativity, {{9}}),
                  InvalidArgument);
}
