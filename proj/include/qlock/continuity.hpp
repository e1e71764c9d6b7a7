#pragma once

// Continuity tooling: positive/negative parts, the Araki-Moriya
// decomposition of a pair of states, affinity defects of state functionals,
// the continuity bound |f(r1) - f(r2)| <= M ||r1 - r2|| log2 d + 4c, and
// typical-subspace truncation of tensor-power spectra done on type classes.

#include <string>
#include <vector>

#include "qlock/densop.hpp"
#include "qlock/measures.hpp"

namespace qlock {

struct SignedParts {
  HermitianOperator positive;
  HermitianOperator negative;
};

/// h = positive - negative with both parts PSD and orthogonally supported.
SignedParts positive_negative_parts(const HermitianOperator& h);

/// sigma = (rho1 + delta gamma1)/(1 + delta) = (rho2 + delta gamma2)/(1 + delta)
/// with delta = ||rho1 - rho2||_1 / 2.
struct AMDecomposition {
  DensityOperator sigma;
  DensityOperator gamma1;
  DensityOperator gamma2;
  double delta = 0.0;
};

/// gamma1 is the normalised negative part of rho1 - rho2, gamma2 the
/// normalised positive part. Throws InvalidArgument if the states coincide.
AMDecomposition araki_moriya(const DensityOperator& rho1, const DensityOperator& rho2);

/// A real-valued state functional from a fixed registry.
class Functional {
 public:
  enum class Kind { kVonNeumann, kRenyi, kExpectation };

  static Functional von_neumann();
  static Functional renyi(double alpha);
  /// Tr(O rho) for a fixed Hermitian O.
  static Functional expectation(const HermitianOperator& observable);

  /// "von_neumann" or "renyi:<alpha>".
  static Functional parse(const std::string& tag);

  double operator()(const DensityOperator& rho) const;
  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::string name() const;

 private:
  Functional(Kind kind, double alpha, Matrix observable)
      : kind_(kind), alpha_(alpha), observable_(std::move(observable)) {}

  Kind kind_;
  double alpha_;
  Matrix observable_;
};

/// p f(rho) + (1-p) f(sigma) - f(p rho + (1-p) sigma). Positive values mean
/// local convexity, negative values concavity.
double affinity_defect(const Functional& f, const DensityOperator& rho,
                       const DensityOperator& sigma, double p);

struct ProofDefects {
  double x1 = 0.0;  // f(rho1)/(1+delta) + delta f(gamma1)/(1+delta) - f(sigma)
  double x2 = 0.0;
  double delta = 0.0;
  double f_gamma1 = 0.0;
  double f_gamma2 = 0.0;
  /// |f(rho1) - f(rho2) - delta (f(gamma2) - f(gamma1)) - (1+delta)(x1 - x2)|
  double identity_residual = 0.0;
};

ProofDefects proof_defects(const Functional& f, const DensityOperator& rho1,
                           const DensityOperator& rho2);

struct ContinuityCheck {
  double lhs = 0.0;    // |f(rho1) - f(rho2)|
  double bound = 0.0;  // M ||rho1 - rho2||_1 log2 d + 4c
  double slack = 0.0;  // bound - lhs
};

ContinuityCheck continuity_bound_check(const Functional& f, double m, double c,
                                       const DensityOperator& rho1,
                                       const DensityOperator& rho2);

/// One type class of base^{(x) n}: every eigenvalue in it equals
/// 2^{log2_eigenvalue}, and there are exp(log_multiplicity) of them.
struct SpectrumLevel {
  double log2_eigenvalue = 0.0;
  double log_multiplicity = 0.0;
  bool typical = false;
};

/// Spectrum of base^{(x) n} with the eigenvalues whose per-copy surprisal is
/// within epsilon of S(base) marked typical. Only the support of base is
/// enumerated, so zero eigenvalues never appear as levels.
struct TypicalSpectrum {
  Spectrum base;
  int n = 1;
  double epsilon = 0.0;
  std::vector<SpectrumLevel> levels;
  double kept_mass = 0.0;

  /// Renyi-alpha entropy per copy of the renormalised typical part.
  double truncated_renyi_density(double alpha) const;
  /// Renyi-alpha entropy per copy of the whole tensor power.
  double full_renyi_density(double alpha) const;
  /// Von Neumann entropy per copy of the renormalised typical part.
  double truncated_entropy_density() const;
  /// l1 distance between the renormalised typical part and the full spectrum.
  double trace_distance() const;
};

/// Throws InvalidArgument for n < 1, epsilon <= 0, or an empty typical set.
TypicalSpectrum typical_truncation(const Spectrum& base, int n, double epsilon);

struct GapRow {
  int n = 0;
  double density_truncated = 0.0;
  double density_full = 0.0;
  double vn_entropy = 0.0;
  double kept_mass = 0.0;
  double trace_distance = 0.0;
};

std::vector<GapRow> renyi_gap_curve(const Spectrum& base, double alpha,
                                    const std::vector<int>& n_grid, double epsilon);

/// Continuity bound evaluated on the pair (base^{(x) n}, its typical
/// truncation) for f = S_alpha, using only spectra: ||.||_1 from the levels,
/// log2 d = n log2 |supp base|.
ContinuityCheck renyi_truncation_witness(const TypicalSpectrum& t, double alpha,
                                         double m, double c);

enum class ReducedMeasureTag { kLogNegativity, kEofTwoQubit, kRelEntPpt };

ReducedMeasureTag parse_reduced_measure(const std::string& tag);
std::string to_string(ReducedMeasureTag tag);

struct ReducedMeasureResult {
  double value = 0.0;              // min over the family
  std::size_t best = 0;            // index into `terms`
  std::vector<std::vector<int>> family;  // identity (empty set) first
  std::vector<double> measure;     // E(Lambda(rho)) per family member
  std::vector<double> entropy_production;  // S(Lambda(rho)) - S(rho)
  std::vector<double> terms;       // measure + entropy_production
};

/// min over dephasing maps Lambda in the family of
/// E(Lambda(rho)) + S(Lambda(rho)) - S(rho). Each family member lists the
/// subsystems dephased in the computational basis; the identity map is always
/// included.
ReducedMeasureResult reduced_measure_restricted(
    const DensityOperator& rho, ReducedMeasureTag measure,
    const std::vector<std::vector<int>>& family);

}  // namespace qlock
