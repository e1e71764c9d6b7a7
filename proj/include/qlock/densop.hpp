#pragma once

// Dense Hermitian operators on tensor-product spaces.
//
// Subsystems are ordered: subsystem 0 is the most significant digit of the
// computational-basis index. Every operator carries its subsystem dimensions
// and a party label (A, B or E) per subsystem; bipartite quantities are
// evaluated against a BipartiteCut built from those labels.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlock/errors.hpp"

namespace qlock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Party : char { A = 'A', B = 'B', E = 'E' };

using Dims = std::vector<int>;
using Parties = std::vector<Party>;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-9;
inline constexpr double kExact = 1e-12;
}  // namespace tol

/// Total matrix dimension allowed for explicit state constructions. Reads
/// QLOCK_DIM_CAP from the environment, defaulting to 4096.
std::size_t default_dimension_cap();

/// Product of dims; throws InvalidArgument on non-positive entries.
std::size_t total_dimension(std::span<const int> dims);

class HermitianOperator {
 public:
  /// Checks shape against dims/party and Hermiticity to tol::kHermitian.
  HermitianOperator(Matrix matrix, Dims dims, Parties party);

  const Matrix& matrix() const noexcept { return matrix_; }
  const Dims& dims() const noexcept { return dims_; }
  const Parties& party() const noexcept { return party_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  std::size_t num_subsystems() const noexcept { return dims_.size(); }
  double trace() const { return matrix_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator scaled(double factor) const;

 protected:
  struct Unchecked {};
  HermitianOperator(Unchecked, Matrix matrix, Dims dims, Parties party);

  Matrix matrix_;
  Dims dims_;
  Parties party_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator : public HermitianOperator {
 public:
  /// Full validation (Hermiticity, trace, minimum eigenvalue); throws
  /// InvalidState carrying the minimum eigenvalue on failure.
  DensityOperator(Matrix matrix, Dims dims, Parties party);

  /// Projector onto psi / |psi|.
  static DensityOperator pure(const Vector& psi, Dims dims, Parties party);

  /// Skips the eigenvalue check; Hermiticity and trace are still verified.
  /// For results that are positive by construction (channel outputs,
  /// reductions, products of states).
  static DensityOperator trusted(Matrix matrix, Dims dims, Parties party);

 private:
  DensityOperator(Unchecked, Matrix matrix, Dims dims, Parties party);
};

/// Assignment of non-E subsystems to the two sides of a bipartition.
struct BipartiteCut {
  std::vector<int> a;
  std::vector<int> b;

  /// A-side = subsystems labelled A, B-side = subsystems labelled B.
  static BipartiteCut from_parties(const Parties& party);

  /// Throws InvalidArgument unless a and b are disjoint, in range, and
  /// together cover every non-E subsystem.
  void check(const Dims& dims, const Parties& party) const;
};

struct EigenSystem {
  RealVector values;  // descending
  Matrix vectors;     // columns are eigenvectors
};

struct ValidationReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = false;

  std::string describe() const;
};

// --- composition and reordering -------------------------------------------

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// New subsystem k is old subsystem perm[k].
HermitianOperator permute_subsystems(const HermitianOperator& x,
                                     std::span<const int> perm);
DensityOperator permute_subsystems(const DensityOperator& x,
                                   std::span<const int> perm);

/// Permutation that moves all A-labelled factors first, then B, then E,
/// each group keeping its relative order.
std::vector<int> grouping_permutation(const Parties& party);

// --- reductions ------------------------------------------------------------

HermitianOperator partial_trace(const HermitianOperator& x,
                                std::span<const int> drop);
DensityOperator partial_trace(const DensityOperator& x,
                              std::span<const int> drop);

/// Transposes every B-side factor of the cut.
HermitianOperator partial_transpose(const HermitianOperator& x,
                                    const BipartiteCut& cut);

/// Precomputed index map for repeated partial transposes on one layout.
class PartialTransposer {
 public:
  PartialTransposer(const Dims& dims, const Parties& party, const BipartiteCut& cut);
  Matrix apply(const Matrix& m) const;

 private:
  std::vector<Eigen::Index> rest_offset_;
  std::vector<Eigen::Index> b_offset_;
};

/// Inserts `factor` as a new subsystem at position `position`.
DensityOperator insert_subsystem(const DensityOperator& x,
                                 const DensityOperator& factor, int position);

/// U_k x U_k^dagger with U acting on subsystem k only.
DensityOperator apply_local(const DensityOperator& x, int k, const Matrix& u);

/// Identity on every factor except `k`, where `op` acts.
Matrix embed_local(const Matrix& op, int k, std::span<const int> dims);

// --- spectra and norms -----------------------------------------------------

EigenSystem eig_hermitian(const HermitianOperator& x);
EigenSystem eig_hermitian(const Matrix& m);

/// Eigenvalues, descending, with values in [-tol::kPsd, 0] clipped to zero.
std::vector<double> clipped_spectrum(const HermitianOperator& x);

double trace_norm(const HermitianOperator& x);
double trace_norm(const Matrix& m);

double max_abs_diff(const Matrix& a, const Matrix& b);

ValidationReport validate(const HermitianOperator& x);
ValidationReport validate_matrix(const Matrix& m);

// --- helpers used across modules ------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Matrix basis_projector(int dim, int i, int j);  // |i><j|
std::string to_string(Party p);
Party party_from_string(const std::string& s);

}  // namespace qlock
