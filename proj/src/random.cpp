#include "qlock/random.hpp"

#include <cmath>

namespace qlock {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  // Fill in a fixed order so the draw sequence does not depend on Eigen's
  // storage order.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows < cols) throw InvalidArgument("isometry needs rows >= cols");
  const Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < cols; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return q;
}

Matrix random_unitary(int n, Rng& rng) { return random_isometry(n, n, rng); }

DensityOperator random_density(const Dims& dims, const Parties& party, int rank, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(total_dimension(dims));
  if (rank < 1 || rank > n) throw InvalidArgument("random_density: rank out of range");
  const Matrix g = ginibre(n, rank, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator::trusted(std::move(m), dims, party);
}

DensityOperator random_pure(const Dims& dims, const Parties& party, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(total_dimension(dims));
  const Matrix g = ginibre(n, 1, rng);
  return DensityOperator::pure(g.col(0), dims, party);
}

}  // namespace qlock
