#include "qlock/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace qlock {

namespace {

constexpr double kLogFloor = 1e-300;
constexpr double kSupportTolerance = 1e-9;
constexpr double kRankFloor = 1e-12;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

Spectrum::Spectrum(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw InvalidArgument("empty spectrum");
  double sum = 0.0;
  for (double& v : p_) {
    if (v < 0.0 && v >= -tol::kPsd) v = 0.0;
    if (!(v >= 0.0 && v <= 1.0 + tol::kTrace)) {
      throw InvalidArgument("spectrum entries must lie in [0, 1]");
    }
    sum += v;
  }
  if (!(std::abs(sum - 1.0) <= tol::kTrace)) {
    throw InvalidArgument("spectrum does not sum to 1");
  }
}

Spectrum Spectrum::of(const DensityOperator& rho) {
  std::vector<double> v = clipped_spectrum(rho);
  // Eigensolver noise on a zero eigenvalue would otherwise count towards the
  // rank, which the low-order Renyi entropies are sensitive to.
  for (double& x : v) x = x > kRankFloor ? x : 0.0;
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
  return Spectrum(std::move(v));
}

void check_ensemble(const Ensemble& ensemble) {
  if (ensemble.empty()) throw InvalidArgument("empty ensemble");
  double sum = 0.0;
  for (const auto& m : ensemble) {
    if (!(m.probability >= 0.0)) throw InvalidArgument("negative ensemble weight");
    if (m.state.dims() != ensemble.front().state.dims()) {
      throw InvalidArgument("ensemble members live on different spaces");
    }
    sum += m.probability;
  }
  if (!(std::abs(sum - 1.0) <= tol::kTrace)) {
    throw InvalidArgument("ensemble weights do not sum to 1");
  }
}

DensityOperator ensemble_average(const Ensemble& ensemble) {
  check_ensemble(ensemble);
  const auto& first = ensemble.front().state;
  Matrix sum = Matrix::Zero(first.dim(), first.dim());
  for (const auto& m : ensemble) sum += m.probability * m.state.matrix();
  return DensityOperator::trusted(std::move(sum), first.dims(), first.party());
}

double shannon_entropy(const Spectrum& p) {
  double h = 0.0;
  for (double v : p.probabilities()) h -= xlog2x(v);
  return h;
}

double von_neumann_entropy(const DensityOperator& rho) {
  return shannon_entropy(Spectrum::of(rho));
}

double renyi_entropy(const Spectrum& p, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidArgument("Renyi order must lie in [0, 1)");
  }
  double sum = 0.0;
  for (double v : p.probabilities()) {
    if (v > 0.0) sum += std::pow(v, alpha);
  }
  return std::log2(sum) / (1.0 - alpha);
}

double renyi_entropy(const DensityOperator& rho, double alpha) {
  return renyi_entropy(Spectrum::of(rho), alpha);
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dims() != sigma.dims()) throw InvalidArgument("relative_entropy: dims differ");
  const EigenSystem es = eig_hermitian(sigma);
  double cross = 0.0;  // Tr rho log2 sigma
  double outside = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const Vector v = es.vectors.col(k);
    const double weight = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    const double s = es.values[k];
    if (s <= kSupportTolerance) {
      outside += weight;
      continue;
    }
    cross += weight * std::log2(std::max(s, kLogFloor));
  }
  if (outside > kSupportTolerance) return std::numeric_limits<double>::infinity();
  return -von_neumann_entropy(rho) - cross;
}

double log_negativity(const DensityOperator& rho, const BipartiteCut& cut) {
  const double norm = trace_norm(partial_transpose(rho, cut));
  return std::max(0.0, std::log2(norm));
}

double log_negativity(const DensityOperator& rho) {
  return log_negativity(rho, BipartiteCut::from_parties(rho.party()));
}

PptResult ppt_check(const DensityOperator& rho, const BipartiteCut& cut) {
  const EigenSystem es = eig_hermitian(partial_transpose(rho, cut));
  const double min_ev = es.values.minCoeff();
  return {min_ev >= -tol::kPsd, min_ev};
}

PptResult ppt_check(const DensityOperator& rho) {
  return ppt_check(rho, BipartiteCut::from_parties(rho.party()));
}

double concurrence_two_qubit(const DensityOperator& rho) {
  if (rho.dims() != Dims{2, 2}) {
    throw InvalidArgument("concurrence needs a two-qubit state with dims [2, 2]");
  }
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix tilde = yy * rho.matrix().conjugate() * yy;

  // sqrt(rho) via its eigendecomposition; the eigenvalues of
  // sqrt(sqrt(rho) tilde sqrt(rho)) are the Wootters lambdas.
  const EigenSystem es = eig_hermitian(rho.matrix());
  RealVector root = es.values.cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.vectors * root.asDiagonal() * es.vectors.adjoint();
  Matrix r = sqrt_rho * tilde * sqrt_rho;
  r = 0.5 * (r + r.adjoint()).eval();
  const EigenSystem rs = eig_hermitian(r);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(rs.values[i], 0.0));
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -xlog2x(x) - xlog2x(1.0 - x);
}

double eof_two_qubit(const DensityOperator& rho) {
  const double c = std::min(1.0, concurrence_two_qubit(rho));
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

double mixing_gap(const Ensemble& ensemble) {
  const DensityOperator avg = ensemble_average(ensemble);
  double weighted = 0.0;
  for (const auto& m : ensemble) weighted += m.probability * von_neumann_entropy(m.state);
  return von_neumann_entropy(avg) - weighted;
}

double marginal_entropy(const DensityOperator& rho, const BipartiteCut& cut) {
  cut.check(rho.dims(), rho.party());
  std::vector<int> drop;
  for (std::size_t k = 0; k < rho.num_subsystems(); ++k) {
    if (std::find(cut.a.begin(), cut.a.end(), static_cast<int>(k)) == cut.a.end()) {
      drop.push_back(static_cast<int>(k));
    }
  }
  if (drop.empty()) return von_neumann_entropy(rho);
  return von_neumann_entropy(partial_trace(rho, drop));
}

}  // namespace qlock
