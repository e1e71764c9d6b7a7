#include "qlock/optim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

#include "qlock/channels.hpp"
#include "qlock/random.hpp"
#include "qlock/states.hpp"

namespace qlock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankThreshold = 1e-12;
constexpr double kMemberThreshold = 1e-14;
constexpr double kArmijo = 1e-4;

double inner(const Matrix& a, const Matrix& b) {
  return (a.array().conjugate() * b.array()).sum().real();
}

std::vector<int> complement(const std::vector<int>& keep, std::size_t n) {
  std::vector<int> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::find(keep.begin(), keep.end(), static_cast<int>(k)) == keep.end()) {
      out.push_back(static_cast<int>(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convex roof
// ---------------------------------------------------------------------------

// Average marginal entropy of the ensemble generated by an m x r isometry U
// acting on the scaled eigenvectors (columns of `coeffs`), with the A factors
// leading in the basis ordering.
class RoofEngine {
 public:
  RoofEngine(Matrix coeffs, int dim_a, RoofObjective objective)
      : coeffs_(std::move(coeffs)),
        dim_a_(dim_a),
        dim_b_(static_cast<int>(coeffs_.rows()) / dim_a),
        objective_(objective) {}

  /// Objective in bits; if `egrad` is set, also the Euclidean gradient with
  /// respect to U in the real inner product Re Tr(X^H Y).
  double evaluate(const Matrix& u, Matrix* egrad) const {
    const Matrix psi = coeffs_ * u.transpose();
    Matrix g;
    if (egrad) g = Matrix::Zero(psi.rows(), psi.cols());
    double total = 0.0;
    for (Eigen::Index j = 0; j < psi.cols(); ++j) {
      // Column j as a dim_b x dim_a column-major map is Phi^T, Phi being the
      // dim_a x dim_b coefficient matrix of the member.
      const Eigen::Map<const Matrix> mt(psi.col(j).data(), dim_b_, dim_a_);
      Matrix omega = (mt.adjoint() * mt).conjugate();
      const double p = omega.trace().real();
      if (p < kMemberThreshold) continue;
      Eigen::SelfAdjointEigenSolver<Matrix> es(omega / p);
      const RealVector x = es.eigenvalues().cwiseMax(0.0);
      std::vector<double> d(static_cast<std::size_t>(x.size()));
      total += p * member_entropy(x, egrad ? &d : nullptr);
      if (egrad) {
        const Matrix grad_f = es.eigenvectors() *
                              Eigen::Map<const RealVector>(d.data(), x.size()).asDiagonal() *
                              es.eigenvectors().adjoint();
        Eigen::Map<Matrix> gt(g.col(j).data(), dim_b_, dim_a_);
        gt = mt * grad_f.transpose();
      }
    }
    if (egrad) *egrad = 2.0 * (coeffs_.adjoint() * g).transpose();
    return total;
  }

 private:
  // Entropy of the normalised marginal with eigenvalues x; fills the
  // eigenvalues of the derivative of p*S(omega/p) with respect to omega.
  double member_entropy(const RealVector& x, std::vector<double>* d) const {
    const double ln2 = std::numbers::ln2;
    if (objective_.kind == RoofObjective::Kind::kVonNeumann) {
      double h = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi > 0.0) h -= xi * std::log2(xi);
        if (d) (*d)[i] = -std::log2(std::max(xi, 1e-300));
      }
      return h;
    }
    const double a = objective_.alpha;
    double t = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > kMemberThreshold) t += std::pow(x[i], a);
    }
    const double s = std::log2(t) / (1.0 - a);
    if (d) {
      const double scale = a / ((1.0 - a) * ln2);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double base = s - scale;
        (*d)[i] = x[i] > kMemberThreshold ? scale * std::pow(x[i], a - 1.0) / t + base : base;
      }
    }
    return s;
  }

  Matrix coeffs_;
  int dim_a_;
  int dim_b_;
  RoofObjective objective_;
};

Matrix polar_retract(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Projection onto the tangent space of the Stiefel manifold at u.
Matrix tangent(const Matrix& u, const Matrix& z) {
  const Matrix uz = u.adjoint() * z;
  return z - u * (0.5 * (uz + uz.adjoint()));
}

struct RestartOutcome {
  double value = kInf;
  Matrix u;
  bool converged = false;
  std::vector<double> history;
};

RestartOutcome run_restart(const RoofEngine& engine, Matrix u, const RoofSettings& s) {
  RestartOutcome out;
  Matrix egrad;
  double f = engine.evaluate(u, &egrad);
  Matrix grad = tangent(u, egrad);
  Matrix dir = -grad;
  double step = 1.0 / std::max(1.0, std::sqrt(inner(grad, grad)));
  int small = 0;
  out.history.push_back(f);

  for (int it = 0; it < s.iterations; ++it) {
    const double gnorm2 = inner(grad, grad);
    if (gnorm2 < 1e-24) {
      out.converged = true;
      break;
    }
    double slope = inner(grad, dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -gnorm2;
    }
    double t = step * 2.0;
    Matrix candidate;
    double fc = kInf;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      candidate = polar_retract(u + t * dir);
      fc = engine.evaluate(candidate, nullptr);
      if (fc <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No descent at machine precision along this direction.
      if (dir.isApprox(-grad)) {
        out.converged = true;
        break;
      }
      dir = -grad;
      continue;
    }
    step = t;
    Matrix new_egrad;
    fc = engine.evaluate(candidate, &new_egrad);
    const Matrix new_grad = tangent(candidate, new_egrad);
    const Matrix old_grad_moved = tangent(candidate, grad);
    const double beta = std::max(0.0, inner(new_grad, new_grad - old_grad_moved) / gnorm2);
    const bool reset = (it + 1) % 50 == 0;
    dir = -new_grad + (reset ? 0.0 : beta) * tangent(candidate, dir);

    const double decrease = f - fc;
    u = std::move(candidate);
    grad = new_grad;
    f = fc;
    out.history.push_back(f);
    small = decrease < s.tolerance ? small + 1 : 0;
    if (small >= 3) {
      out.converged = true;
      break;
    }
  }
  out.value = f;
  out.u = std::move(u);
  return out;
}

// ---------------------------------------------------------------------------
// Relative entropy to the PPT set
// ---------------------------------------------------------------------------

RealVector project_simplex(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

// Frobenius projection onto the density matrices.
Matrix project_density(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector x = project_simplex(es.eigenvalues());
  return es.eigenvectors() * x.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

class PptSolver {
 public:
  PptSolver(const DensityOperator& rho, const BipartiteCut& cut)
      : rho_(rho.matrix()),
        pt_(rho.dims(), rho.party(), cut),
        dim_(rho.dim()),
        entropy_(von_neumann_entropy(rho)) {}

  const PartialTransposer& transposer() const { return pt_; }

  /// Relative entropy S(rho || sigma) in bits; gradient with respect to
  /// sigma in the Frobenius inner product when requested.
  double evaluate(const Matrix& sigma, Matrix* grad) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.adjoint()));
    const RealVector& s = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Matrix w = v.adjoint() * rho_ * v;
    double cross = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double wk = w(k, k).real();
      if (s[k] <= 1e-300) {
        if (wk > 1e-12) return kInf;
        continue;
      }
      cross += wk * std::log2(s[k]);
    }
    if (grad) {
      const RealVector sf = s.cwiseMax(1e-14);
      Matrix l(s.size(), s.size());
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        for (Eigen::Index j = 0; j < s.size(); ++j) {
          const double a = sf[i];
          const double b = sf[j];
          l(i, j) = std::abs(a - b) <= 1e-12 * std::max(a, b)
                        ? 2.0 / (a + b)
                        : (std::log(a) - std::log(b)) / (a - b);
        }
      }
      const Matrix inner_m = w.cwiseProduct(l);
      *grad = -(1.0 / std::numbers::ln2) * (v * inner_m * v.adjoint());
    }
    return -entropy_ - cross;
  }

  /// Projection onto {sigma >= 0, Tr sigma = 1, sigma^T_B >= 0} by Dykstra's
  /// alternating projections, then mixed with the maximally mixed state
  /// just enough to remove residual negativity.
  Matrix project(const Matrix& y) const {
    Matrix x = y;
    Matrix p = Matrix::Zero(dim_, dim_);
    Matrix q = Matrix::Zero(dim_, dim_);
    for (int it = 0; it < 2000; ++it) {
      const Matrix u = project_density(x + p);
      p = x + p - u;
      const Matrix xn = pt_.apply(project_density(pt_.apply(u + q)));
      q = u + q - xn;
      const double change = (xn - x).norm();
      x = xn;
      if (change < 1e-13) break;
    }
    return repair(x);
  }

  Matrix repair(const Matrix& x) const {
    Matrix out = 0.5 * (x + x.adjoint());
    out /= out.trace().real();
    const double mu = std::max({0.0, -min_eigenvalue(out), -min_eigenvalue(pt_.apply(out))});
    if (mu > 0.0) {
      const double t = mu * dim_ / (1.0 + mu * dim_);
      out = (1.0 - t) * out + (t / dim_) * Matrix::Identity(dim_, dim_);
    }
    return out;
  }

 private:
  Matrix rho_;
  PartialTransposer pt_;
  Eigen::Index dim_;
  double entropy_;
};

}  // namespace

// ---------------------------------------------------------------------------

RoofObjective RoofObjective::renyi(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("Renyi order must lie in [0, 1)");
  return {Kind::kRenyi, alpha};
}

double RoofObjective::entropy(const Spectrum& spectrum) const {
  return kind == Kind::kVonNeumann ? shannon_entropy(spectrum)
                                   : renyi_entropy(spectrum, alpha);
}

std::string RoofObjective::name() const {
  return kind == Kind::kVonNeumann ? "von_neumann" : "renyi:" + std::to_string(alpha);
}

RoofResult convex_roof_upper(const RoofProblem& problem) {
  const DensityOperator& state = problem.state;
  const RoofSettings& s = problem.settings;
  problem.cut.check(state.dims(), state.party());
  if (problem.cut.a.empty() || problem.cut.b.empty()) {
    throw InvalidArgument("convex roof needs a non-trivial cut");
  }
  if (state.num_subsystems() != problem.cut.a.size() + problem.cut.b.size()) {
    throw InvalidArgument("convex roof: trace out E subsystems first");
  }
  if (s.restarts < 1 || s.iterations < 0) throw InvalidArgument("bad roof settings");

  // A factors first so member marginals are plain matrix products.
  std::vector<int> perm = problem.cut.a;
  perm.insert(perm.end(), problem.cut.b.begin(), problem.cut.b.end());
  std::vector<int> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = static_cast<int>(k);
  const DensityOperator ordered = permute_subsystems(state, perm);
  int dim_a = 1;
  for (int k : problem.cut.a) dim_a *= state.dims()[k];

  const EigenSystem es = eig_hermitian(ordered);
  int rank = 0;
  while (rank < es.values.size() && es.values[rank] > kRankThreshold) ++rank;
  Matrix coeffs(ordered.dim(), rank);
  for (int k = 0; k < rank; ++k) coeffs.col(k) = std::sqrt(es.values[k]) * es.vectors.col(k);

  const int m = s.ensemble_size > 0 ? s.ensemble_size : rank + 2;
  if (m < rank) throw InvalidArgument("ensemble_size must be at least the rank");

  const RoofEngine engine(coeffs, dim_a, s.objective);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(s.restarts));
  auto start_for = [&](int r) -> Matrix {
    if (r == 0 || rank == 1) {
      Matrix u = Matrix::Zero(m, rank);
      u.topRows(rank).setIdentity();
      return u;
    }
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(r)));
    return random_isometry(m, rank, rng);
  };
  const int restarts = rank == 1 ? 1 : s.restarts;
  const int threads = std::max(1, s.threads);
  for (int base = 0; base < restarts; base += threads) {
    std::vector<std::future<RestartOutcome>> jobs;
    for (int r = base; r < std::min(restarts, base + threads); ++r) {
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                [&, r] { return run_restart(engine, start_for(r), s); }));
    }
    for (int r = base; r < std::min(restarts, base + threads); ++r) {
      outcomes[r] = jobs[r - base].get();
    }
  }
  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    if (outcomes[r].value < outcomes[best].value) best = r;
  }

  RoofResult result;
  result.best_restart = best;
  result.converged = outcomes[best].converged;
  result.history = outcomes[best].history;

  const Matrix psi = coeffs * outcomes[best].u.transpose();
  const std::vector<int> drop = complement(problem.cut.a, state.num_subsystems());
  double value = 0.0;
  Matrix recon = Matrix::Zero(state.dim(), state.dim());
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    const double p = psi.col(j).squaredNorm();
    if (p < kMemberThreshold) continue;
    const DensityOperator member = permute_subsystems(
        DensityOperator::pure(psi.col(j), ordered.dims(), ordered.party()), inverse);
    value += p * s.objective.entropy(Spectrum::of(partial_trace(member, drop)));
    recon += p * member.matrix();
    result.ensemble.push_back({p, member});
  }
  result.value = value;
  result.reconstruction_error = max_abs_diff(recon, state.matrix());
  return result;
}

RoofResult convex_roof_upper(const DensityOperator& state, const RoofSettings& settings) {
  return convex_roof_upper({state, BipartiteCut::from_parties(state.party()), settings});
}

RexResult rel_ent_ppt(const RexProblem& problem) {
  const DensityOperator& rho = problem.state;
  const RexSettings& s = problem.settings;
  if (!(s.tolerance > 0.0) || s.max_iterations < 1) throw InvalidArgument("bad solver settings");
  problem.cut.check(rho.dims(), rho.party());

  const PptSolver solver(rho, problem.cut);
  const PartialTransposer& pt = solver.transposer();
  const auto dim = static_cast<Eigen::Index>(rho.dim());

  RexResult result{0.0, rho, true, 0, 0.0};
  const double rho_pt_min = min_eigenvalue(pt.apply(rho.matrix()));
  if (rho_pt_min >= -tol::kPsd) {
    result.ppt_min_eigenvalue = rho_pt_min;
    return result;
  }

  // Feasible start: the least admixture of white noise that makes rho PPT.
  const double mu = -rho_pt_min;
  const double t0 = mu * dim / (1.0 + mu * dim);
  Matrix sigma = (1.0 - t0) * rho.matrix() + (t0 / dim) * Matrix::Identity(dim, dim);
  sigma = solver.repair(sigma);

  Matrix grad;
  double f = solver.evaluate(sigma, &grad);
  double alpha = 1.0 / std::max(1e-12, grad.norm());
  int small = 0;
  bool converged = false;
  int it = 0;
  for (; it < s.max_iterations; ++it) {
    const Matrix target = solver.project(sigma - alpha * grad);
    const Matrix d = target - sigma;
    const double slope = inner(grad, d);
    if (!(slope < -1e-15)) {
      converged = true;
      break;
    }
    double lambda = 1.0;
    double fc = kInf;
    Matrix candidate;
    for (int k = 0; k < 50; ++k) {
      candidate = sigma + lambda * d;
      fc = solver.evaluate(candidate, nullptr);
      if (fc <= f + kArmijo * lambda * slope) break;
      lambda *= 0.5;
    }
    if (!(fc <= f + kArmijo * lambda * slope)) {
      converged = true;
      break;
    }
    Matrix new_grad;
    fc = solver.evaluate(candidate, &new_grad);
    const Matrix step = candidate - sigma;
    const double sy = inner(step, new_grad - grad);
    alpha = sy > 0.0 ? std::clamp(inner(step, step) / sy, 1e-10, 1e10) : 1e10;

    const double decrease = f - fc;
    sigma = std::move(candidate);
    grad = std::move(new_grad);
    f = fc;
    small = decrease < s.tolerance ? small + 1 : 0;
    if (small >= 5) {
      converged = true;
      break;
    }
  }

  sigma = solver.repair(sigma);
  result.closest_state = DensityOperator::trusted(sigma, rho.dims(), rho.party());
  result.value = relative_entropy(rho, result.closest_state);
  result.converged = converged;
  result.iterations = it;
  result.ppt_min_eigenvalue = min_eigenvalue(pt.apply(sigma));
  return result;
}

RexResult rel_ent_ppt(const DensityOperator& state, const RexSettings& settings) {
  return rel_ent_ppt({state, BipartiteCut::from_parties(state.party()), settings});
}

ErDropResult er_drop_experiment(const DensityOperator& rho, int qubit,
                                const RexSettings& settings) {
  if (qubit < 0 || qubit >= static_cast<int>(rho.num_subsystems())) {
    throw InvalidArgument("qubit index out of range");
  }
  if (rho.party()[qubit] != Party::A || rho.dims()[qubit] != 2) {
    throw InvalidArgument("dropped subsystem must be a qubit on party A");
  }
  const RexResult before = rel_ent_ppt(rho, settings);
  const RexResult measured = rel_ent_ppt(dephase_subsystem(rho, qubit), settings);
  const RexResult twirled = rel_ent_ppt(pauli_twirl_qubit(rho, qubit), settings);
  ErDropResult out;
  out.before = before.value;
  out.after_measurement = measured.value;
  out.after_twirl = twirled.value;
  out.measurement_drop = before.value - measured.value;
  out.twirl_drop = before.value - twirled.value;
  out.converged = before.converged && measured.converged && twirled.converged;
  return out;
}

FlagAdditivity flag_additivity_check(const DensityOperator& rho,
                                     const DensityOperator& rho_tilde, double p,
                                     const RoofSettings& settings) {
  const DensityOperator flagged = flag_mixture(rho, rho_tilde, p);
  FlagAdditivity out;
  out.flagged = convex_roof_upper(flagged, settings).value;
  out.first = convex_roof_upper(rho, settings).value;
  out.second = convex_roof_upper(rho_tilde, settings).value;
  out.slack = std::abs(out.flagged - p * out.first - (1.0 - p) * out.second);
  return out;
}

LockingGap locking_gap_lower_bound(const DensityOperator& rho1, const DensityOperator& gamma1,
                                   double eps, const RoofSettings& settings) {
  const FlaggedPair pair = flagged_pair(rho1, gamma1, eps);
  bool exact = true;
  auto branch_value = [&](const DensityOperator& x) {
    const BipartiteCut cut = BipartiteCut::from_parties(x.party());
    const EigenSystem es = eig_hermitian(x);
    if (es.values[0] >= 1.0 - 1e-10) {
      const auto drop = complement(cut.a, x.num_subsystems());
      return settings.objective.entropy(Spectrum::of(partial_trace(x, drop)));
    }
    if (settings.objective.kind == RoofObjective::Kind::kVonNeumann && x.dims() == Dims{2, 2}) {
      return eof_two_qubit(x);
    }
    exact = false;
    return convex_roof_upper(x, settings).value;
  };
  LockingGap out;
  out.flagged_value = (1.0 - eps) * branch_value(rho1) + eps * branch_value(gamma1);
  out.reduced_upper = convex_roof_upper(pair.reduced, settings).value;
  out.gap = out.flagged_value - out.reduced_upper;
  out.certified = exact;
  return out;
}

}  // namespace qlock
