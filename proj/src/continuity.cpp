#include "qlock/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qlock/channels.hpp"
#include "qlock/optim.hpp"

namespace qlock {

namespace {

constexpr std::size_t kMaxTypeClasses = 20'000'000;

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double log_sum_exp(const std::vector<double>& x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - top);
  return top + std::log(sum);
}

// Calls visit(counts) for every composition of n into counts.size() parts.
template <class Visit>
void for_each_type(std::vector<int>& counts, std::size_t pos, int remaining, Visit& visit) {
  if (pos + 1 == counts.size()) {
    counts[pos] = remaining;
    visit(counts);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    counts[pos] = k;
    for_each_type(counts, pos + 1, remaining - k, visit);
  }
}

double binomial_log(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

SignedParts positive_negative_parts(const HermitianOperator& h) {
  const EigenSystem es = eig_hermitian(h);
  const RealVector pos = es.values.cwiseMax(0.0);
  const RealVector neg = (-es.values).cwiseMax(0.0);
  Matrix p = hermitize(es.vectors * pos.asDiagonal() * es.vectors.adjoint());
  Matrix n = hermitize(es.vectors * neg.asDiagonal() * es.vectors.adjoint());
  return {HermitianOperator(std::move(p), h.dims(), h.party()),
          HermitianOperator(std::move(n), h.dims(), h.party())};
}

AMDecomposition araki_moriya(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (rho1.dims() != rho2.dims()) throw InvalidArgument("araki_moriya: dims differ");
  const SignedParts parts = positive_negative_parts(rho1 - rho2);
  const double tp = parts.positive.trace();
  const double tn = parts.negative.trace();
  const double delta = 0.5 * (tp + tn);
  if (delta <= tol::kExact) throw InvalidArgument("araki_moriya: states coincide");

  const auto& dims = rho1.dims();
  const auto& party = rho1.party();
  DensityOperator gamma1 = DensityOperator::trusted(parts.negative.matrix() / tn, dims, party);
  DensityOperator gamma2 = DensityOperator::trusted(parts.positive.matrix() / tp, dims, party);
  Matrix sigma = (rho1.matrix() + delta * gamma1.matrix()) / (1.0 + delta);
  return {DensityOperator::trusted(hermitize(sigma), dims, party), std::move(gamma1),
          std::move(gamma2), delta};
}

// ---------------------------------------------------------------------------

Functional Functional::von_neumann() { return {Kind::kVonNeumann, 1.0, Matrix()}; }

Functional Functional::renyi(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("Renyi order must lie in [0, 1)");
  return {Kind::kRenyi, alpha, Matrix()};
}

Functional Functional::expectation(const HermitianOperator& observable) {
  return {Kind::kExpectation, 0.0, observable.matrix()};
}

Functional Functional::parse(const std::string& tag) {
  if (tag == "von_neumann") return von_neumann();
  const std::string prefix = "renyi:";
  if (tag.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(tag.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad Renyi order in '" + tag + "'");
    }
    if (used != tag.size() - prefix.size()) throw InvalidArgument("bad Renyi order in '" + tag + "'");
    return renyi(alpha);
  }
  throw InvalidArgument("unknown functional '" + tag + "'");
}

double Functional::operator()(const DensityOperator& rho) const {
  switch (kind_) {
    case Kind::kVonNeumann:
      return von_neumann_entropy(rho);
    case Kind::kRenyi:
      return renyi_entropy(rho, alpha_);
    case Kind::kExpectation:
      if (observable_.rows() != rho.dim()) throw InvalidArgument("observable has wrong size");
      return (observable_ * rho.matrix()).trace().real();
  }
  return 0.0;
}

std::string Functional::name() const {
  switch (kind_) {
    case Kind::kVonNeumann:
      return "von_neumann";
    case Kind::kRenyi: {
      std::ostringstream os;
      os << "renyi:" << alpha_;
      return os.str();
    }
    case Kind::kExpectation:
      return "expectation";
  }
  return {};
}

double affinity_defect(const Functional& f, const DensityOperator& rho,
                       const DensityOperator& sigma, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("mixing weight must lie in [0, 1]");
  if (rho.dims() != sigma.dims()) throw InvalidArgument("affinity_defect: dims differ");
  const DensityOperator mix = DensityOperator::trusted(
      p * rho.matrix() + (1.0 - p) * sigma.matrix(), rho.dims(), rho.party());
  return p * f(rho) + (1.0 - p) * f(sigma) - f(mix);
}

ProofDefects proof_defects(const Functional& f, const DensityOperator& rho1,
                           const DensityOperator& rho2) {
  const AMDecomposition am = araki_moriya(rho1, rho2);
  const double w = 1.0 / (1.0 + am.delta);
  const double f1 = f(rho1);
  const double f2 = f(rho2);
  const double fs = f(am.sigma);
  ProofDefects out;
  out.delta = am.delta;
  out.f_gamma1 = f(am.gamma1);
  out.f_gamma2 = f(am.gamma2);
  out.x1 = w * f1 + am.delta * w * out.f_gamma1 - fs;
  out.x2 = w * f2 + am.delta * w * out.f_gamma2 - fs;
  out.identity_residual = std::abs(f1 - f2 - am.delta * (out.f_gamma2 - out.f_gamma1) -
                                   (1.0 + am.delta) * (out.x1 - out.x2));
  return out;
}

ContinuityCheck continuity_bound_check(const Functional& f, double m, double c,
                                       const DensityOperator& rho1,
                                       const DensityOperator& rho2) {
  if (rho1.dims() != rho2.dims()) throw InvalidArgument("continuity_bound_check: dims differ");
  if (!(m >= 0.0 && c >= 0.0)) throw InvalidArgument("M and c must be non-negative");
  ContinuityCheck out;
  out.lhs = std::abs(f(rho1) - f(rho2));
  out.bound = m * trace_norm(rho1.matrix() - rho2.matrix()) * std::log2(rho1.dim()) + 4.0 * c;
  out.slack = out.bound - out.lhs;
  return out;
}

// ---------------------------------------------------------------------------

double TypicalSpectrum::truncated_renyi_density(double alpha) const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("Renyi order must lie in [0, 1)");
  const double log_kept = std::log(kept_mass);
  std::vector<double> terms;
  for (const auto& lv : levels) {
    if (!lv.typical) continue;
    terms.push_back(lv.log_multiplicity +
                    alpha * (std::numbers::ln2 * lv.log2_eigenvalue - log_kept));
  }
  return log_sum_exp(terms) / (std::numbers::ln2 * (1.0 - alpha) * n);
}

double TypicalSpectrum::full_renyi_density(double alpha) const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("Renyi order must lie in [0, 1)");
  std::vector<double> terms;
  terms.reserve(levels.size());
  for (const auto& lv : levels) {
    terms.push_back(lv.log_multiplicity + alpha * std::numbers::ln2 * lv.log2_eigenvalue);
  }
  return log_sum_exp(terms) / (std::numbers::ln2 * (1.0 - alpha) * n);
}

double TypicalSpectrum::truncated_entropy_density() const {
  const double log2_kept = std::log2(kept_mass);
  double h = 0.0;
  for (const auto& lv : levels) {
    if (!lv.typical) continue;
    const double log2_q = lv.log2_eigenvalue - log2_kept;
    const double weight = std::exp(lv.log_multiplicity + std::numbers::ln2 * log2_q);
    h -= weight * log2_q;
  }
  return h / n;
}

double TypicalSpectrum::trace_distance() const {
  double typical = 0.0;
  double rest = 0.0;
  for (const auto& lv : levels) {
    const double mass = std::exp(lv.log_multiplicity + std::numbers::ln2 * lv.log2_eigenvalue);
    (lv.typical ? typical : rest) += mass;
  }
  return typical * (1.0 / kept_mass - 1.0) + rest;
}

TypicalSpectrum typical_truncation(const Spectrum& base, int n, double epsilon) {
  if (n < 1) throw InvalidArgument("typical_truncation: n must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("typical_truncation: epsilon must be positive");

  std::vector<double> log2p;
  for (double v : base.probabilities()) {
    if (v > 0.0) log2p.push_back(std::log2(v));
  }
  const std::size_t k = log2p.size();
  // Number of compositions of n into k parts.
  const double log_types = binomial_log(n + static_cast<double>(k) - 1.0, k - 1.0);
  if (log_types > std::log(static_cast<double>(kMaxTypeClasses))) {
    throw InvalidArgument("typical_truncation: too many type classes");
  }
  const double entropy = shannon_entropy(base);

  TypicalSpectrum out{base, n, epsilon, {}, 0.0};
  std::vector<double> kept_terms;
  std::vector<int> counts(k, 0);
  const double log_n_fact = std::lgamma(n + 1.0);
  auto visit = [&](const std::vector<int>& c) {
    SpectrumLevel lv;
    lv.log_multiplicity = log_n_fact;
    for (std::size_t i = 0; i < k; ++i) {
      lv.log2_eigenvalue += c[i] * log2p[i];
      lv.log_multiplicity -= std::lgamma(c[i] + 1.0);
    }
    lv.typical = std::abs(-lv.log2_eigenvalue / n - entropy) <= epsilon;
    if (lv.typical) {
      kept_terms.push_back(lv.log_multiplicity + std::numbers::ln2 * lv.log2_eigenvalue);
    }
    out.levels.push_back(lv);
  };
  for_each_type(counts, 0, n, visit);
  if (kept_terms.empty()) throw InvalidArgument("typical_truncation: empty typical set");
  out.kept_mass = std::min(1.0, std::exp(log_sum_exp(kept_terms)));
  return out;
}

std::vector<GapRow> renyi_gap_curve(const Spectrum& base, double alpha,
                                    const std::vector<int>& n_grid, double epsilon) {
  std::vector<GapRow> rows;
  const double entropy = shannon_entropy(base);
  for (int n : n_grid) {
    const TypicalSpectrum t = typical_truncation(base, n, epsilon);
    rows.push_back({n, t.truncated_renyi_density(alpha), t.full_renyi_density(alpha), entropy,
                    t.kept_mass, t.trace_distance()});
  }
  return rows;
}

ContinuityCheck renyi_truncation_witness(const TypicalSpectrum& t, double alpha, double m,
                                         double c) {
  if (!(m >= 0.0 && c >= 0.0)) throw InvalidArgument("M and c must be non-negative");
  std::size_t support = 0;
  for (double v : t.base.probabilities()) support += v > 0.0 ? 1 : 0;
  ContinuityCheck out;
  out.lhs = t.n * std::abs(t.full_renyi_density(alpha) - t.truncated_renyi_density(alpha));
  out.bound = m * t.trace_distance() * t.n * std::log2(static_cast<double>(support)) + 4.0 * c;
  out.slack = out.bound - out.lhs;
  return out;
}

// ---------------------------------------------------------------------------

ReducedMeasureTag parse_reduced_measure(const std::string& tag) {
  if (tag == "log_negativity") return ReducedMeasureTag::kLogNegativity;
  if (tag == "eof_two_qubit") return ReducedMeasureTag::kEofTwoQubit;
  if (tag == "rel_ent_ppt") return ReducedMeasureTag::kRelEntPpt;
  throw InvalidArgument("unknown measure '" + tag + "'");
}

std::string to_string(ReducedMeasureTag tag) {
  switch (tag) {
    case ReducedMeasureTag::kLogNegativity:
      return "log_negativity";
    case ReducedMeasureTag::kEofTwoQubit:
      return "eof_two_qubit";
    case ReducedMeasureTag::kRelEntPpt:
      return "rel_ent_ppt";
  }
  return {};
}

ReducedMeasureResult reduced_measure_restricted(
    const DensityOperator& rho, ReducedMeasureTag measure,
    const std::vector<std::vector<int>>& family) {
  auto evaluate = [&](const DensityOperator& x) {
    switch (measure) {
      case ReducedMeasureTag::kLogNegativity:
        return log_negativity(x);
      case ReducedMeasureTag::kEofTwoQubit:
        return eof_two_qubit(x);
      case ReducedMeasureTag::kRelEntPpt:
        return rel_ent_ppt(x, RexSettings{}).value;
    }
    return 0.0;
  };

  ReducedMeasureResult out;
  out.family.emplace_back();
  for (const auto& member : family) {
    if (!member.empty()) out.family.push_back(member);
  }
  const double s0 = von_neumann_entropy(rho);
  for (const auto& member : out.family) {
    DensityOperator x = rho;
    for (int k : member) x = dephase_subsystem(x, k);
    const double e = evaluate(x);
    const double ds = von_neumann_entropy(x) - s0;
    out.measure.push_back(e);
    out.entropy_production.push_back(ds);
    out.terms.push_back(e + ds);
  }
  out.best = static_cast<std::size_t>(
      std::min_element(out.terms.begin(), out.terms.end()) - out.terms.begin());
  out.value = out.terms[out.best];
  return out;
}

}  // namespace qlock
