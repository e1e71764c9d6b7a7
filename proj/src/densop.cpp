#include "qlock/densop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace qlock {

namespace {

std::vector<std::size_t> strides_of(std::span<const int> dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) {
    strides[k - 1] = strides[k] * static_cast<std::size_t>(dims[k]);
  }
  return strides;
}

// For every basis index, the part of the linear index contributed by the
// subsystems flagged in `selected`.
std::vector<std::size_t> partial_offsets(std::span<const int> dims,
                                         const std::vector<bool>& selected) {
  const auto strides = strides_of(dims);
  const std::size_t total = total_dimension(dims);
  std::vector<std::size_t> out(total, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::size_t acc = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const std::size_t digit = rem / strides[k];
      rem %= strides[k];
      if (selected[k]) acc += digit * strides[k];
    }
    out[idx] = acc;
  }
  return out;
}

void check_shape(const Matrix& m, const Dims& dims, const Parties& party) {
  if (dims.size() != party.size()) {
    throw InvalidArgument("dims and party lists differ in length");
  }
  if (dims.empty()) throw InvalidArgument("operator needs at least one subsystem");
  if (m.rows() != m.cols()) throw InvalidArgument("matrix is not square");
  if (static_cast<std::size_t>(m.rows()) != total_dimension(dims)) {
    throw InvalidArgument("matrix dimension does not match product of dims");
  }
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<int> checked_permutation(std::span<const int> perm, std::size_t n) {
  if (perm.size() != n) throw InvalidArgument("permutation length mismatch");
  std::vector<int> sorted(perm.begin(), perm.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (sorted[k] != static_cast<int>(k)) {
      throw InvalidArgument("not a permutation of subsystem indices");
    }
  }
  return {perm.begin(), perm.end()};
}

Matrix permute_matrix(const Matrix& m, const Dims& dims, std::span<const int> perm,
                      Dims& new_dims) {
  const auto old_strides = strides_of(dims);
  new_dims.resize(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) new_dims[k] = dims[perm[k]];
  const auto new_strides = strides_of(new_dims);
  const std::size_t total = total_dimension(dims);

  std::vector<Eigen::Index> map(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::size_t old = 0;
    for (std::size_t k = 0; k < new_dims.size(); ++k) {
      const std::size_t digit = rem / new_strides[k];
      rem %= new_strides[k];
      old += digit * old_strides[perm[k]];
    }
    map[idx] = static_cast<Eigen::Index>(old);
  }
  const auto n = static_cast<Eigen::Index>(total);
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(map[i], map[j]);
  }
  return out;
}

Matrix partial_trace_matrix(const Matrix& m, const Dims& dims,
                            std::span<const int> drop, Dims& kept_dims,
                            std::vector<int>& kept_index) {
  std::vector<bool> dropped(dims.size(), false);
  for (int k : drop) {
    if (k < 0 || k >= static_cast<int>(dims.size())) {
      throw InvalidArgument("partial trace index out of range");
    }
    dropped[k] = true;
  }
  kept_dims.clear();
  kept_index.clear();
  Dims dropped_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dropped[k]) {
      dropped_dims.push_back(dims[k]);
    } else {
      kept_dims.push_back(dims[k]);
      kept_index.push_back(static_cast<int>(k));
    }
  }
  if (kept_dims.empty()) throw InvalidArgument("cannot trace out every subsystem");
  if (dropped_dims.empty()) return m;

  const auto strides = strides_of(dims);
  auto offsets_for = [&](bool want_dropped, const Dims& sub) {
    const auto sub_strides = strides_of(sub);
    const std::size_t n = total_dimension(sub);
    std::vector<Eigen::Index> out(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      std::size_t rem = idx;
      std::size_t off = 0;
      std::size_t s = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (dropped[k] != want_dropped) continue;
        const std::size_t digit = rem / sub_strides[s];
        rem %= sub_strides[s];
        off += digit * strides[k];
        ++s;
      }
      out[idx] = static_cast<Eigen::Index>(off);
    }
    return out;
  };
  const auto keep_off = offsets_for(false, kept_dims);
  const auto drop_off = offsets_for(true, dropped_dims);

  const auto n = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (auto t : drop_off) acc += m(keep_off[r] + t, keep_off[c] + t);
      out(r, c) = acc;
    }
  }
  return out;
}

template <class T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<int>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (int k : idx) out.push_back(v[k]);
  return out;
}

}  // namespace

std::size_t default_dimension_cap() {
  if (const char* env = std::getenv("QLOCK_DIM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 4096;
}

std::size_t total_dimension(std::span<const int> dims) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw InvalidArgument("subsystem dimensions must be positive");
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

// --- HermitianOperator -----------------------------------------------------

HermitianOperator::HermitianOperator(Matrix matrix, Dims dims, Parties party)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), party_(std::move(party)) {
  check_shape(matrix_, dims_, party_);
  const double defect = hermiticity_defect(matrix_);
  if (!(defect <= tol::kHermitian)) {
    throw InvalidArgument("operator is not Hermitian (defect " +
                          std::to_string(defect) + ")");
  }
}

HermitianOperator::HermitianOperator(Unchecked, Matrix matrix, Dims dims,
                                     Parties party)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), party_(std::move(party)) {}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (dims_ != other.dims_) throw InvalidArgument("dimension mismatch in sum");
  return HermitianOperator(matrix_ + other.matrix_, dims_, party_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (dims_ != other.dims_) throw InvalidArgument("dimension mismatch in difference");
  return HermitianOperator(matrix_ - other.matrix_, dims_, party_);
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(Unchecked{}, matrix_ * factor, dims_, party_);
}

// --- DensityOperator -------------------------------------------------------

DensityOperator::DensityOperator(Matrix matrix, Dims dims, Parties party)
    : HermitianOperator(std::move(matrix), std::move(dims), std::move(party)) {
  const ValidationReport report = validate(*this);
  if (!report.ok) throw InvalidState(report.describe(), report.min_eigenvalue);
}

DensityOperator::DensityOperator(Unchecked u, Matrix matrix, Dims dims, Parties party)
    : HermitianOperator(u, std::move(matrix), std::move(dims), std::move(party)) {}

DensityOperator DensityOperator::pure(const Vector& psi, Dims dims, Parties party) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InvalidArgument("zero vector has no projector");
  const Vector unit = psi / norm;
  Matrix m = unit * unit.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return trusted(std::move(m), std::move(dims), std::move(party));
}

DensityOperator DensityOperator::trusted(Matrix matrix, Dims dims, Parties party) {
  check_shape(matrix, dims, party);
  const double herm = hermiticity_defect(matrix);
  const double tr = std::abs(matrix.trace() - Complex(1.0, 0.0));
  if (!(herm <= tol::kHermitian) || !(tr <= tol::kTrace)) {
    std::ostringstream os;
    os << "not a density operator: hermiticity defect " << herm
       << ", trace defect " << tr;
    throw InvalidState(os.str(), 0.0);
  }
  return DensityOperator(Unchecked{}, std::move(matrix), std::move(dims),
                         std::move(party));
}

// --- BipartiteCut ----------------------------------------------------------

BipartiteCut BipartiteCut::from_parties(const Parties& party) {
  BipartiteCut cut;
  for (std::size_t k = 0; k < party.size(); ++k) {
    if (party[k] == Party::A) cut.a.push_back(static_cast<int>(k));
    if (party[k] == Party::B) cut.b.push_back(static_cast<int>(k));
  }
  return cut;
}

void BipartiteCut::check(const Dims& dims, const Parties& party) const {
  std::vector<int> seen(dims.size(), 0);
  for (const auto* side : {&a, &b}) {
    for (int k : *side) {
      if (k < 0 || k >= static_cast<int>(dims.size())) {
        throw InvalidArgument("cut index out of range");
      }
      if (seen[k]++) throw InvalidArgument("cut sides overlap");
    }
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const bool needs = party[k] != Party::E;
    if (needs && !seen[k]) {
      throw InvalidArgument("cut does not cover subsystem " + std::to_string(k));
    }
    if (!needs && seen[k]) {
      throw InvalidArgument("cut contains E subsystem " + std::to_string(k));
    }
  }
}

// --- ValidationReport ------------------------------------------------------

std::string ValidationReport::describe() const {
  std::ostringstream os;
  os << (ok ? "valid" : "invalid") << " state: hermiticity defect "
     << hermiticity_defect << ", trace defect " << trace_defect
     << ", minimum eigenvalue " << min_eigenvalue;
  return os.str();
}

// --- composition -----------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  Parties party = a.party();
  party.insert(party.end(), b.party().begin(), b.party().end());
  return HermitianOperator(kron(a.matrix(), b.matrix()), std::move(dims),
                           std::move(party));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  Parties party = a.party();
  party.insert(party.end(), b.party().begin(), b.party().end());
  return DensityOperator::trusted(kron(a.matrix(), b.matrix()), std::move(dims),
                                  std::move(party));
}

HermitianOperator permute_subsystems(const HermitianOperator& x,
                                     std::span<const int> perm) {
  const auto p = checked_permutation(perm, x.num_subsystems());
  Dims dims;
  Matrix m = permute_matrix(x.matrix(), x.dims(), p, dims);
  Parties party(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) party[k] = x.party()[p[k]];
  return HermitianOperator(std::move(m), std::move(dims), std::move(party));
}

DensityOperator permute_subsystems(const DensityOperator& x, std::span<const int> perm) {
  const auto p = checked_permutation(perm, x.num_subsystems());
  Dims dims;
  Matrix m = permute_matrix(x.matrix(), x.dims(), p, dims);
  Parties party(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) party[k] = x.party()[p[k]];
  return DensityOperator::trusted(std::move(m), std::move(dims), std::move(party));
}

std::vector<int> grouping_permutation(const Parties& party) {
  std::vector<int> perm;
  for (Party want : {Party::A, Party::B, Party::E}) {
    for (std::size_t k = 0; k < party.size(); ++k) {
      if (party[k] == want) perm.push_back(static_cast<int>(k));
    }
  }
  return perm;
}

// --- reductions ------------------------------------------------------------

HermitianOperator partial_trace(const HermitianOperator& x, std::span<const int> drop) {
  Dims kept_dims;
  std::vector<int> kept;
  Matrix m = partial_trace_matrix(x.matrix(), x.dims(), drop, kept_dims, kept);
  return HermitianOperator(std::move(m), std::move(kept_dims), pick(x.party(), kept));
}

DensityOperator partial_trace(const DensityOperator& x, std::span<const int> drop) {
  Dims kept_dims;
  std::vector<int> kept;
  Matrix m = partial_trace_matrix(x.matrix(), x.dims(), drop, kept_dims, kept);
  return DensityOperator::trusted(std::move(m), std::move(kept_dims),
                                  pick(x.party(), kept));
}

PartialTransposer::PartialTransposer(const Dims& dims, const Parties& party,
                                     const BipartiteCut& cut) {
  cut.check(dims, party);
  std::vector<bool> on_b(dims.size(), false);
  for (int k : cut.b) on_b[k] = true;
  std::vector<bool> rest(on_b.size());
  for (std::size_t k = 0; k < on_b.size(); ++k) rest[k] = !on_b[k];
  for (auto v : partial_offsets(dims, on_b)) b_offset_.push_back(static_cast<Eigen::Index>(v));
  for (auto v : partial_offsets(dims, rest)) {
    rest_offset_.push_back(static_cast<Eigen::Index>(v));
  }
}

Matrix PartialTransposer::apply(const Matrix& m) const {
  const auto n = static_cast<Eigen::Index>(b_offset_.size());
  if (m.rows() != n || m.cols() != n) throw InvalidArgument("partial transpose: shape");
  Matrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = m(rest_offset_[i] + b_offset_[j], rest_offset_[j] + b_offset_[i]);
    }
  }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& x,
                                    const BipartiteCut& cut) {
  const PartialTransposer pt(x.dims(), x.party(), cut);
  return HermitianOperator(pt.apply(x.matrix()), x.dims(), x.party());
}

DensityOperator insert_subsystem(const DensityOperator& x, const DensityOperator& factor,
                                 int position) {
  const int n = static_cast<int>(x.num_subsystems());
  const int f = static_cast<int>(factor.num_subsystems());
  if (position < 0 || position > n) throw InvalidArgument("insert position out of range");
  const DensityOperator joined = tensor(x, factor);
  std::vector<int> perm;
  for (int k = 0; k < position; ++k) perm.push_back(k);
  for (int k = 0; k < f; ++k) perm.push_back(n + k);
  for (int k = position; k < n; ++k) perm.push_back(k);
  return permute_subsystems(joined, perm);
}

Matrix embed_local(const Matrix& op, int k, std::span<const int> dims) {
  if (k < 0 || k >= static_cast<int>(dims.size())) {
    throw InvalidArgument("subsystem index out of range");
  }
  if (op.rows() != dims[k] || op.cols() != dims[k]) {
    throw InvalidArgument("local operator does not match subsystem dimension");
  }
  std::size_t left = 1;
  std::size_t right = 1;
  for (int i = 0; i < k; ++i) left *= dims[i];
  for (std::size_t i = k + 1; i < dims.size(); ++i) right *= dims[i];
  const Matrix id_left = Matrix::Identity(static_cast<Eigen::Index>(left),
                                          static_cast<Eigen::Index>(left));
  const Matrix id_right = Matrix::Identity(static_cast<Eigen::Index>(right),
                                           static_cast<Eigen::Index>(right));
  return kron(kron(id_left, op), id_right);
}

DensityOperator apply_local(const DensityOperator& x, int k, const Matrix& u) {
  const Matrix full = embed_local(u, k, x.dims());
  Matrix m = full * x.matrix() * full.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator::trusted(std::move(m), x.dims(), x.party());
}

// --- spectra ---------------------------------------------------------------

EigenSystem eig_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
  // Eigen returns ascending order.
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

EigenSystem eig_hermitian(const HermitianOperator& x) { return eig_hermitian(x.matrix()); }

std::vector<double> clipped_spectrum(const HermitianOperator& x) {
  const EigenSystem es = eig_hermitian(x);
  std::vector<double> out(es.values.data(), es.values.data() + es.values.size());
  for (double& v : out) {
    if (v <= 0.0 && v >= -tol::kPsd) v = 0.0;
  }
  return out;
}

double trace_norm(const Matrix& m) {
  const EigenSystem es = eig_hermitian(m);
  return es.values.cwiseAbs().sum();
}

double trace_norm(const HermitianOperator& x) { return trace_norm(x.matrix()); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("shape mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

ValidationReport validate_matrix(const Matrix& m) {
  ValidationReport r;
  r.hermiticity_defect = hermiticity_defect(m);
  r.trace_defect = std::abs(m.trace() - Complex(1.0, 0.0));
  const Matrix sym = 0.5 * (m + m.adjoint());
  const EigenSystem es = eig_hermitian(sym);
  r.min_eigenvalue = es.values.size() ? es.values.minCoeff() : 0.0;
  r.ok = r.hermiticity_defect <= tol::kHermitian && r.trace_defect <= tol::kTrace &&
         r.min_eigenvalue >= -tol::kPsd;
  return r;
}

ValidationReport validate(const HermitianOperator& x) { return validate_matrix(x.matrix()); }

Matrix basis_projector(int dim, int i, int j) {
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

std::string to_string(Party p) { return std::string(1, static_cast<char>(p)); }

Party party_from_string(const std::string& s) {
  if (s == "A") return Party::A;
  if (s == "B") return Party::B;
  if (s == "E") return Party::E;
  throw InvalidArgument("unknown party label '" + s + "'");
}

}  // namespace qlock
