// linalg.hpp -- dense complex matrices and multi-qubit operations
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index, i.e.
// the leftmost tensor factor. For n qubits, qubit q lives at bit (n - 1 - q).

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrc {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
  }

  // Row-major nested initializer: ComplexMatrix{{1, 0}, {0, 1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  ComplexMatrix transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  cplx trace() const {
    require_square("trace");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  // this += s * o, without temporaries.
  void add_scaled(const ComplexMatrix& o, cplx s) {
    require_same_shape(o, "add_scaled");
    const double sr = s.real(), si = s.imag();
    auto* a = reinterpret_cast<double*>(data_.data());
    const auto* b = reinterpret_cast<const double*>(o.data_.data());
    for (std::size_t k = 0; k < data_.size(); ++k) {
      const double br = b[2 * k], bi = b[2 * k + 1];
      a[2 * k] += sr * br - si * bi;
      a[2 * k + 1] += sr * bi + si * br;
    }
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  void require_square(const char* who) const {
    if (!is_square()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
  }
  void require_same_shape(const ComplexMatrix& o, const char* who) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// A full-system state. Kept as a plain alias: every density matrix is a
// ComplexMatrix, and the dynamics produce intermediate non-state matrices.
using DensityMatrix = ComplexMatrix;

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
inline ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

namespace detail {

// out = a * b. Hand-split complex arithmetic: std::complex operator* carries
// NaN-recovery branches that dominate the inner loop.
inline void matmul_into(const ComplexMatrix& a, const ComplexMatrix& b, ComplexMatrix& out) {
  const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
  const auto* A = reinterpret_cast<const double*>(a.data().data());
  const auto* B = reinterpret_cast<const double*>(b.data().data());
  auto* C = reinterpret_cast<double*>(out.data().data());
  std::fill(C, C + 2 * n * p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = C + 2 * i * p;
    for (std::size_t k = 0; k < m; ++k) {
      const double ar = A[2 * (i * m + k)], ai = A[2 * (i * m + k) + 1];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = B + 2 * k * p;
      for (std::size_t j = 0; j < p; ++j) {
        const double br = brow[2 * j], bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
}

inline std::size_t checked_dim(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > 16) throw std::invalid_argument("qubit count out of range");
  return std::size_t{1} << n_qubits;
}

inline std::size_t bit_of(std::size_t qubit, std::size_t n_qubits) { return n_qubits - 1 - qubit; }

}  // namespace detail

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  detail::matmul_into(a, b, out);
  return out;
}

inline std::vector<cplx> matvec(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<cplx> y(a.rows());
  const auto* A = reinterpret_cast<const double*>(a.data().data());
  const auto* X = reinterpret_cast<const double*>(x.data());
  auto* Y = reinterpret_cast<double*>(y.data());
  const std::size_t m = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double yr = 0.0, yi = 0.0;
    const double* row = A + 2 * i * m;
    for (std::size_t k = 0; k < m; ++k) {
      const double ar = row[2 * k], ai = row[2 * k + 1];
      const double xr = X[2 * k], xi = X[2 * k + 1];
      yr += ar * xr - ai * xi;
      yi += ar * xi + ai * xr;
    }
    Y[2 * i] = yr;
    Y[2 * i + 1] = yi;
  }
  return y;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Largest |M - M^dagger| entry.
inline double hermiticity_residual(const ComplexMatrix& m) {
  m.require_square("hermiticity_residual");
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  return r;
}

/// (M + M^dagger) / 2, with an exactly real diagonal.
inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  m.require_square("hermitian_part");
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return out;
}

namespace pauli {
inline ComplexMatrix I() { return {{1.0, 0.0}, {0.0, 1.0}}; }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

/// Embeds a single-qubit operator on `qubit` of an n-qubit register.
inline ComplexMatrix embed_single(const ComplexMatrix& op, std::size_t qubit, std::size_t n_qubits) {
  if (op.rows() != 2 || op.cols() != 2) throw std::invalid_argument("embed_single: operator must be 2x2");
  if (qubit >= n_qubits) throw std::out_of_range("embed_single: qubit index out of range");
  const std::size_t dim = detail::checked_dim(n_qubits);
  const std::size_t bit = detail::bit_of(qubit, n_qubits);
  ComplexMatrix out(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t bi = (i >> bit) & 1U;
    for (std::size_t bj = 0; bj < 2; ++bj) {
      const std::size_t j = (i & ~(std::size_t{1} << bit)) | (bj << bit);
      out(i, j) = op(bi, bj);
    }
  }
  return out;
}

/// Bipartition of an n-qubit register: subsystem A versus the rest.
class QubitPartition {
 public:
  QubitPartition(std::vector<std::size_t> subsystem_a, std::size_t n_qubits)
      : a_(std::move(subsystem_a)), n_(n_qubits) {
    std::sort(a_.begin(), a_.end());
    a_.erase(std::unique(a_.begin(), a_.end()), a_.end());
    if (a_.empty() || a_.size() >= n_) {
      throw std::invalid_argument("QubitPartition: subsystem must be a nonempty proper subset");
    }
    if (a_.back() >= n_) throw std::out_of_range("QubitPartition: qubit index out of range");
  }

  const std::vector<std::size_t>& subsystem_a() const { return a_; }
  std::size_t n_qubits() const { return n_; }

  std::size_t mask() const {
    std::size_t m = 0;
    for (auto q : a_) m |= std::size_t{1} << detail::bit_of(q, n_);
    return m;
  }

  QubitPartition complement() const {
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < n_; ++q)
      if (!std::binary_search(a_.begin(), a_.end(), q)) rest.push_back(q);
    return {rest, n_};
  }

 private:
  std::vector<std::size_t> a_;
  std::size_t n_;
};

inline std::size_t n_qubits_of(const ComplexMatrix& rho) {
  rho.require_square("n_qubits_of");
  const std::size_t d = rho.rows();
  if (d < 2 || (d & (d - 1)) != 0) throw std::invalid_argument("matrix dimension is not a power of two");
  return static_cast<std::size_t>(std::countr_zero(d));
}

/// Reduced state on the qubits not in `traced`, basis ordered by ascending
/// remaining qubit index.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::vector<std::size_t> traced,
                                   std::size_t n_qubits) {
  const std::size_t dim = detail::checked_dim(n_qubits);
  if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("partial_trace: dimension mismatch");
  std::sort(traced.begin(), traced.end());
  traced.erase(std::unique(traced.begin(), traced.end()), traced.end());
  for (auto q : traced)
    if (q >= n_qubits) throw std::out_of_range("partial_trace: qubit index out of range");
  if (traced.size() >= n_qubits) throw std::invalid_argument("partial_trace: cannot trace out every qubit");

  std::vector<std::size_t> kept;
  for (std::size_t q = 0; q < n_qubits; ++q)
    if (!std::binary_search(traced.begin(), traced.end(), q)) kept.push_back(q);

  // Scatter a reduced index (bits in kept order, MSB first) into a full index.
  auto scatter = [n_qubits](std::size_t idx, const std::vector<std::size_t>& qubits) {
    std::size_t full = 0;
    const std::size_t k = qubits.size();
    for (std::size_t p = 0; p < k; ++p) {
      const std::size_t b = (idx >> (k - 1 - p)) & 1U;
      full |= b << detail::bit_of(qubits[p], n_qubits);
    }
    return full;
  };

  const std::size_t dk = std::size_t{1} << kept.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  std::vector<std::size_t> kept_full(dk), traced_full(dt);
  for (std::size_t i = 0; i < dk; ++i) kept_full[i] = scatter(i, kept);
  for (std::size_t t = 0; t < dt; ++t) traced_full[t] = scatter(t, traced);

  ComplexMatrix out(dk, dk);
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) acc += rho(kept_full[r] | traced_full[t], kept_full[c] | traced_full[t]);
      out(r, c) = acc;
    }
  return out;
}

/// Transposes the indices belonging to subsystem A, leaving the rest alone.
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, const QubitPartition& partition) {
  const std::size_t dim = detail::checked_dim(partition.n_qubits());
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("partial_transpose: dimension does not match partition");
  }
  const std::size_t mask = partition.mask();
  ComplexMatrix out(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t ii = (i & ~mask) | (j & mask);
      const std::size_t jj = (j & ~mask) | (i & mask);
      out(ii, jj) = rho(i, j);
    }
  return out;
}

inline constexpr double kHermitianTolerance = 1e-9;

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations. Inputs within kHermitianTolerance (relative to max |m|) of
/// Hermitian are symmetrized first; anything further off throws.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  m.require_square("hermitian_eigenvalues");
  const std::size_t n = m.rows();
  const double scale = m.max_abs();
  if (hermiticity_residual(m) > kHermitianTolerance * std::max(scale, 1e-300)) {
    throw std::domain_error("hermitian_eigenvalues: matrix is not Hermitian within tolerance");
  }
  ComplexMatrix a = hermitian_part(m);
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  auto off_norm2 = [&a, n] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return s;
  };
  double total2 = 0.0;
  for (const auto& z : a.data()) total2 += std::norm(z);
  const double eps2 = 1e-32 * total2;

  constexpr int kMaxSweeps = 64;
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_norm2() > eps2; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        // Phase rotation makes the pivot real; then a real Jacobi rotation
        // with t = tan(theta) annihilates it.
        const cplx phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q).
        const cplx u_pp = c, u_pq = s;
        const cplx u_qp = -s * std::conj(phase), u_qq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A U
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- U^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (off_norm2() > eps2 * 1e4) throw std::runtime_error("hermitian_eigenvalues: Jacobi iteration did not converge");

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double trace_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (double l : hermitian_eigenvalues(m)) s += std::abs(l);
  return s;
}

/// Re Tr(rho * obs). Throws if the imaginary residue exceeds 1e-10 (scaled
/// by the operand magnitudes), which signals a non-Hermitian argument.
inline double expectation(const ComplexMatrix& rho, const ComplexMatrix& obs) {
  if (!rho.is_square() || rho.rows() != obs.rows() || obs.rows() != obs.cols()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  cplx acc = 0.0;
  const std::size_t n = rho.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) acc += rho(i, k) * obs(k, i);
  const double tol = 1e-10 * std::max(1.0, rho.max_abs() * obs.max_abs() * static_cast<double>(n));
  if (std::abs(acc.imag()) > tol) throw std::domain_error("expectation: imaginary residue above tolerance");
  return acc.real();
}

/// <Z_q> straight from the diagonal.
inline double expectation_z(const ComplexMatrix& rho, std::size_t qubit, std::size_t n_qubits) {
  const std::size_t dim = detail::checked_dim(n_qubits);
  if (rho.rows() != dim || rho.cols() != dim) throw std::invalid_argument("expectation_z: dimension mismatch");
  if (qubit >= n_qubits) throw std::out_of_range("expectation_z: qubit index out of range");
  const std::size_t bit = detail::bit_of(qubit, n_qubits);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += (((i >> bit) & 1U) ? -1.0 : 1.0) * rho(i, i).real();
  return acc;
}

// Small dense real matrix, row-major. Used for features and readout weights.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace qrc
