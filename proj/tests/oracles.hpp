// Independent reference implementations used only by the tests. They are
// deliberately naive: explicit index loops, kron chains, Gaussian
// elimination, Eigen's dense solver.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/linalg.hpp"
#include "qrc/rng.hpp"

namespace oracle {

using qrc::ComplexMatrix;
using qrc::cplx;

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Bit string of basis index x, qubit 0 first.
inline std::vector<int> bits(std::size_t x, std::size_t n) {
  std::vector<int> b(n);
  for (std::size_t q = 0; q < n; ++q) b[q] = static_cast<int>((x >> (n - 1 - q)) & 1U);
  return b;
}

inline std::size_t index_of(const std::vector<int>& b) {
  std::size_t x = 0;
  for (int v : b) x = (x << 1U) | static_cast<std::size_t>(v);
  return x;
}

/// sum over traced bit strings t of <kept_i, t| rho |kept_j, t>.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& traced, std::size_t n) {
  std::vector<bool> is_traced(n, false);
  for (auto q : traced) is_traced[q] = true;
  const std::size_t nk = n - traced.size();
  ComplexMatrix out(std::size_t{1} << nk, std::size_t{1} << nk);
  const std::size_t d = std::size_t{1} << n;
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) {
      const auto bx = bits(x, n), by = bits(y, n);
      bool same_traced = true;
      std::vector<int> kx, ky;
      for (std::size_t q = 0; q < n; ++q) {
        if (is_traced[q]) same_traced = same_traced && bx[q] == by[q];
        else {
          kx.push_back(bx[q]);
          ky.push_back(by[q]);
        }
      }
      if (same_traced) out(index_of(kx), index_of(ky)) += rho(x, y);
    }
  return out;
}

/// I (x) ... (x) op (x) ... (x) I by explicit kron chain.
inline ComplexMatrix embed(const ComplexMatrix& op, std::size_t qubit, std::size_t n) {
  ComplexMatrix out = qubit == 0 ? op : ComplexMatrix::identity(2);
  for (std::size_t q = 1; q < n; ++q) out = oracle::kron(out, q == qubit ? op : ComplexMatrix::identity(2));
  return out;
}

inline ComplexMatrix hamiltonian(const qrc::SpinNetworkModel& m) {
  const std::size_t n = m.n_qubits;
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < n; ++i) h.add_scaled(embed(qrc::pauli::Z(), i, n), m.h_z / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      h.add_scaled(embed(qrc::pauli::X(), i, n) * embed(qrc::pauli::X(), j, n), m.coupling(i, j) / 2);
    }
  return h;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) throw std::runtime_error("singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// (R^T R + lambda I)^{-1} R^T g by forming the normal equations explicitly.
inline std::vector<double> ridge(const qrc::RealMatrix& r, const std::vector<double>& g, double lambda) {
  const std::size_t p = r.cols();
  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < r.rows(); ++k) a[i][j] += r(k, i) * r(k, j);
    a[i][i] += lambda;
    for (std::size_t k = 0; k < r.rows(); ++k) b[i] += r(k, i) * g[k];
  }
  return gauss_solve(a, b);
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

/// Ascending eigenvalues from Eigen's self-adjoint solver.
inline std::vector<double> eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  std::vector<double> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  return v;
}

/// Trace norm via Eigen singular values.
inline double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  return svd.singularValues().sum();
}

inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, const std::vector<std::size_t>& a, std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix out(d, d);
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) {
      auto bx = bits(x, n), by = bits(y, n);
      for (auto q : a) std::swap(bx[q], by[q]);
      out(index_of(bx), index_of(by)) = rho(x, y);
    }
  return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline ComplexMatrix random_hermitian(qrc::Rng& rng, std::size_t d) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      m(i, j) = cplx(rng.normal(), rng.normal());
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline ComplexMatrix bell_pair() {
  ComplexMatrix b(4, 4);
  for (std::size_t i : {0U, 3U})
    for (std::size_t j : {0U, 3U}) b(i, j) = 0.5;
  return b;
}

}  // namespace oracle
