// dynamics.hpp -- transverse-field Ising network with local dissipation
//
//   H   = sum_i (h_z / 2) Z_i + sum_{i<j} (J_ij / 2) X_i X_j
//   L_i = sqrt(gamma) * (Z_i + i Y_i) / 2          (DissipatorConvention::paper)
//   d rho / dt = -i[H, rho] + sum_i (L_i rho L_i^+ - {L_i^+ L_i, rho} / 2)
//
// integrated with fixed-step classical RK4.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/linalg.hpp"
#include "qrc/rng.hpp"

namespace qrc {

enum class DissipatorConvention {
  paper,        // (Z + iY) / 2 on each qubit
  sigma_minus,  // (X + iY) / 2 on each qubit
};

inline std::string to_string(DissipatorConvention c) {
  return c == DissipatorConvention::paper ? "paper" : "sigma_minus";
}

inline DissipatorConvention parse_dissipator(const std::string& s) {
  if (s == "paper") return DissipatorConvention::paper;
  if (s == "sigma_minus") return DissipatorConvention::sigma_minus;
  throw std::invalid_argument("unknown dissipator convention '" + s + "'");
}

struct SpinNetworkModel {
  std::size_t n_qubits = 4;
  double h_z = 1.5;
  RealMatrix coupling{4, 4};  // symmetric, zero diagonal
  double gamma = 0.01;
  double coupling_scale = 0.0;  // J_s the couplings were drawn with
  std::uint64_t coupling_seed = 0;
  DissipatorConvention dissipator = DissipatorConvention::paper;

  void validate() const {
    if (n_qubits == 0) throw std::invalid_argument("SpinNetworkModel: need at least one qubit");
    if (coupling.rows() != n_qubits || coupling.cols() != n_qubits) {
      throw std::invalid_argument("SpinNetworkModel: coupling matrix must be n x n");
    }
    if (gamma < 0.0) throw std::invalid_argument("SpinNetworkModel: gamma must be non-negative");
    for (std::size_t i = 0; i < n_qubits; ++i) {
      if (coupling(i, i) != 0.0) throw std::invalid_argument("SpinNetworkModel: coupling diagonal must be zero");
      for (std::size_t j = i + 1; j < n_qubits; ++j)
        if (coupling(i, j) != coupling(j, i)) throw std::invalid_argument("SpinNetworkModel: coupling not symmetric");
    }
  }
};

/// Symmetric coupling matrix with zero diagonal; the upper triangle is drawn
/// row by row, i.i.d. uniform on [-j_s/2, j_s/2).
inline RealMatrix sample_coupling_matrix(double j_s, std::size_t n_qubits, std::uint64_t seed) {
  if (!(j_s >= 0.0)) throw std::invalid_argument("sample_coupling_matrix: j_s must be non-negative");
  RealMatrix j(n_qubits, n_qubits);
  Rng rng(seed);
  for (std::size_t a = 0; a < n_qubits; ++a)
    for (std::size_t b = a + 1; b < n_qubits; ++b) {
      const double v = j_s * (rng.uniform() - 0.5);
      j(a, b) = v;
      j(b, a) = v;
    }
  return j;
}

inline SpinNetworkModel make_model(double j_s, std::uint64_t seed, std::size_t n_qubits = 4, double h_z = 1.5,
                                   double gamma = 0.01,
                                   DissipatorConvention dissipator = DissipatorConvention::paper) {
  SpinNetworkModel m;
  m.n_qubits = n_qubits;
  m.h_z = h_z;
  m.gamma = gamma;
  m.coupling = sample_coupling_matrix(j_s, n_qubits, seed);
  m.coupling_scale = j_s;
  m.coupling_seed = seed;
  m.dissipator = dissipator;
  return m;
}

inline ComplexMatrix build_hamiltonian(const SpinNetworkModel& model) {
  model.validate();
  const std::size_t n = model.n_qubits;
  const std::size_t dim = detail::checked_dim(n);
  ComplexMatrix h(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) {
    double diag = 0.0;
    for (std::size_t q = 0; q < n; ++q) diag += ((x >> detail::bit_of(q, n)) & 1U) ? -0.5 * model.h_z : 0.5 * model.h_z;
    h(x, x) = diag;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double jab = model.coupling(a, b);
      if (jab == 0.0) continue;
      const std::size_t flip = (std::size_t{1} << detail::bit_of(a, n)) | (std::size_t{1} << detail::bit_of(b, n));
      for (std::size_t x = 0; x < dim; ++x) h(x, x ^ flip) += 0.5 * jab;
    }
  return h;
}

inline ComplexMatrix single_qubit_jump(double gamma, DissipatorConvention c) {
  const double amp = 0.5 * std::sqrt(gamma);
  if (c == DissipatorConvention::paper) return {{amp, amp}, {-amp, -amp}};
  return {{0.0, 2.0 * amp}, {0.0, 0.0}};
}

inline std::vector<ComplexMatrix> build_jump_operators(const SpinNetworkModel& model) {
  model.validate();
  const ComplexMatrix local = single_qubit_jump(model.gamma, model.dissipator);
  std::vector<ComplexMatrix> ops;
  ops.reserve(model.n_qubits);
  for (std::size_t q = 0; q < model.n_qubits; ++q) ops.push_back(embed_single(local, q, model.n_qubits));
  return ops;
}

/// Generator data for the master equation. Immutable after construction.
class LindbladSystem {
 public:
  LindbladSystem(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> jump_ops)
      : h_(std::move(hamiltonian)), jumps_(std::move(jump_ops)) {
    h_.require_square("LindbladSystem");
    n_qubits_ = n_qubits_of(h_);
    if (hermiticity_residual(h_) > 1e-12 * std::max(1.0, h_.max_abs())) {
      throw std::invalid_argument("LindbladSystem: Hamiltonian is not Hermitian");
    }
    const std::size_t d = h_.rows();
    ldagl_sum_ = ComplexMatrix(d, d);
    for (const auto& l : jumps_) {
      l.require_same_shape(h_, "LindbladSystem");
      jumps_adj_.push_back(l.adjoint());
      ldagl_sum_ += jumps_adj_.back() * l;
    }
    // H_eff = H - (i/2) sum L^+ L, so that
    //   -i[H, rho] - {sum L^+L, rho}/2 = -i (H_eff rho - rho H_eff^+).
    heff_ = h_;
    heff_.add_scaled(ldagl_sum_, cplx(0.0, -0.5));
    heff_adj_ = heff_.adjoint();
  }

  explicit LindbladSystem(const SpinNetworkModel& model)
      : LindbladSystem(build_hamiltonian(model), build_jump_operators(model)) {}

  const ComplexMatrix& hamiltonian() const { return h_; }
  const std::vector<ComplexMatrix>& jump_ops() const { return jumps_; }
  const std::vector<ComplexMatrix>& jump_ops_adjoint() const { return jumps_adj_; }
  const ComplexMatrix& ldagl_sum() const { return ldagl_sum_; }
  const ComplexMatrix& effective_hamiltonian() const { return heff_; }
  const ComplexMatrix& effective_hamiltonian_adjoint() const { return heff_adj_; }
  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return h_.rows(); }

 private:
  ComplexMatrix h_;
  std::vector<ComplexMatrix> jumps_;
  std::vector<ComplexMatrix> jumps_adj_;
  ComplexMatrix ldagl_sum_;
  ComplexMatrix heff_;
  ComplexMatrix heff_adj_;
  std::size_t n_qubits_ = 0;
};

inline ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const LindbladSystem& sys) {
  if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  ComplexMatrix out = sys.effective_hamiltonian() * rho;
  out -= rho * sys.effective_hamiltonian_adjoint();
  out *= cplx(0.0, -1.0);
  const auto& ls = sys.jump_ops();
  for (std::size_t q = 0; q < ls.size(); ++q) {
    // L rho L^+ = (L (L rho)^+)^+ keeps both products on the sparse side.
    const ComplexMatrix l_rho = ls[q] * rho;
    out += (ls[q] * l_rho.adjoint()).adjoint();
  }
  return out;
}

namespace detail {

// One RK4 step without re-symmetrization; complex-linear in rho.
inline ComplexMatrix rk4_step_linear(const ComplexMatrix& rho, const LindbladSystem& sys, double dt) {
  const ComplexMatrix k1 = lindblad_rhs(rho, sys);
  ComplexMatrix tmp = rho;
  tmp.add_scaled(k1, 0.5 * dt);
  const ComplexMatrix k2 = lindblad_rhs(tmp, sys);
  tmp = rho;
  tmp.add_scaled(k2, 0.5 * dt);
  const ComplexMatrix k3 = lindblad_rhs(tmp, sys);
  tmp = rho;
  tmp.add_scaled(k3, dt);
  const ComplexMatrix k4 = lindblad_rhs(tmp, sys);
  ComplexMatrix out = rho;
  out.add_scaled(k1, dt / 6.0);
  out.add_scaled(k2, dt / 3.0);
  out.add_scaled(k3, dt / 3.0);
  out.add_scaled(k4, dt / 6.0);
  return out;
}

struct StepPlan {
  std::size_t full_steps = 0;
  double remainder = 0.0;  // length of a trailing partial step, 0 if none
};

inline StepPlan plan_steps(double duration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  const double ratio = duration / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return {static_cast<std::size_t>(nearest), 0.0};
  const auto full = static_cast<std::size_t>(std::floor(ratio));
  return {full, duration - static_cast<double>(full) * dt};
}

}  // namespace detail

inline ComplexMatrix rk4_step(const ComplexMatrix& rho, const LindbladSystem& sys, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  return hermitian_part(detail::rk4_step_linear(rho, sys, dt));
}

/// Repeated rk4_step over `duration`. When duration/dt is not an integer
/// (to 1e-9 relative), a shorter final step covers the remainder.
inline ComplexMatrix evolve(ComplexMatrix rho, const LindbladSystem& sys, double duration, double dt) {
  const auto plan = detail::plan_steps(duration, dt);
  for (std::size_t s = 0; s < plan.full_steps; ++s) rho = rk4_step(rho, sys, dt);
  if (plan.remainder > 0.0) rho = rk4_step(rho, sys, plan.remainder);
  return rho;
}

// Largest dt * (spectral width of H) allowed per RK4 step. RK4 is only
// stable for |dt * omega| < 2.83 on the imaginary axis, and strong couplings
// push the widest Bohr frequency of H far beyond what a fixed dt = 0.025
// can follow; 0.2 keeps the per-step phase error near 3e-6.
inline constexpr double kMaxStepPhase = 0.2;

/// `dt_max`, or the largest step of the form duration / m that keeps
/// dt * width(H) <= kMaxStepPhase when dt_max would not.
inline double stable_step(const LindbladSystem& sys, double dt_max, double duration) {
  if (!(dt_max > 0.0) || !(duration > 0.0)) throw std::invalid_argument("stable_step: bad step or duration");
  const auto ev = hermitian_eigenvalues(sys.hamiltonian());
  const double width = ev.back() - ev.front();
  if (!(width * dt_max > kMaxStepPhase)) return dt_max;
  const double m = std::ceil(duration * width / kMaxStepPhase);
  return duration / m;
}

/// The linear map of `evolve(., sys, duration, dt)` as one d^2 x d^2 matrix
/// acting on row-major vec(rho). Built by pushing every basis matrix E_ab
/// through one RK4 step and raising that superoperator to the step count,
/// so one injection interval costs a single mat-vec.
class IntervalPropagator {
 public:
  IntervalPropagator(const LindbladSystem& sys, double duration, double dt) : dim_(sys.dim()) {
    const auto plan = detail::plan_steps(duration, dt);
    const std::size_t d2 = dim_ * dim_;
    map_ = ComplexMatrix::identity(d2);
    if (plan.full_steps > 0) {
      ComplexMatrix base = step_superoperator(sys, dt);
      std::size_t e = plan.full_steps;
      bool first = true;
      while (e > 0) {
        if (e & 1U) {
          map_ = first ? base : base * map_;
          first = false;
        }
        e >>= 1U;
        if (e > 0) base = base * base;
      }
    }
    if (plan.remainder > 0.0) map_ = step_superoperator(sys, plan.remainder) * map_;
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const { return hermitian_part(apply_linear(rho)); }

  // Without the final re-symmetrization.
  ComplexMatrix apply_linear(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) throw std::invalid_argument("IntervalPropagator: dimension mismatch");
    const auto v = matvec(map_, rho.data());
    ComplexMatrix out(dim_, dim_);
    std::copy(v.begin(), v.end(), out.data().begin());
    return out;
  }

  const ComplexMatrix& superoperator() const { return map_; }
  std::size_t dim() const { return dim_; }

 private:
  ComplexMatrix step_superoperator(const LindbladSystem& sys, double dt) const {
    const std::size_t d2 = dim_ * dim_;
    ComplexMatrix s(d2, d2);
    ComplexMatrix basis(dim_, dim_);
    for (std::size_t col = 0; col < d2; ++col) {
      basis.data()[col] = 1.0;
      const ComplexMatrix img = detail::rk4_step_linear(basis, sys, dt);
      basis.data()[col] = 0.0;
      for (std::size_t row = 0; row < d2; ++row) s(row, col) = img.data()[row];
    }
    return s;
  }

  std::size_t dim_;
  ComplexMatrix map_;
};

inline DensityMatrix all_zero_state(std::size_t n_qubits) {
  const std::size_t d = detail::checked_dim(n_qubits);
  DensityMatrix rho(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

inline DensityMatrix maximally_mixed_state(std::size_t n_qubits) {
  const std::size_t d = detail::checked_dim(n_qubits);
  DensityMatrix rho = ComplexMatrix::identity(d);
  rho *= 1.0 / static_cast<double>(d);
  return rho;
}

}  // namespace qrc
