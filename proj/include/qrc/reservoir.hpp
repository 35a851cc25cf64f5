// reservoir.hpp -- the inject / evolve / measure loop
//
// Each injection step k:
//   1. reset the two input qubits to |psi(s1(k))>, |psi(s2(k))>, keeping the
//      joint reduced state of the other qubits,
//   2. evolve for delta_t under the master equation,
//   3. record <Z_i> for every qubit (plus a constant 1) and the seven
//      log-negativities.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/dynamics.hpp"
#include "qrc/entanglement.hpp"
#include "qrc/linalg.hpp"
#include "qrc/signals.hpp"

namespace qrc {

struct RunConfig {
  double t_final = 2750.0;
  double delta_t = 7.5;
  double dt = 0.025;
  std::size_t washout_steps = 50;
  std::pair<std::size_t, std::size_t> input_qubits{0, 1};
  bool sample_entanglement = true;
  // Per-step minimum-eigenvalue tracking (one extra eigensolve per step).
  bool track_diagnostics = false;
  // Use the precomputed interval propagator when the register is small
  // enough; otherwise step RK4 directly.
  bool use_propagator = true;

  std::size_t injection_count() const {
    if (!(delta_t > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("RunConfig: bad time parameters");
    return static_cast<std::size_t>(std::floor(t_final / delta_t + 1e-9));
  }

  void validate(std::size_t tau_max) const {
    if (!(dt > 0.0)) throw std::invalid_argument("RunConfig: dt must be positive");
    if (!(delta_t >= dt)) throw std::invalid_argument("RunConfig: delta_t must be at least dt");
    if (input_qubits.first == input_qubits.second) throw std::invalid_argument("RunConfig: input qubits must differ");
    const std::size_t k = injection_count();
    if (k < washout_steps + 2 * (tau_max + 10)) {
      throw std::invalid_argument("RunConfig: t_final/delta_t too short for washout_steps + 2*(tau_max + 10)");
    }
  }
};

struct RunDiagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();  // only with track_diagnostics
  double min_raw_negativity = std::numeric_limits<double>::infinity();
  double max_input_reset_error = 0.0;  // | <Z_q> / Tr rho - (1 - 2 s) | right after injection
};

struct TrajectoryRecord {
  RealMatrix features;      // K x (n + 1): <Z_1> .. <Z_n>, 1
  RealMatrix entanglement;  // K x 7: E1 E2 E3 E4 E12 E13 E14 (NaN when not sampled)
  RealMatrix injected;      // K x 2: s1(k), s2(k)
  RunDiagnostics diagnostics;

  std::size_t steps() const { return features.rows(); }
  std::size_t n_qubits() const { return features.cols() - 1; }
};

/// Replaces the two input qubits of `rho` by the encoded inputs; the other
/// qubits keep their joint reduced state.
inline DensityMatrix inject(const DensityMatrix& rho, double s1, double s2,
                            std::pair<std::size_t, std::size_t> input_qubits) {
  const std::size_t n = n_qubits_of(rho);
  const auto [q1, q2] = input_qubits;
  if (q1 == q2) throw std::invalid_argument("inject: input qubits must differ");
  if (q1 >= n || q2 >= n) throw std::out_of_range("inject: input qubit index out of range");
  if (n < 3) throw std::invalid_argument("inject: need at least three qubits");

  const ComplexMatrix r1 = encode_input_state(s1).state;
  const ComplexMatrix r2 = encode_input_state(s2).state;
  const ComplexMatrix rest = partial_trace(rho, {q1, q2}, n);

  const std::size_t dim = rho.rows();
  const std::size_t b1 = detail::bit_of(q1, n), b2 = detail::bit_of(q2, n);
  std::vector<std::size_t> rest_bits;  // bit positions of the kept qubits, MSB first
  for (std::size_t q = 0; q < n; ++q)
    if (q != q1 && q != q2) rest_bits.push_back(detail::bit_of(q, n));
  std::vector<std::size_t> rest_index(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t r = 0;
    for (auto b : rest_bits) r = (r << 1U) | ((x >> b) & 1U);
    rest_index[x] = r;
  }

  DensityMatrix out(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      out(i, j) = r1((i >> b1) & 1U, (j >> b1) & 1U) * r2((i >> b2) & 1U, (j >> b2) & 1U) *
                  rest(rest_index[i], rest_index[j]);
    }
  return out;
}

/// Advances a state by one injection interval. cfg.dt is an upper bound: for
/// strong couplings the step shrinks to stable_step(), still dividing
/// delta_t evenly.
class ReservoirEvolver {
 public:
  ReservoirEvolver(const SpinNetworkModel& model, const RunConfig& cfg)
      : sys_(model), delta_t_(cfg.delta_t), dt_(stable_step(sys_, cfg.dt, cfg.delta_t)) {
    if (cfg.use_propagator && model.n_qubits <= 5) prop_.emplace(sys_, delta_t_, dt_);
  }

  DensityMatrix advance(const DensityMatrix& rho) const { return hermitian_part(advance_unsymmetrized(rho)); }

  // The interval map before the closing Hermitian projection; its
  // anti-Hermitian part measures accumulated round-off.
  DensityMatrix advance_unsymmetrized(const DensityMatrix& rho) const {
    return prop_ ? prop_->apply_linear(rho) : evolve(rho, sys_, delta_t_, dt_);
  }

  const LindbladSystem& system() const { return sys_; }
  bool uses_propagator() const { return prop_.has_value(); }
  double step() const { return dt_; }

 private:
  LindbladSystem sys_;
  std::optional<IntervalPropagator> prop_;
  double delta_t_;
  double dt_;
};

using StepObserver = std::function<void(std::size_t step, const DensityMatrix& rho)>;

inline TrajectoryRecord run_reservoir(const ReservoirEvolver& evolver, const InputSequence& seq1,
                                      const InputSequence& seq2, const RunConfig& cfg,
                                      std::optional<DensityMatrix> initial = std::nullopt,
                                      const StepObserver& observer = {}) {
  const std::size_t n = evolver.system().n_qubits();
  const std::size_t steps = cfg.injection_count();
  if (seq1.size() < steps || seq2.size() < steps) {
    throw std::invalid_argument("run_reservoir: input sequences shorter than the number of injections");
  }
  DensityMatrix rho = initial ? std::move(*initial) : all_zero_state(n);
  if (rho.rows() != evolver.system().dim()) throw std::invalid_argument("run_reservoir: initial state dimension mismatch");

  std::optional<PartitionSet> parts;
  if (cfg.sample_entanglement) parts.emplace(n);

  TrajectoryRecord rec;
  rec.features = RealMatrix(steps, n + 1);
  rec.entanglement = RealMatrix(steps, kPartitionCount);
  rec.injected = RealMatrix(steps, 2);
  auto& diag = rec.diagnostics;

  for (std::size_t k = 0; k < steps; ++k) {
    const double s1 = seq1[k], s2 = seq2[k];
    rho = inject(rho, s1, s2, cfg.input_qubits);
    // Relative to Tr(rho): the reset is exact, the trace carries integrator drift.
    const double tr = rho.trace().real();
    diag.max_input_reset_error =
        std::max({diag.max_input_reset_error,
                  std::abs(expectation_z(rho, cfg.input_qubits.first, n) / tr - (1.0 - 2.0 * s1)),
                  std::abs(expectation_z(rho, cfg.input_qubits.second, n) / tr - (1.0 - 2.0 * s2))});
    const DensityMatrix evolved = evolver.advance_unsymmetrized(rho);
    diag.max_hermiticity_residual = std::max(diag.max_hermiticity_residual, hermiticity_residual(evolved));
    rho = hermitian_part(evolved);

    for (std::size_t q = 0; q < n; ++q) rec.features(k, q) = expectation_z(rho, q, n);
    rec.features(k, n) = 1.0;
    rec.injected(k, 0) = s1;
    rec.injected(k, 1) = s2;

    if (parts) {
      const auto e = sample_negativities(rho, *parts);
      for (std::size_t c = 0; c < kPartitionCount; ++c) {
        rec.entanglement(k, c) = e.value[c];
        diag.min_raw_negativity = std::min(diag.min_raw_negativity, e.raw[c]);
      }
    } else {
      for (std::size_t c = 0; c < kPartitionCount; ++c) rec.entanglement(k, c) = std::nan("");
    }

    diag.max_trace_error = std::max(diag.max_trace_error, std::abs(rho.trace() - 1.0));
    if (cfg.track_diagnostics) {
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, hermitian_eigenvalues(rho).front());
    }
    if (observer) observer(k, rho);
  }
  return rec;
}

inline TrajectoryRecord run_reservoir(const SpinNetworkModel& model, const InputSequence& seq1,
                                      const InputSequence& seq2, const RunConfig& cfg) {
  return run_reservoir(ReservoirEvolver(model, cfg), seq1, seq2, cfg);
}

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
  const std::size_t n = rec.n_qubits();
  os << "k,s1,s2";
  for (std::size_t q = 0; q < n; ++q) os << ",Z" << (q + 1);
  for (const auto& l : partition_labels()) os << ',' << l;
  os << '\n';
  for (std::size_t k = 0; k < rec.steps(); ++k) {
    os << k << ',' << format_double(rec.injected(k, 0)) << ',' << format_double(rec.injected(k, 1));
    for (std::size_t q = 0; q < n; ++q) os << ',' << format_double(rec.features(k, q));
    for (std::size_t c = 0; c < kPartitionCount; ++c) os << ',' << format_double(rec.entanglement(k, c));
    os << '\n';
  }
}

}  // namespace qrc
