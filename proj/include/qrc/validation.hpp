// validation.hpp -- quick self-check behind `qrc validate`
//
// Each check compares the library against a direct formula or a physical
// invariant on a handful of random instances. The full-size versions live in
// the acceptance binary; this one is meant to finish in a few seconds.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/entanglement.hpp"
#include "qrc/learning.hpp"
#include "qrc/linalg.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/rng.hpp"
#include "qrc/signals.hpp"

namespace qrc {

inline ComplexMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

/// G G^+ / tr(G G^+) for a Gaussian G: full rank, generic spectrum.
inline DensityMatrix random_density_matrix(Rng& rng, std::size_t n_qubits) {
  const std::size_t d = std::size_t{1} << n_qubits;
  const ComplexMatrix g = random_matrix(rng, d, d);
  ComplexMatrix rho = g * g.adjoint();
  rho *= cplx(1.0 / rho.trace().real(), 0.0);
  return hermitian_part(rho);
}

namespace detail {

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace detail

inline bool run_validation_suite(std::ostream& os) {
  Rng rng(0x5eed);
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, double worst) {
    os << (ok ? "ok   " : "FAIL ") << name << "  (worst " << worst << ")\n";
    all_ok = all_ok && ok;
  };

  {  // kron element formula
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto a = random_matrix(rng, 2, 3), b = random_matrix(rng, 4, 2);
      const auto k = kron(a, b);
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 6; ++j) worst = std::max(worst, std::abs(k(i, j) - a(i / 4, j / 2) * b(i % 4, j % 2)));
    }
    report("kron", worst <= 1e-12, worst);
  }
  {  // tr_B(rho_A (x) rho_B) = rho_A
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto a = random_density_matrix(rng, 2), b = random_density_matrix(rng, 2);
      worst = std::max(worst, detail::max_abs_diff(partial_trace(kron(a, b), {2, 3}, 4), a));
      worst = std::max(worst, detail::max_abs_diff(partial_trace(kron(a, b), {0, 1}, 4), b));
    }
    report("partial trace of product states", worst <= 1e-12, worst);
  }
  {  // Bell pair on qubits 0,1 of four
    ComplexMatrix bell(4, 4);
    for (std::size_t i : {0U, 3U})
      for (std::size_t j : {0U, 3U}) bell(i, j) = 0.5;
    const auto rho = kron(bell, all_zero_state(2));
    const double e = log_negativity(rho, QubitPartition({0}, 4));
    report("Bell log-negativity = 1", std::abs(e - 1.0) <= 1e-10, std::abs(e - 1.0));
  }
  {  // RK4 global error ratio on a driven qubit, exact solution known
    const double w = 1.3, t_end = 2.0;
    LindbladSystem sys(embed_single(pauli::X(), 0, 1) * cplx(w / 2, 0), {});
    ComplexMatrix rho0 = all_zero_state(1);
    auto err = [&](double dt) {
      const auto r = evolve(rho0, sys, t_end, dt);
      const double p1 = std::pow(std::sin(w * t_end / 2), 2);
      return std::abs(r(1, 1).real() - p1) + std::abs(r(0, 0).real() - (1 - p1));
    };
    const double ratio = err(0.1) / err(0.05);
    report("RK4 order (error ratio in [12, 20])", ratio >= 12 && ratio <= 20, ratio);
  }
  {  // ridge solution satisfies the normal equations
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      RealMatrix r(40, 5);
      std::vector<double> g(40);
      for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t j = 0; j < 5; ++j) r(i, j) = rng.normal();
        g[i] = rng.normal();
      }
      const double lambda = 1e-3;
      const auto m = ridge_fit(r, g, lambda);
      for (std::size_t i = 0; i < 5; ++i) {
        double lhs = lambda * m.weights[i], rhs = 0.0;
        for (std::size_t k = 0; k < 40; ++k) {
          double rw = 0.0;
          for (std::size_t j = 0; j < 5; ++j) rw += r(k, j) * m.weights[j];
          lhs += r(k, i) * rw;
          rhs += r(k, i) * g[k];
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    report("ridge normal equations", worst <= 1e-9, worst);
  }
  {  // short reservoir runs keep rho a state
    RunConfig cfg;
    cfg.t_final = 30 * cfg.delta_t;
    cfg.washout_steps = 0;
    cfg.track_diagnostics = true;
    const auto s1 = make_input_sequence(SignalSpec{}, 0, 7), s2 = make_input_sequence(SignalSpec{}, 1, 7);
    double trace = 0, herm = 0, min_ev = 0, e_lo = 0, e_hi = 0;
    for (double js : {0.1, 1.0, 6.0}) {
      const auto rec = run_reservoir(make_model(js, rng.next_u64()), s1, s2, cfg);
      const auto& d = rec.diagnostics;
      trace = std::max(trace, d.max_trace_error);
      herm = std::max(herm, d.max_hermiticity_residual);
      min_ev = std::min(min_ev, d.min_eigenvalue);
      e_lo = std::min(e_lo, d.min_raw_negativity);
      for (std::size_t k = 0; k < rec.steps(); ++k)
        for (std::size_t c = 0; c < kPartitionCount; ++c) e_hi = std::max(e_hi, rec.entanglement(k, c));
    }
    report("trace preserved", trace <= 1e-9, trace);
    report("Hermiticity", herm <= 1e-9, herm);
    report("positivity", min_ev >= -1e-7, min_ev);
    report("log-negativity range", e_lo >= -1e-8 && e_hi <= 2.0, e_lo < -1e-8 ? e_lo : e_hi);

    const auto rec0 = run_reservoir(make_model(0.0, 1), s1, s2, cfg);
    double e0 = 0.0;
    for (std::size_t k = 0; k < rec0.steps(); ++k)
      for (std::size_t c = 0; c < kPartitionCount; ++c) e0 = std::max(e0, rec0.entanglement(k, c));
    report("no entanglement without coupling", e0 <= 1e-8, e0);
  }
  os << (all_ok ? "all checks passed\n" : "some checks FAILED\n");
  return all_ok;
}

}  // namespace qrc
