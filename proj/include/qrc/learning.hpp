// learning.hpp -- ridge readout and short-term memory capacity
//
// For delay tau the readout at injection step j is asked to reproduce
//   y_bar(j) = s1(j - tau) * s2(j - tau),
// using only steps with j - tau >= washout, so train and test windows carry
// the same meaning for every tau.
//
// Which state is "the readout at step j" is a convention. post_evolution
// uses the record written after evolving input j (feature row j).
// pre_injection uses the state the reservoir holds when input j arrives,
// i.e. row j - 1; input j itself is then not yet visible, which gives
// C(0) < C(1).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/linalg.hpp"
#include "qrc/reservoir.hpp"

namespace qrc {

struct ReadoutModel {
  std::vector<double> weights;
  double lambda = 0.0;
  std::size_t tau = 0;

  double predict(std::span<const double> row) const {
    if (row.size() != weights.size()) throw std::invalid_argument("ReadoutModel: feature width mismatch");
    double y = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) y += weights[c] * row[c];
    return y;
  }

  std::vector<double> predict(const RealMatrix& features) const {
    std::vector<double> y(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) y[r] = predict(features.row(r));
    return y;
  }
};

enum class ReadoutAlignment { pre_injection, post_evolution };

inline std::string to_string(ReadoutAlignment a) {
  return a == ReadoutAlignment::pre_injection ? "pre_injection" : "post_evolution";
}

inline ReadoutAlignment parse_alignment(const std::string& s) {
  if (s == "pre_injection") return ReadoutAlignment::pre_injection;
  if (s == "post_evolution") return ReadoutAlignment::post_evolution;
  throw std::invalid_argument("unknown readout alignment '" + s + "'");
}

/// Feature rows [first, first + rows) paired with target index row + lead - tau.
struct DelayWindow {
  std::size_t first = 0;
  std::size_t rows = 0;
  std::size_t lead = 0;
};

inline DelayWindow delay_window(std::size_t tau, std::size_t steps, std::size_t washout, ReadoutAlignment a) {
  DelayWindow w;
  w.lead = a == ReadoutAlignment::pre_injection ? 1 : 0;
  w.first = std::max(washout, washout + tau - std::min(tau + washout, w.lead));
  const std::size_t end = steps - std::min(steps, w.lead);
  if (w.first >= end) throw std::invalid_argument("delay window empty");
  w.rows = end - w.first;
  return w;
}

/// Targets for rows k = washout + tau .. K - 1.
inline std::vector<double> bilinear_target(std::span<const double> s1, std::span<const double> s2, std::size_t tau,
                                           std::size_t steps, std::size_t washout) {
  if (s1.size() < steps || s2.size() < steps) throw std::invalid_argument("bilinear_target: sequences shorter than K");
  if (washout + tau >= steps) throw std::invalid_argument("bilinear_target: window empty");
  std::vector<double> y;
  y.reserve(steps - washout - tau);
  for (std::size_t k = washout + tau; k < steps; ++k) y.push_back(s1[k - tau] * s2[k - tau]);
  return y;
}

/// Feature rows k = washout + tau .. K - 1, matching bilinear_target.
inline RealMatrix delayed_feature_rows(const RealMatrix& features, std::size_t tau, std::size_t washout) {
  if (washout + tau >= features.rows()) throw std::invalid_argument("delayed_feature_rows: window empty");
  RealMatrix out(features.rows() - washout - tau, features.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto src = features.row(washout + tau + r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

inline RealMatrix window_rows(const RealMatrix& features, const DelayWindow& w) {
  RealMatrix out(w.rows, features.cols());
  for (std::size_t r = 0; r < w.rows; ++r) {
    const auto src = features.row(w.first + r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

inline std::vector<double> window_targets(const RealMatrix& injected, std::size_t tau, const DelayWindow& w) {
  std::vector<double> y(w.rows);
  for (std::size_t r = 0; r < w.rows; ++r) {
    const std::size_t j = w.first + r + w.lead - tau;
    y[r] = injected(j, 0) * injected(j, 1);
  }
  return y;
}

/// W = (R^T R + lambda I)^{-1} R^T G by Cholesky factorization.
inline ReadoutModel ridge_fit(const RealMatrix& features, std::span<const double> targets, double lambda) {
  const std::size_t rows = features.rows(), p = features.cols();
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_fit: lambda must be positive");
  if (targets.size() != rows) throw std::invalid_argument("ridge_fit: target length mismatch");
  if (rows < p) throw std::invalid_argument("ridge_fit: fewer rows than features");

  std::vector<double> a(p * p, 0.0), b(p, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = features.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      b[i] += x[i] * targets[r];
      for (std::size_t j = 0; j <= i; ++j) a[i * p + j] += x[i] * x[j];
    }
  }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    a[i * p + i] += lambda;
    max_diag = std::max(max_diag, a[i * p + i]);
  }

  // In-place lower Cholesky factor.
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
    if (!(d > 1e-15 * max_diag)) {
      throw std::runtime_error("ridge_fit: normal equations singular at lambda = " + format_double(lambda));
    }
    const double ljj = std::sqrt(d);
    a[j * p + j] = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double v = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * p + k] * a[j * p + k];
      a[i * p + j] = v / ljj;
    }
  }
  std::vector<double> w(b);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < i; ++k) w[i] -= a[i * p + k] * w[k];
    w[i] /= a[i * p + i];
  }
  for (std::size_t i = p; i-- > 0;) {
    for (std::size_t k = i + 1; k < p; ++k) w[i] -= a[k * p + i] * w[k];
    w[i] /= a[i * p + i];
  }
  for (double v : w)
    if (!std::isfinite(v)) throw std::runtime_error("ridge_fit: non-finite weights");
  return {std::move(w), lambda, 0};
}

inline constexpr double kVarianceFloor = 1e-14;

/// Squared Pearson correlation, defined as 0 when either variance is below
/// kVarianceFloor.
inline double stm_capacity(std::span<const double> y, std::span<const double> target) {
  if (y.size() != target.size()) throw std::invalid_argument("stm_capacity: length mismatch");
  if (y.size() < 2) throw std::invalid_argument("stm_capacity: need at least two samples");
  const double n = static_cast<double>(y.size());
  double my = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mt += target[i];
  }
  my /= n;
  mt /= n;
  double cov = 0.0, vy = 0.0, vt = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dy = y[i] - my, dt = target[i] - mt;
    cov += dy * dt;
    vy += dy * dy;
    vt += dt * dt;
  }
  cov /= n;
  vy /= n;
  vt /= n;
  if (vy < kVarianceFloor || vt < kVarianceFloor) return 0.0;
  return std::clamp(cov * cov / (vy * vt), 0.0, 1.0);
}

/// `points` values logarithmically spaced over [lo, hi], ends included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) throw std::invalid_argument("log_grid: bad range");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct LearningConfig {
  std::size_t tau_max = 24;
  std::vector<double> lambda_grid = log_grid(1e-10, 1e2, 21);
  ReadoutAlignment alignment = ReadoutAlignment::pre_injection;
};

struct CapacityProfile {
  std::vector<double> per_tau;         // index tau = 0..tau_max
  std::vector<double> lambda_per_tau;  // chosen lambda for each tau
  double total = 0.0;

  std::size_t tau_max() const { return per_tau.empty() ? 0 : per_tau.size() - 1; }
  std::size_t best_tau() const {
    std::size_t best = 0;
    for (std::size_t t = 1; t < per_tau.size(); ++t)
      if (per_tau[t] > per_tau[best]) best = t;
    return best;
  }
};

struct DelayFit {
  ReadoutModel model;
  double capacity = 0.0;
};

/// Fits every lambda on `train` and keeps the one with the highest capacity
/// on `select` (ties go to the smaller lambda). Lambdas whose solve fails are
/// skipped; if all fail the last error propagates.
inline DelayFit best_fit_for_delay(const TrajectoryRecord& train, const TrajectoryRecord& select, std::size_t tau,
                                   std::size_t washout, std::span<const double> lambda_grid,
                                   ReadoutAlignment alignment = ReadoutAlignment::pre_injection) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  const auto w_train = delay_window(tau, train.steps(), washout, alignment);
  const auto w_sel = delay_window(tau, select.steps(), washout, alignment);
  const RealMatrix r_train = window_rows(train.features, w_train);
  const RealMatrix r_sel = window_rows(select.features, w_sel);
  const auto g_train = window_targets(train.injected, tau, w_train);
  const auto g_sel = window_targets(select.injected, tau, w_sel);

  std::optional<DelayFit> best;
  std::string last_error;
  for (double lambda : lambda_grid) {
    ReadoutModel m;
    try {
      m = ridge_fit(r_train, g_train, lambda);
    } catch (const std::runtime_error& e) {
      last_error = e.what();
      continue;
    }
    m.tau = tau;
    const double c = stm_capacity(m.predict(r_sel), g_sel);
    if (!best || c > best->capacity) best = DelayFit{std::move(m), c};
  }
  if (!best) throw std::runtime_error(last_error);
  return *best;
}

/// Capacity per delay on `test`. With `validation` given, lambda is picked
/// on the validation record and capacity reported on `test`; otherwise
/// lambda maximizes the test capacity directly.
inline CapacityProfile evaluate_capacity_profile(const TrajectoryRecord& train, const TrajectoryRecord& test,
                                                 const LearningConfig& cfg, std::size_t washout,
                                                 const TrajectoryRecord* validation = nullptr) {
  if (train.features.cols() != test.features.cols()) throw std::invalid_argument("train/test feature widths differ");
  CapacityProfile p;
  for (std::size_t tau = 0; tau <= cfg.tau_max; ++tau) {
    const auto fit = best_fit_for_delay(train, validation ? *validation : test, tau, washout, cfg.lambda_grid,
                                        cfg.alignment);
    double c = fit.capacity;
    if (validation) {
      const auto w = delay_window(tau, test.steps(), washout, cfg.alignment);
      c = stm_capacity(fit.model.predict(window_rows(test.features, w)), window_targets(test.injected, tau, w));
    }
    p.per_tau.push_back(c);
    p.lambda_per_tau.push_back(fit.model.lambda);
  }
  p.total = 0.0;
  for (double c : p.per_tau) p.total += c;
  return p;
}

inline void write_capacity_csv(std::ostream& os, const CapacityProfile& p) {
  os << "tau,capacity,lambda_chosen\n";
  for (std::size_t t = 0; t < p.per_tau.size(); ++t) {
    os << t << ',' << format_double(p.per_tau[t]) << ',' << format_double(p.lambda_per_tau[t]) << '\n';
  }
}

}  // namespace qrc
