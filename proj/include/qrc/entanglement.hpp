// entanglement.hpp -- logarithmic negativity over the canonical 4-qubit cuts

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/linalg.hpp"

namespace qrc {

/// log2 || rho^{T_A} ||_1 without clamping; may dip slightly below zero
/// through round-off.
inline double log_negativity_raw(const ComplexMatrix& rho, const QubitPartition& partition) {
  return std::log2(trace_norm(partial_transpose(rho, partition)));
}

inline double log_negativity(const ComplexMatrix& rho, const QubitPartition& partition) {
  return std::max(log_negativity_raw(rho, partition), 0.0);
}

inline constexpr std::size_t kPartitionCount = 7;

// Column order used everywhere: E1 E2 E3 E4 E12 E13 E14 (1-based
// labels; qubit indices are 0-based).
inline const std::array<std::string, kPartitionCount>& partition_labels() {
  static const std::array<std::string, kPartitionCount> labels{"E1", "E2", "E3", "E4", "E12", "E13", "E14"};
  return labels;
}

inline std::array<std::vector<std::size_t>, kPartitionCount> partition_subsystems() {
  return {{{0}, {1}, {2}, {3}, {0, 1}, {0, 2}, {0, 3}}};
}

/// The seven canonical bipartitions of an n >= 4 qubit register.
class PartitionSet {
 public:
  explicit PartitionSet(std::size_t n_qubits = 4) {
    if (n_qubits < 4) throw std::invalid_argument("PartitionSet: needs at least four qubits");
    for (const auto& a : partition_subsystems()) parts_.emplace_back(a, n_qubits);
  }
  const std::vector<QubitPartition>& partitions() const { return parts_; }
  const QubitPartition& operator[](std::size_t k) const { return parts_[k]; }
  std::size_t size() const { return parts_.size(); }

 private:
  std::vector<QubitPartition> parts_;
};

struct NegativitySample {
  std::array<double, kPartitionCount> value{};  // clamped at zero
  std::array<double, kPartitionCount> raw{};
};

inline NegativitySample sample_negativities(const ComplexMatrix& rho, const PartitionSet& parts) {
  NegativitySample s;
  for (std::size_t k = 0; k < kPartitionCount; ++k) {
    s.raw[k] = log_negativity_raw(rho, parts[k]);
    s.value[k] = std::max(s.raw[k], 0.0);
  }
  return s;
}

inline constexpr double kRatioDenominatorFloor = 1e-9;

struct EntanglementSummary {
  std::array<double, kPartitionCount> mean{};
  double diff_single = 0.0;            // (E1 + E2) - (E3 + E4)
  double diff_pair = 0.0;              // (E13 + E14) - 2 E12
  std::optional<double> ratio_single;  // (E1 + E2) / (E3 + E4)
  std::optional<double> ratio_pair;    // (E13 + E14) / (2 E12)

  double mean_single() const { return (mean[0] + mean[1] + mean[2] + mean[3]) / 4.0; }

  static EntanglementSummary from_means(const std::array<double, kPartitionCount>& m) {
    EntanglementSummary s;
    s.mean = m;
    s.diff_single = (m[0] + m[1]) - (m[2] + m[3]);
    s.diff_pair = (m[5] + m[6]) - 2.0 * m[4];
    const double den_single = m[2] + m[3];
    const double den_pair = 2.0 * m[4];
    if (den_single > kRatioDenominatorFloor) s.ratio_single = (m[0] + m[1]) / den_single;
    if (den_pair > kRatioDenominatorFloor) s.ratio_pair = (m[5] + m[6]) / den_pair;
    return s;
  }
};

/// Column means over rows k >= washout of a K x 7 sample matrix.
inline EntanglementSummary steady_state_average(const RealMatrix& samples, std::size_t washout) {
  if (samples.cols() != kPartitionCount) throw std::invalid_argument("steady_state_average: expected 7 columns");
  if (samples.rows() <= washout) throw std::invalid_argument("steady_state_average: empty window after washout");
  std::array<double, kPartitionCount> m{};
  for (std::size_t k = washout; k < samples.rows(); ++k)
    for (std::size_t c = 0; c < kPartitionCount; ++c) m[c] += samples(k, c);
  const double count = static_cast<double>(samples.rows() - washout);
  for (auto& v : m) v /= count;
  return EntanglementSummary::from_means(m);
}

/// Elementwise mean of per-partition averages; aggregates recomputed from
/// the result.
inline EntanglementSummary seed_average(std::span<const EntanglementSummary> summaries) {
  if (summaries.empty()) throw std::invalid_argument("seed_average: no summaries");
  std::array<double, kPartitionCount> m{};
  for (const auto& s : summaries)
    for (std::size_t c = 0; c < kPartitionCount; ++c) m[c] += s.mean[c];
  for (auto& v : m) v /= static_cast<double>(summaries.size());
  return EntanglementSummary::from_means(m);
}

}  // namespace qrc
