// signals.hpp -- multi-sinusoid input sequences and single-qubit encoding

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/csv.hpp"
#include "qrc/linalg.hpp"
#include "qrc/rng.hpp"

namespace qrc {

inline constexpr std::size_t kSequenceLength = 1000;
inline constexpr std::size_t kSignalComponents = 20;
inline constexpr std::size_t kSequenceCount = 9;

// index: t = k for sample k (component periods of 50/f0 .. 5000/f0 samples).
// unit_interval: t = k / (N - 1), i.e. t spans [0, 1].
enum class TimeAxis { index, unit_interval };

inline std::string to_string(TimeAxis a) { return a == TimeAxis::index ? "index" : "unit_interval"; }

inline TimeAxis parse_time_axis(const std::string& s) {
  if (s == "index") return TimeAxis::index;
  if (s == "unit_interval") return TimeAxis::unit_interval;
  throw std::invalid_argument("unknown time axis '" + s + "'");
}

struct SignalSpec {
  double f0 = 2.0;
  std::size_t length = kSequenceLength;
  std::size_t n_components = kSignalComponents;
  TimeAxis time_axis = TimeAxis::index;
};

struct InputSequence {
  std::vector<double> samples;
  std::size_t n_components = kSignalComponents;
  double f0 = 0.0;
  std::vector<double> phases;
  std::size_t sequence_id = 0;
  std::uint64_t rng_seed = 0;

  std::size_t size() const { return samples.size(); }
  double operator[](std::size_t k) const { return samples[k]; }
};

/// Component frequencies, linearly spaced with both ends included over
/// [f0/5000, f0/50].
inline std::vector<double> component_frequencies(double f0, std::size_t n_components) {
  if (!(f0 > 0.0)) throw std::invalid_argument("f0 must be positive");
  if (n_components == 0) throw std::invalid_argument("need at least one component");
  const double lo = f0 / 5000.0, hi = f0 / 50.0;
  std::vector<double> f(n_components);
  for (std::size_t k = 0; k < n_components; ++k) {
    f[k] = n_components == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_components - 1);
  }
  return f;
}

/// Phase offsets in [0, 1) for sequence `seq_id`; independent of f0, so
/// sequences at different frequencies share their phase draws.
inline std::vector<double> sequence_phases(std::size_t seq_id, std::uint64_t seed, std::size_t n_components) {
  Rng rng(seed, StreamTag::signal, seq_id);
  std::vector<double> ph(n_components);
  for (auto& p : ph) p = rng.uniform();
  return ph;
}

inline std::vector<double> sum_of_sinusoids(std::span<const double> freqs, std::span<const double> phases,
                                            std::size_t length, TimeAxis axis) {
  if (freqs.size() != phases.size()) throw std::invalid_argument("frequency/phase count mismatch");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> x(length, 0.0);
  for (std::size_t k = 0; k < length; ++k) {
    const double t = axis == TimeAxis::index ? static_cast<double>(k)
                                             : static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(length - 1, 1));
    double acc = 0.0;
    for (std::size_t c = 0; c < freqs.size(); ++c) acc += std::sin(two_pi * freqs[c] * t + two_pi * phases[c]);
    x[k] = acc;
  }
  return x;
}

inline std::vector<double> generate_raw_sequence(const SignalSpec& spec, std::size_t seq_id, std::uint64_t seed) {
  const auto f = component_frequencies(spec.f0, spec.n_components);
  const auto ph = sequence_phases(seq_id, seed, spec.n_components);
  return sum_of_sinusoids(f, ph, spec.length, spec.time_axis);
}

inline std::vector<double> generate_raw_sequence(double f0, std::size_t seq_id, std::uint64_t seed) {
  return generate_raw_sequence(SignalSpec{.f0 = f0}, seq_id, seed);
}

inline std::vector<double> normalize_minmax(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("normalize_minmax: empty sequence");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("normalize_minmax: non-finite sample");
  if (!(hi > lo)) throw std::invalid_argument("degenerate sequence");
  std::vector<double> out(x.size());
  const double range = hi - lo;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - lo) / range;
  return out;
}

inline InputSequence make_input_sequence(const SignalSpec& spec, std::size_t seq_id, std::uint64_t seed) {
  InputSequence s;
  s.samples = normalize_minmax(generate_raw_sequence(spec, seq_id, seed));
  s.n_components = spec.n_components;
  s.f0 = spec.f0;
  s.phases = sequence_phases(seq_id, seed, spec.n_components);
  s.sequence_id = seq_id;
  s.rng_seed = seed;
  return s;
}

inline std::vector<InputSequence> make_all_sequences(const SignalSpec& spec, std::uint64_t seed) {
  std::vector<InputSequence> out;
  for (std::size_t id = 0; id < kSequenceCount; ++id) out.push_back(make_input_sequence(spec, id, seed));
  return out;
}

/// Constant-valued sequence, mostly for tests and calibration runs.
inline InputSequence constant_sequence(double value, std::size_t length) {
  InputSequence s;
  s.samples.assign(length, value);
  s.n_components = 0;
  return s;
}

struct EncodedInput {
  double value = 0.0;
  ComplexMatrix state;  // |psi(s)><psi(s)|
};

/// |psi(s)> = sqrt(1 - s)|0> + sqrt(s)|1>.
inline EncodedInput encode_input_state(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("encode_input_state: s must lie in [0, 1]");
  const double coherence = std::sqrt((1.0 - s) * s);
  return {s, ComplexMatrix{{1.0 - s, coherence}, {coherence, s}}};
}

inline void write_sequence_csv(std::ostream& os, const InputSequence& seq) {
  os << "index,value\n";
  for (std::size_t k = 0; k < seq.size(); ++k) os << k << ',' << format_double(seq[k]) << '\n';
}

inline InputSequence read_sequence_csv(std::istream& is) {
  const auto table = read_csv(is);
  if (table.header != std::vector<std::string>{"index", "value"}) {
    throw std::runtime_error("sequence CSV must have header 'index,value'");
  }
  InputSequence seq;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (parse_size(row.at(0)) != r) throw std::runtime_error("sequence CSV: indices must be 0..N-1 in order");
    seq.samples.push_back(parse_double(row.at(1)));
  }
  return seq;
}

}  // namespace qrc
