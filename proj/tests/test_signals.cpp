#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "qrc/signals.hpp"

using namespace qrc;

namespace {

// |X_k|^2 for k = 0 .. N/2 by the direct sum.
std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::exp(std::complex<double>(0, -2 * std::numbers::pi * double(k * t % n) / double(n)));
    }
    p[k] = std::norm(acc);
  }
  return p;
}

}  // namespace

TEST(Frequencies, LinearInclusiveRange) {
  const auto f = component_frequencies(2.0, 20);
  ASSERT_EQ(f.size(), 20U);
  EXPECT_DOUBLE_EQ(f.front(), 2.0 / 5000);
  EXPECT_NEAR(f.back(), 2.0 / 50, 1e-17);
  for (std::size_t k = 1; k + 1 < f.size(); ++k) EXPECT_NEAR(f[k + 1] - f[k], f[k] - f[k - 1], 1e-16);
  EXPECT_THROW(component_frequencies(0.0, 20), std::invalid_argument);
}

TEST(RawSequence, SingleZeroPhaseComponentIsPureSine) {
  const std::vector<double> f{0.01}, ph{0.0};
  const auto x = sum_of_sinusoids(f, ph, 200, TimeAxis::index);
  for (std::size_t k = 0; k < 200; ++k) EXPECT_NEAR(x[k], std::sin(2 * std::numbers::pi * 0.01 * double(k)), 1e-15);
}

TEST(RawSequence, BoundedByComponentCount) {
  for (std::size_t id = 0; id < 9; ++id)
    for (double v : generate_raw_sequence(2.0, id, 5)) EXPECT_LE(std::abs(v), 20.0);
}

TEST(RawSequence, DeterministicAndSeedSensitive) {
  EXPECT_EQ(generate_raw_sequence(2.0, 3, 11), generate_raw_sequence(2.0, 3, 11));
  EXPECT_NE(generate_raw_sequence(2.0, 3, 11), generate_raw_sequence(2.0, 3, 12));
  EXPECT_NE(generate_raw_sequence(2.0, 3, 11), generate_raw_sequence(2.0, 4, 11));
}

TEST(RawSequence, PhasesInUnitIntervalAndSharedAcrossF0) {
  const auto a = make_input_sequence(SignalSpec{.f0 = 1.0}, 2, 9);
  const auto b = make_input_sequence(SignalSpec{.f0 = 3.0}, 2, 9);
  EXPECT_EQ(a.phases, b.phases);
  for (double p : a.phases) {
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Spectrum, OnBinFrequenciesHaveNoLeakage) {
  // With N = 2500 and f0 = 2 the two components sit exactly on bins 1 and 100.
  SignalSpec spec{.f0 = 2.0, .length = 2500, .n_components = 2};
  const auto p = dft_power(generate_raw_sequence(spec, 0, 3));
  double total = 0.0;
  for (double v : p) total += v;
  EXPECT_NEAR((p[1] + p[100]) / total, 1.0, 1e-12);
  EXPECT_NEAR(p[1], std::pow(2500.0 / 2, 2), 1e-6 * p[1]);
}

TEST(Spectrum, EnergyConcentratedInRequestedBand) {
  // Default 20 components at f0 = 2 span 0.4 .. 40 DFT bins of N = 1000.
  const auto x = generate_raw_sequence(2.0, 1, 4);
  const auto p = dft_power(x);
  double in_band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    total += p[k];
    if (k <= 45) in_band += p[k];
  }
  EXPECT_GT(in_band / total, 0.99);
}

TEST(Spectrum, HigherF0MovesEnergyUp) {
  auto centroid = [](double f0) {
    const auto p = dft_power(generate_raw_sequence(f0, 0, 8));
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      num += double(k) * p[k];
      den += p[k];
    }
    return num / den;
  };
  EXPECT_LT(centroid(1.0), centroid(2.0));
  EXPECT_LT(centroid(2.0), centroid(3.0));
}

TEST(UnitIntervalAxis, NearlyConstantSignal) {
  const auto x = generate_raw_sequence(SignalSpec{.time_axis = TimeAxis::unit_interval}, 0, 1);
  double lo = x[0], hi = x[0];
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // highest frequency 0.04 cycles over t in [0, 1]: the signal barely moves
  EXPECT_LT(hi - lo, 20 * 2 * std::numbers::pi * 0.04);
}

TEST(Normalize, Examples) {
  const std::vector<double> x{2, 4, 6};
  EXPECT_EQ(normalize_minmax(x), (std::vector<double>{0, 0.5, 1}));
  const std::vector<double> y{0, 0.25, 1, 0.5};
  EXPECT_EQ(normalize_minmax(y), y);
  EXPECT_THROW(normalize_minmax(std::vector<double>{3, 3, 3}), std::invalid_argument);
  EXPECT_THROW(normalize_minmax(std::vector<double>{}), std::invalid_argument);
}

TEST(Normalize, AffineWithUnitCorrelation) {
  const auto x = generate_raw_sequence(2.0, 0, 1);
  const auto y = normalize_minmax(x);
  const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(y[k], (x[k] - lo) / (hi - lo), 1e-15);
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 1.0, 1e-12);
}

TEST(Sequences, NineDistinctNormalizedSequences) {
  const auto seqs = make_all_sequences(SignalSpec{}, 20251015);
  ASSERT_EQ(seqs.size(), 9U);
  for (const auto& s : seqs) {
    ASSERT_EQ(s.size(), 1000U);
    EXPECT_EQ(*std::min_element(s.samples.begin(), s.samples.end()), 0.0);
    EXPECT_EQ(*std::max_element(s.samples.begin(), s.samples.end()), 1.0);
    for (double v : s.samples) EXPECT_TRUE(std::isfinite(v));
  }
  for (std::size_t a = 0; a < 9; ++a)
    for (std::size_t b = a + 1; b < 9; ++b) {
      double d = 0.0;
      for (std::size_t k = 0; k < 1000; ++k) d = std::max(d, std::abs(seqs[a][k] - seqs[b][k]));
      EXPECT_GT(d, 0.1) << a << " vs " << b;
    }
}

TEST(Encode, Endpoints) {
  const auto z = encode_input_state(0.0).state;
  EXPECT_EQ(z, (ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}));
  const auto o = encode_input_state(1.0).state;
  EXPECT_EQ(o, (ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}));
  const auto h = encode_input_state(0.5).state;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(h(i, j).real(), 0.5, 1e-15);
  EXPECT_NEAR(expectation(h, pauli::Z()), 0.0, 1e-15);
  EXPECT_THROW(encode_input_state(1.5), std::invalid_argument);
  EXPECT_THROW(encode_input_state(-0.1), std::invalid_argument);
}

TEST(Encode, PureAndPositiveOnDenseGrid) {
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    const auto r = encode_input_state(s).state;
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-15);
    EXPECT_NEAR((r * r).trace().real(), 1.0, 1e-12);
    EXPECT_GE(hermitian_eigenvalues(r).front(), -1e-15);
    EXPECT_NEAR(expectation(r, pauli::Z()), 1 - 2 * s, 1e-15);
  }
}

TEST(SequenceCsv, RoundTripIsExact) {
  const auto s = make_input_sequence(SignalSpec{}, 4, 77);
  std::stringstream ss;
  write_sequence_csv(ss, s);
  const auto back = read_sequence_csv(ss);
  EXPECT_EQ(back.samples, s.samples);
}

TEST(SequenceCsv, RejectsBadInput) {
  std::stringstream bad_header("i,v\n0,1\n");
  EXPECT_THROW(read_sequence_csv(bad_header), std::runtime_error);
  std::stringstream bad_index("index,value\n1,0.5\n");
  EXPECT_THROW(read_sequence_csv(bad_index), std::runtime_error);
}
