#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "peskin/curve.hpp"
#include "peskin/fft.hpp"

using namespace peskin;

namespace {

ModeArray random_modes(int order, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  ModeArray m(order);
  for (int k = -order; k <= order; ++k) m[k] = scale * Complex(n(gen), n(gen));
  return m;
}

double max_diff(const ModeArray& a, const ModeArray& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Synthesize, CircleGivesUnitRoots) {
  const auto grid = synthesize(FourierCurve::circle(3), 8);
  ASSERT_EQ(grid.n_points(), 8);
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(std::abs(grid.samples[j] - std::polar(1.0, two_pi * j / 8.0)), 0.0, 1e-15);
  }
}

TEST(Synthesize, SingleMode) {
  ModeArray m(4);
  m[2] = 0.1;
  const auto grid = synthesize(FourierCurve(m), 16);
  for (int j = 0; j < 16; ++j) {
    const double s = two_pi * j / 16.0;
    EXPECT_NEAR(std::abs(grid.samples[j] - (std::polar(1.0, s) + 0.1 * std::polar(1.0, 2.0 * s))), 0.0, 1e-15);
  }
}

TEST(Synthesize, RoundTrip) {
  const FourierCurve c(random_modes(32, 1));
  const auto back = analyze(synthesize(c, 128), 32);
  EXPECT_LE(max_diff(back.modes, c.modes), 1e-13 * c.modes.max_abs());
}

TEST(Synthesize, RoundTripOnNonPowerOfTwoGrid) {
  const FourierCurve c(random_modes(20, 2));
  const auto back = analyze(synthesize(c, 96), 20);
  EXPECT_LE(max_diff(back.modes, c.modes), 1e-13 * c.modes.max_abs());
}

TEST(Synthesize, RejectsBadGrids) {
  const FourierCurve c(random_modes(8, 3));
  EXPECT_THROW(synthesize(c, 17), std::invalid_argument);
  EXPECT_THROW(synthesize(c, 16), std::invalid_argument);
  EXPECT_NO_THROW(synthesize(c, 18));
}

TEST(Fft, FastPathMatchesDirectSum) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n;
  for (std::size_t size : {8u, 64u, 256u}) {
    std::vector<Complex> x(size);
    for (auto& v : x) v = {n(gen), n(gen)};
    for (auto dir : {fft::Direction::forward, fft::Direction::backward}) {
      const auto fast = fft::transform(x, dir);
      const auto slow = fft::direct_transform(x, dir);
      for (std::size_t i = 0; i < size; ++i) EXPECT_NEAR(std::abs(fast[i] - slow[i]), 0.0, 1e-11);
    }
  }
}

TEST(Analyze, UnitCircleHasNoModes) {
  const auto c = analyze(synthesize(FourierCurve::circle(5), 32), 5);
  EXPECT_LE(c.modes.max_abs(), 1e-15);
}

TEST(Analyze, PureThirdHarmonic) {
  PhysicalGrid g;
  for (int j = 0; j < 32; ++j) g.samples.push_back(std::polar(1.0, 3.0 * two_pi * j / 32.0));
  const auto c = analyze(g, 5);
  // The samples are e^{3is}; the perturbation of e^{is} is e^{3is} - e^{is}.
  for (int k = -5; k <= 5; ++k) {
    const Complex expect = k == 3 ? 1.0 : (k == 1 ? -1.0 : 0.0);
    EXPECT_NEAR(std::abs(c.modes[k] - expect), 0.0, 1e-15) << k;
  }
}

TEST(Split, ConstantMode) {
  ModeArray m(3);
  m[0] = {1.0, 1.0};
  const auto p = split(FourierCurve(m));
  EXPECT_EQ(p.a0, Complex(1.0, 1.0));
  EXPECT_EQ(p.a1, Complex(0.0));
  EXPECT_EQ(p.y.max_abs(), 0.0);
}

TEST(Split, FirstAndFifth) {
  ModeArray m(6);
  m[1] = 0.2;
  m[5] = 0.01;
  const auto p = split(FourierCurve(m));
  EXPECT_EQ(p.a1, Complex(0.2));
  EXPECT_EQ(p.y[5], Complex(0.01));
  EXPECT_EQ(p.y[1], Complex(0.0));
}

TEST(Split, ReassemblyIsBitIdentical) {
  const FourierCurve c(random_modes(17, 5));
  const auto back = reassemble(split(c));
  for (int k = -17; k <= 17; ++k) EXPECT_EQ(back.modes[k], c.modes[k]);
}

TEST(Derivative, SecondMode) {
  ModeArray m(3);
  m[2] = 1.0;
  EXPECT_EQ(derivative(m)[2], Complex(0.0, 2.0));
}

TEST(Derivative, CircleDerivativeIsIExpIs) {
  const FourierCurve c = FourierCurve::circle(4);
  for (double s : {0.0, 0.7, 2.9}) {
    EXPECT_NEAR(std::abs(oracle::curve_prime_at(c, s) - Complex(0.0, 1.0) * std::polar(1.0, s)), 0.0, 1e-15);
    EXPECT_EQ(derivative(c.modes).max_abs(), 0.0);
  }
}

TEST(Derivative, MatchesFourthOrderDifferences) {
  ModeArray m = random_modes(16, 6);
  for (int k = -16; k <= 16; ++k) m[k] *= 0.01 * std::exp(-2.0 * std::abs(double(k))) / std::abs(m[k]);
  const auto samples = modes_to_grid(m, 256);
  const auto fd = oracle::fd4_derivative(samples, two_pi / 256.0);
  const auto spectral = modes_to_grid(derivative(m), 256);
  double err = 0.0;
  for (std::size_t j = 0; j < fd.size(); ++j) err = std::max(err, std::abs(fd[j] - spectral[j]));
  EXPECT_LE(err, 1e-8) << err;
  // Fourth order: halving h cuts the error by about 16.
  const auto samples2 = modes_to_grid(m, 512);
  const auto fd2 = oracle::fd4_derivative(samples2, two_pi / 512.0);
  const auto spectral2 = modes_to_grid(derivative(m), 512);
  double err2 = 0.0;
  for (std::size_t j = 0; j < fd2.size(); ++j) err2 = std::max(err2, std::abs(fd2[j] - spectral2[j]));
  EXPECT_GT(err / err2, 12.0);
  EXPECT_LT(err / err2, 20.0);
}

TEST(YTilde, ZeroPerturbation) {
  const FourierCurve c = FourierCurve::circle(4);
  EXPECT_EQ(y_tilde(c, 0.3, 1.1), Complex(0.0));
  EXPECT_EQ(y_tilde(c, 0.3, 0.0), Complex(0.0));
}

TEST(YTilde, SecondModeClosedForm) {
  const Complex a2(0.03, -0.01);
  ModeArray m(4);
  m[2] = a2;
  const FourierCurve c(m);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 20; ++i) {
    const double s = u(gen), alpha = u(gen);
    const Complex expect = a2 * std::polar(1.0, s) * std::polar(1.0, -alpha / 2.0) *
                           (std::polar(1.0, -2.0 * alpha) - 1.0) / (2.0 * std::sin(alpha / 2.0));
    EXPECT_NEAR(std::abs(y_tilde(c, s, alpha) - expect), 0.0, 1e-15);
  }
}

TEST(YTilde, LimitBranchIsContinuous) {
  const FourierCurve c(random_modes(8, 8, 0.01));
  for (double s : {0.0, 1.0, 4.0}) {
    const Complex limit = y_tilde(c, s, 0.0);
    EXPECT_LE(std::abs(y_tilde(c, s, 1e-9) - limit), 1e-6);
    // First-order Taylor remainder away from the limit branch.
    const double second = sup_norm(derivative(derivative(c.modes)), 16);
    for (double alpha : {1e-6, -1e-6, 1e-4}) {
      EXPECT_LE(std::abs(y_tilde(c, s, alpha) - limit), std::abs(alpha) * second) << alpha;
    }
  }
}

TEST(YTilde, BoundedByDerivativeSup) {
  // |Y(s - a) - Y(s)| <= |a| sup|Y'| and |a| / |2 sin(a/2)| <= pi/2 on [-pi, pi].
  ModeArray m = random_modes(12, 9, 0.01);
  m[0] = 0.0;
  m[1] = 0.0;
  const FourierCurve c(m);
  const double bound = sup_norm(derivative(m), 16);
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) worst = std::max(worst, std::abs(y_tilde(c, u(gen), u(gen))) / bound);
  EXPECT_LE(worst, std::numbers::pi / 2.0 * (1.0 + 1e-3));
}

TEST(Invariants, Parseval) {
  const ModeArray m = random_modes(24, 11);
  const auto v = modes_to_grid(m, 64);
  double grid = 0.0;
  for (const auto& x : v) grid += std::norm(x);
  grid /= 64.0;
  double coeff = 0.0;
  for (const auto& x : m.values()) coeff += std::norm(x);
  EXPECT_NEAR(grid, coeff, 1e-12 * coeff);
  EXPECT_NEAR(l2_norm_squared(m), two_pi * coeff, 1e-12 * two_pi * coeff);
}

TEST(Invariants, TranslationEquivariance) {
  const int order = 10, n = 32;
  const FourierCurve c(random_modes(order, 12));
  auto grid = synthesize(c, n);
  for (int j = 0; j < n; ++j) grid.samples[j] -= std::polar(1.0, grid.node(j));
  std::vector<Complex> shifted(n);
  for (int j = 0; j < n; ++j) shifted[j] = grid.samples[(j + 1) % n];
  const ModeArray a = grid_to_modes(shifted, order);
  for (int k = -order; k <= order; ++k) {
    EXPECT_NEAR(std::abs(a[k] - c.modes[k] * std::polar(1.0, two_pi * k / n)), 0.0, 1e-13);
  }
}

TEST(Json, RoundTrip) {
  FourierCurve c(random_modes(5, 13), 0.75);
  nlohmann::json j = c;
  const FourierCurve back = j.get<FourierCurve>();
  EXPECT_EQ(back.time, 0.75);
  for (int k = -5; k <= 5; ++k) EXPECT_EQ(back.modes[k], c.modes[k]);
}
