#include <gtest/gtest.h>

#include "oracles.hpp"
#include "peskin/initdata.hpp"

using namespace peskin;

namespace {

double tent(double s, double width) {
  const double d = std::abs(std::remainder(s, two_pi));
  return std::max(0.0, 1.0 - d / width);
}

void expect_no_steady_modes(const FourierCurve& c) {
  const auto p = split(c);
  EXPECT_EQ(p.a0, Complex(0.0));
  EXPECT_EQ(p.a1, Complex(0.0));
}

}  // namespace

TEST(SingleMode, ExactlyOneMode) {
  const auto c = make_single_mode(8, 2, 1e-3);
  for (int k = -8; k <= 8; ++k) EXPECT_EQ(c.modes[k], k == 2 ? Complex(1e-3) : Complex(0.0));
  const auto partner = make_single_mode(8, -1, 1e-3);
  EXPECT_EQ(partner.modes[-1], Complex(1e-3));
  expect_no_steady_modes(c);
}

TEST(SingleMode, RoundTrip) {
  const auto c = make_single_mode(8, 5, Complex(0.01, -0.02));
  const auto back = analyze(synthesize(c, 32), 8);
  EXPECT_LE((back.modes - c.modes).max_abs(), 1e-16);
}

TEST(SingleMode, SteadyModesNeedTheFlag) {
  EXPECT_THROW(make_single_mode(8, 0, 1e-3), ConfigError);
  EXPECT_THROW(make_single_mode(8, 1, 1e-3), ConfigError);
  EXPECT_EQ(make_single_mode(8, 1, 1e-3, true).modes[1], Complex(1e-3));
  EXPECT_THROW(make_single_mode(8, 9, 1e-3), ConfigError);
}

TEST(Corner, TentSpectrumMatchesQuadrature) {
  // X = e^{is} eps h(s), so a_k is eps times the (k-1)-th coefficient of the tent.
  const double eps = 0.01, width = std::numbers::pi / 4.0;
  const int order = 24;
  const auto c = make_corner(order, {0.0}, {1.0}, eps, width);
  const std::vector<double> breaks{-std::numbers::pi, -width, 0.0, width, std::numbers::pi};
  for (int k = -order; k <= order; ++k) {
    if (k == 0 || k == 1) continue;
    const Complex expect = oracle::fourier_coefficient([&](double s) { return eps * tent(s, width); }, k - 1, breaks);
    EXPECT_NEAR(std::abs(c.modes[k] - expect), 0.0, 1e-10) << k;
  }
}

TEST(Corner, ShiftedTentsMatchQuadrature) {
  const double eps = 0.02, width = 0.5;
  const std::vector<double> pos{0.4, 3.0}, str{1.0, -0.5};
  const auto c = make_corner(16, pos, str, eps, width);
  std::vector<double> breaks{0.0};
  for (double p : pos) {
    for (double d : {-width, 0.0, width}) breaks.push_back(std::fmod(p + d + two_pi, two_pi));
  }
  breaks.push_back(two_pi);
  std::sort(breaks.begin(), breaks.end());
  auto h = [&](double s) { return eps * (str[0] * tent(s - pos[0], width) + str[1] * tent(s - pos[1], width)); };
  for (int k : {-16, -3, 2, 5, 16}) {
    EXPECT_NEAR(std::abs(c.modes[k] - oracle::fourier_coefficient(h, k - 1, breaks)), 0.0, 1e-10) << k;
  }
}

TEST(Corner, BlockProfileIsFlat) {
  const auto c = make_corner(256, {0.0, std::numbers::pi}, {1.0, 1.0}, 0.01);
  const auto profile = block_profile(split(c).y);
  double lo = 1e300, hi = 0.0;
  for (int n = 2; n <= 6; ++n) {
    lo = std::min(lo, profile[std::size_t(n)]);
    hi = std::max(hi, profile[std::size_t(n)]);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi / lo, 4.0);
}

TEST(Corner, SecondDerivativeBlocksGrowLikeRootTwo) {
  const auto c = make_corner(256, {0.0}, {1.0}, 0.01);
  const ModeArray second = derivative(derivative(c.modes));
  double lo = 1e300, hi = 0.0;
  for (int n = 3; n <= 7; ++n) {
    const double v = block_l2(second, n) * std::pow(2.0, -0.5 * n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LE(hi / lo, 1.5);
  // The first derivative stays bounded: its sup barely moves as K grows.
  const double d128 = derivative_sup(make_corner(128, {0.0}, {1.0}, 0.01).modes);
  const double d512 = derivative_sup(make_corner(512, {0.0}, {1.0}, 0.01).modes);
  EXPECT_LE(std::abs(d512 - d128) / d128, 0.1);
}

TEST(Corner, LinearInAmplitude) {
  const auto a = make_corner(64, {0.0, 2.0}, {1.0, 0.3}, 0.02);
  const auto b = make_corner(64, {0.0, 2.0}, {1.0, 0.3}, 0.01);
  EXPECT_NEAR(s_norm(b.modes), 0.5 * s_norm(a.modes), 1e-15);
  expect_no_steady_modes(a);
}

TEST(Corner, BadArguments) {
  EXPECT_THROW(make_corner(16, {0.0, 0.0}, {1.0, 1.0}, 0.01), ConfigError);
  EXPECT_THROW(make_corner(16, {0.0, two_pi}, {1.0, 1.0}, 0.01), ConfigError);
  EXPECT_THROW(make_corner(16, {0.0}, {1.0, 1.0}, 0.01), ConfigError);
  EXPECT_THROW(make_corner(16, {0.0}, {1.0}, 0.01, 4.0), ConfigError);
}

TEST(Corner, LargeCornersFailGeometry) {
  InitialDataSpec spec;
  spec.kind = InitKind::polygonal;
  spec.vertices = 8;
  spec.amplitude = 4.0;
  EXPECT_THROW(generate(spec, 64), GeometryError);
  spec.amplitude = 0.5;
  EXPECT_NO_THROW(generate(spec, 64));
}

TEST(Corner, TailIsFlagged) {
  InitialDataSpec spec;
  spec.kind = InitKind::corner;
  spec.amplitude = 0.01;
  const auto g = generate(spec, 32);
  EXPECT_TRUE(g.tail_divergent);
  EXPECT_TRUE(g.tail_warning);
  EXPECT_GT(g.tail_mass, 0.0);
}

TEST(Polygonal, ZigzagIsSymmetric) {
  const auto c = make_polygonal(32, 4, 0.01);
  expect_no_steady_modes(c);
  // Fourfold symmetry: only k - 1 divisible by 4 survives.
  for (int k = -32; k <= 32; ++k) {
    if (((k - 1) % 4 + 4) % 4 != 0) EXPECT_LE(std::abs(c.modes[k]), 1e-18) << k;
  }
}

TEST(Random, DeterministicPerSeed) {
  const auto a = make_random_decay(16, 2.0, 42, 1e-2), b = make_random_decay(16, 2.0, 42, 1e-2);
  for (int k = -16; k <= 16; ++k) EXPECT_EQ(a.modes[k], b.modes[k]);
  const auto c = make_random_decay(16, 2.0, 43, 1e-2);
  EXPECT_NE(a.modes[2], c.modes[2]);
  expect_no_steady_modes(a);
}

TEST(Random, GoldenValues) {
  const auto c = make_random_decay(8, 2.0, 42, 1e-2);
  EXPECT_NEAR(c.modes[2].real(), 8.0968760221508074e-05, 1e-19);
  EXPECT_NEAR(c.modes[2].imag(), -0.0024986884679503748, 1e-18);
  EXPECT_NEAR(c.modes[-1].real(), -0.0064210144732618534, 1e-18);
  EXPECT_NEAR(c.modes[8].imag(), -0.00014350472632069256, 1e-19);
  EXPECT_NEAR(c.modes[-7].real(), -0.00013269816959182029, 1e-19);
}

TEST(Random, MagnitudesAndPrefixStability) {
  const auto small = make_random_decay(8, 2.5, 5, 0.1), big = make_random_decay(32, 2.5, 5, 0.1);
  for (int k = -32; k <= 32; ++k) {
    if (k == 0 || k == 1) continue;
    if (std::abs(k) <= 8) EXPECT_EQ(small.modes[k], big.modes[k]) << k;
    EXPECT_NEAR(std::abs(big.modes[k]), 0.1 * std::pow(std::abs(double(k)), -2.5), 1e-15) << k;
  }
}

TEST(Random, ZeroAmplitudeIsCircle) {
  EXPECT_EQ(make_random_decay(8, 2.0, 1, 0.0).modes.max_abs(), 0.0);
  EXPECT_THROW(make_random_decay(8, 1.0, 1, 0.1), ConfigError);
}

TEST(Random, SNormLinearInAmplitude) {
  const double a = s_norm(make_random_decay(16, 2.0, 3, 0.02).modes);
  const double b = s_norm(make_random_decay(16, 2.0, 3, 0.01).modes);
  EXPECT_NEAR(b, 0.5 * a, 1e-15);
}

TEST(Generate, TargetNormIsExactAndIdempotent) {
  for (const char* name : {"s", "w"}) {
    InitialDataSpec spec;
    spec.kind = InitKind::corner;
    spec.positions = {0.0, 2.0};
    spec.strengths = {1.0, 1.0};
    spec.amplitude = 0.37;
    spec.target = TargetNorm{name, 0.01};
    const auto g = generate(spec, 64);
    const double got = initial_norm(split(g.curve).y, name);
    EXPECT_NEAR(got, 0.01, 1e-10 * 0.01) << name;
    // Rescaling the output again leaves it unchanged.
    const double again = 0.01 / got;
    EXPECT_NEAR(again, 1.0, 1e-12);
    expect_no_steady_modes(g.curve);
  }
}

TEST(Generate, CornerSNormWithinFactorTwoOfTarget) {
  InitialDataSpec spec;
  spec.kind = InitKind::corner;
  spec.amplitude = 1.0;
  spec.target = TargetNorm{"s", 0.02};
  const auto g = generate(spec, 128);
  EXPECT_GE(g.s_norm, 0.01);
  EXPECT_LE(g.s_norm, 0.04);
}

TEST(Generate, RandomTailIsSummable) {
  InitialDataSpec spec;
  spec.kind = InitKind::random_decay;
  spec.exponent = 4.0;
  spec.amplitude = 0.01;
  const auto g = generate(spec, 32);
  EXPECT_FALSE(g.tail_divergent);
  // sum_{k > 32} 2 * 0.01 k^{-3} is about 0.01 / 32^2.
  EXPECT_NEAR(g.tail_mass, 0.01 / (32.0 * 32.0), 0.2 * 0.01 / (32.0 * 32.0));
}

TEST(Generate, UnknownTargetNorm) {
  InitialDataSpec spec;
  spec.amplitude = 0.01;
  spec.target = TargetNorm{"z9", 1.0};
  EXPECT_THROW(generate(spec, 8), ConfigError);
}
