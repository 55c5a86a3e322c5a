#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "torusfio/error.hpp"
#include "torusfio/random.hpp"
#include "torusfio/torus_fourier.hpp"

using namespace torusfio;

namespace {

SpectralSequence random_spectrum(const FrequencyCube& c, std::uint64_t seed) {
  SpectralSequence s(c);
  s.coeffs = oracle::random_coeffs(c.size(), seed);
  return s;
}

struct Shape {
  int dim;
  int n;
};

class FourierShapes : public ::testing::TestWithParam<Shape> {};

TEST_P(FourierShapes, RoundTripAndPlancherel) {
  const auto [dim, n] = GetParam();
  const TorusGrid g(dim, n);
  const auto c = FrequencyCube::for_grid(g);
  double worst_round = 0.0, worst_planch = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto spec = random_spectrum(c, 1000 + s);
    const auto f = inverse_transform(spec, g);
    const auto back = forward_transform(f, c);
    double l2c = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      worst_round = std::max(worst_round, std::abs(back.coeffs[m] - spec.coeffs[m]));
      l2c += std::norm(spec.coeffs[m]);
    }
    const double l2f = std::pow(lp_norm(f, 2.0), 2);
    worst_planch = std::max(worst_planch, std::abs(l2f - l2c) / l2c);
  }
  EXPECT_LT(worst_round, 1e-10);
  EXPECT_LT(worst_planch, 1e-10);
}

TEST_P(FourierShapes, ForwardMatchesDirectSum) {
  const auto [dim, n] = GetParam();
  const TorusGrid g(dim, n);
  const auto c = FrequencyCube::for_grid(g);
  PeriodicFunction f(g);
  f.values = oracle::random_coeffs(g.size(), 77);
  const auto fast = forward_transform(f, c);
  const auto slow = oracle::direct_dft(f.values, g, c);
  for (std::size_t m = 0; m < c.size(); ++m) EXPECT_NEAR(std::abs(fast.coeffs[m] - slow[m]), 0.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Grids, FourierShapes,
                         ::testing::Values(Shape{1, 16}, Shape{1, 32}, Shape{2, 16}, Shape{2, 32}, Shape{3, 8}));

TEST(TorusFourier, LpMonotoneInPWhenSupBelowOne) {
  const TorusGrid g(2, 16);
  for (std::uint64_t s = 0; s < 20; ++s) {
    PeriodicFunction f(g);
    f.values = oracle::random_coeffs(g.size(), s);
    const double sup = lp_norm(f, kInfinity);
    for (auto& v : f.values) v /= sup;
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0, kInfinity}) {
      const double v = lp_norm(f, p);
      EXPECT_GE(v, prev - 1e-15) << "p=" << p;
      prev = v;
    }
    EXPECT_LE(prev, 1.0 + 1e-15);
  }
}

TEST(TorusFourier, RealEvenFunctionHasRealSpectrum) {
  const TorusGrid g(1, 32);
  const auto f = PeriodicFunction::sample(g, [](const Coord& x) {
    return Complex(std::exp(std::cos(2.0 * oracle::kPi * x[0])) + std::cos(6.0 * oracle::kPi * x[0]));
  });
  const auto s = forward_transform(f);
  for (const auto& z : s.coeffs) EXPECT_LT(std::abs(z.imag()), 1e-12);

  const TorusGrid g2(2, 16);
  const auto f2 = PeriodicFunction::sample(g2, [](const Coord& x) {
    return Complex(std::cos(2.0 * oracle::kPi * x[0]) * std::cos(4.0 * oracle::kPi * x[1]) + 0.5);
  });
  for (const auto& z : forward_transform(f2).coeffs) EXPECT_LT(std::abs(z.imag()), 1e-12);
}

TEST(TorusFourier, MonomialHasUnitCoefficient) {
  const TorusGrid g(2, 16);
  const auto f = PeriodicFunction::sample(g, [](const Coord& x) { return oracle::expi(3 * x[0] - 2 * x[1]); });
  const auto s = forward_transform(f);
  for (std::size_t m = 0; m < s.cube.size(); ++m) {
    const Index xi = s.cube.point(m);
    const double want = (xi[0] == 3 && xi[1] == -2) ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(s.coeffs[m] - want), 0.0, 1e-13);
  }
}

TEST(TorusFourier, EvaluateSpectrumInterpolatesNodes) {
  const TorusGrid g(1, 16);
  const auto spec = random_spectrum(FrequencyCube::for_grid(g), 5);
  const auto f = inverse_transform(spec, g);
  for (std::size_t k = 0; k < g.size(); ++k)
    EXPECT_NEAR(std::abs(evaluate_spectrum(spec, g.node(k)) - f.values[k]), 0.0, 1e-12);
  // periodic off the grid too
  const Coord x{0.3141, 0, 0}, x1{1.3141, 0, 0};
  EXPECT_NEAR(std::abs(evaluate_spectrum(spec, x) - evaluate_spectrum(spec, x1)), 0.0, 1e-11);
}

TEST(TorusFourier, CubeLargerThanGridIsRejected) {
  const TorusGrid g(1, 16);
  PeriodicFunction f(g);
  EXPECT_FALSE(FrequencyCube(1, 8).fits(g));
  EXPECT_THROW(forward_transform(f, FrequencyCube(1, 9)), Error);
}

TEST(TorusFourier, NodeIndexingIsRowMajor) {
  const TorusGrid g(2, 8);
  const Index k{2, 5, 0};
  EXPECT_EQ(g.flat(k), 2u * 8u + 5u);
  EXPECT_EQ(g.node_index(g.flat(k)), k);
  EXPECT_DOUBLE_EQ(g.node(g.flat(k))[1], 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(g.weight(), 1.0 / 64.0);
}

TEST(TorusFourier, UnimodularKeepsLargePhasesAccurate) {
  EXPECT_NEAR(std::abs(unimodular(1e9 + 0.25) - Complex(0.0, 1.0)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(unimodular(-3.5) - Complex(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(TorusFourier, LineQuadratureIntegratesGaussian) {
  const Complex v = line_quadrature([](double x) { return Complex(std::exp(-oracle::kPi * x * x)); }, 8.0, 257);
  EXPECT_NEAR(v.real(), 1.0, 1e-14);
  LineQuadrature q{2.0, 8.0, 513};
  const auto pts = q.points();
  const auto w = q.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += w[i] * std::exp(-oracle::kPi * (pts[i] - 2.0) * (pts[i] - 2.0));
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(TorusFourier, StreamsAreReproducibleAndDistinct) {
  Stream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 10; ++i) {
    const double va = a.uniform();
    EXPECT_EQ(va, b.uniform());
    EXPECT_NE(va, c.uniform());
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

}  // namespace
