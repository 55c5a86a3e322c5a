#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "registry.hpp"
#include "torusfio/boundedness_lab.hpp"
#include "torusfio/columnar_io.hpp"
#include "torusfio/error.hpp"
#include "torusfio/operator_engine.hpp"

using namespace torusfio;
using tfio::EntrySpec;
using tfio::Registry;

namespace {

const Registry& reg() {
  static const Registry r = Registry::builtin();
  return r;
}

PeriodicFunction random_function(const TorusGrid& g, const FrequencyCube& c, std::uint64_t seed) {
  SpectralSequence s(c);
  s.coeffs = oracle::random_coeffs(c.size(), seed);
  return inverse_transform(s, g);
}

// direct sum of the defining series at every node, from the test-side DFT
std::vector<Complex> oracle_apply(const FsoOperator& A, const PeriodicFunction& f) {
  const auto fhat = oracle::direct_dft(f.values, f.grid, A.cube);
  std::vector<Complex> out(f.grid.size());
  for (std::size_t k = 0; k < f.grid.size(); ++k)
    out[k] = oracle::direct_fso([&](const Coord& x, const Index& xi) { return A.phase.value(x, to_coord(xi)); },
                                [&](const Coord& x, const Index& xi) { return A.symbol(x, xi); }, fhat, A.cube,
                                f.grid.node(k));
  return out;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

FsoOperator make(const std::string& phase, ParamMap pp, const std::string& symbol, ParamMap sp, int dim, int n,
                 int cutoff = -1) {
  const TorusGrid g(dim, n);
  const FrequencyCube c = cutoff < 0 ? FrequencyCube::for_grid(g) : FrequencyCube(dim, cutoff);
  return FsoOperator::create(reg().phase(EntrySpec{phase, std::move(pp), {}}, dim),
                             reg().symbol(EntrySpec{symbol, std::move(sp), {}}, dim), g, c);
}

TEST(OperatorEngine, AllPathsMatchDirectOracle) {
  struct C {
    std::string phase;
    ParamMap pp;
    std::string symbol;
    ParamMap sp;
    int dim, n;
    std::string path;
  };
  const std::vector<C> cases = {
      {"half-wave", {{"t", 0.3}}, "bracket-power", {{"kappa", -1}}, 1, 16, "fft-modes"},
      {"half-wave", {{"t", 0.3}}, "cosine-modulated", {}, 2, 16, "fft-modes"},
      {"translation", {}, "modulation", {{"kappa", -0.5}}, 2, 8, "fft-modes"},
      {"perturbed", {{"c", 0.1}}, "smoothed-sign", {}, 1, 32, "kernel-matrix"},
      {"perturbed", {{"c", 0.05}}, "cosine-modulated", {}, 2, 16, "kernel-matrix"},
  };
  for (const auto& c : cases) {
    const auto A = make(c.phase, c.pp, c.symbol, c.sp, c.dim, c.n);
    EXPECT_EQ(A.kernel().path_name(), c.path) << c.phase << "/" << c.symbol;
    const auto f = random_function(A.grid, A.cube, 3);
    const auto got = apply_fso(A, f).values;
    const auto want = oracle_apply(A, f);
    EXPECT_LT(max_diff(got, want), 1e-10) << c.phase << "/" << c.symbol;
  }
}

TEST(OperatorEngine, DirectPathOnLargeGrid) {
  const auto A = make("perturbed", {{"c", 0.05}}, "bracket-power", {{"kappa", -0.5}}, 2, 64);
  EXPECT_EQ(A.kernel().path_name(), "direct-sum");
  SpectralSequence s(A.cube);
  s.at({3, -2, 0}) = 1.0;
  s.at({-7, 11, 0}) = Complex(0.0, 2.0);
  const auto f = inverse_transform(s, A.grid);
  const auto got = apply_fso(A, f).values;
  for (std::size_t k = 0; k < A.grid.size(); k += 97) {
    const Coord x = A.grid.node(k);
    Complex want = 0.0;
    for (const Index& xi : {Index{3, -2, 0}, Index{-7, 11, 0}})
      want += oracle::expi(A.phase.value(x, to_coord(xi))) * std::pow(bracket(xi, 2), -0.5) * s.at(xi);
    EXPECT_NEAR(std::abs(got[k] - want), 0.0, 1e-10);
  }
}

TEST(OperatorEngine, Linearity) {
  for (const auto& [ph, sy] : {std::pair{"half-wave", "cosine-modulated"}, std::pair{"perturbed", "smoothed-sign"}}) {
    const auto A = make(ph, {}, sy, {}, 1, 32);
    const auto f = random_function(A.grid, A.cube, 1);
    const auto g = random_function(A.grid, A.cube, 2);
    const Complex a(0.7, -1.3), b(-2.0, 0.4);
    PeriodicFunction h(A.grid);
    for (std::size_t k = 0; k < h.values.size(); ++k) h.values[k] = a * f.values[k] + b * g.values[k];
    const auto Af = apply_fso(A, f).values, Ag = apply_fso(A, g).values, Ah = apply_fso(A, h).values;
    for (std::size_t k = 0; k < h.values.size(); ++k) EXPECT_NEAR(std::abs(Ah[k] - (a * Af[k] + b * Ag[k])), 0.0, 1e-10);
  }
}

TEST(OperatorEngine, PseudoSpecializesFso) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const TorusGrid g(2, 16);
    const auto c = FrequencyCube::for_grid(g);
    const auto sym = reg().symbol(EntrySpec{"modulation", {{"kappa", -0.3 * s}, {"q1", double(s % 3)}, {"q2", 1}}, {}}, 2);
    const auto f = random_function(g, c, s);
    const auto P = apply_pseudo(sym, f).values;
    const auto F = apply_fso(FsoOperator::create(linear_phase(2), sym, g, c), f).values;
    EXPECT_LT(max_diff(P, F), 1e-12);
    EXPECT_LT(max_diff(P, oracle_apply(FsoOperator::create(linear_phase(2), sym, g, c), f)), 1e-10);
  }
}

TEST(OperatorEngine, TranslationShiftsFunctions) {
  const auto A = make("translation", {{"v1", 0.25}}, "identity", {}, 1, 32);
  const auto f = random_function(A.grid, A.cube, 4);
  const auto out = apply_fso(A, f).values;
  // shift by 8 nodes
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(std::abs(out[k] - f.values[(k + 8) % 32]), 0.0, 1e-12);
}

TEST(OperatorEngine, DenseAssemblyConsistency) {
  const auto A = make("perturbed", {{"c", 0.1}}, "cosine-modulated", {{"kappa", -1}}, 1, 16);
  const DenseOperator M = assemble_matrix(A);
  EXPECT_LT(M.consistency_error, 1e-9);
  EXPECT_EQ(M.matrix.rows(), 16);
  // the columns are images of the delta basis
  for (std::size_t j = 0; j < 16; j += 5) {
    PeriodicFunction d(A.grid);
    d.values.assign(16, 0.0);
    d.values[j] = 1.0;
    const auto col = apply_fso(A, d).values;
    for (std::size_t i = 0; i < 16; ++i)
      EXPECT_NEAR(std::abs(M.matrix(Eigen::Index(i), Eigen::Index(j)) - col[i]), 0.0, 1e-13);
  }
}

TEST(OperatorEngine, AdjointPairing) {
  const auto A = make("perturbed", {{"c", 0.1}}, "cosine-modulated", {}, 2, 16);
  const auto f = random_function(A.grid, A.cube, 7);
  const auto g = random_function(A.grid, A.cube, 8);
  const Complex lhs = inner_product(apply_fso(A, f).values, g.values, A.grid);
  const Complex rhs = inner_product(f.values, apply_fso_adjoint(A, g).values, A.grid);
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * std::abs(lhs));
  const DenseOperator M = assemble_matrix(A);
  const DenseOperator Ms = adjoint(M);
  EXPECT_LT(max_diff(Ms.apply(g.values), apply_fso_adjoint(A, g).values), 1e-10);
}

TEST(OperatorEngine, ColumnarDenseRoundTrip) {
  const DenseOperator M = assemble_matrix(make("half-wave", {}, "smoothed-sign", {}, 1, 8));
  std::stringstream ss;
  write_dense_operator(ss, M);
  const DenseOperator B = read_dense_operator(ss);
  EXPECT_EQ(B.grid, M.grid);
  EXPECT_EQ((B.matrix - M.matrix).cwiseAbs().maxCoeff(), 0.0);
}

TEST(OperatorEngine, FunctionFileRoundTrip) {
  const TorusGrid g(2, 8);
  const auto f = random_function(g, FrequencyCube::for_grid(g), 12);
  std::stringstream ss;
  write_function(ss, f);
  const auto h = read_function(ss);
  EXPECT_EQ(h.grid, g);
  EXPECT_EQ(h.values, f.values);
}

TEST(OperatorEngine, AmplitudeWithoutYDependenceIsFso) {
  const TorusGrid g(1, 16);
  const auto c = FrequencyCube::for_grid(g);
  const auto phi = reg().phase(EntrySpec{"half-wave", {{"t", 0.2}}, {}}, 1);
  const auto sym = reg().symbol(EntrySpec{"cosine-modulated", {}, {}}, 1);
  AmplitudeSymbol amp;
  amp.name = "from-symbol";
  amp.eval = [sym](const Coord& x, const Coord&, const Index& xi) { return sym(x, xi); };
  const auto f = random_function(g, c, 2);
  EXPECT_LT(max_diff(apply_amplitude(phi, amp, f).values, apply_fso(FsoOperator::create(phi, sym, g, c), f).values),
            1e-10);
}

TEST(OperatorEngine, AmplitudeInYActsBeforeTheTransform) {
  // a(x, y, xi) = b(y): A f = T(b f) with T the FSO of symbol 1
  const TorusGrid g(1, 32);
  const FrequencyCube c(1, 15);
  const auto phi = reg().phase(EntrySpec{"half-wave", {{"t", 0.2}}, {}}, 1);
  AmplitudeSymbol amp;
  amp.eval = [](const Coord&, const Coord& y, const Index&) { return Complex(1.0 + 0.5 * std::cos(2 * oracle::kPi * y[0])); };
  SpectralSequence s(c);
  s.at({2, 0, 0}) = 1.0;
  s.at({-3, 0, 0}) = 0.5;
  const auto f = inverse_transform(s, g);
  PeriodicFunction bf = f;
  for (std::size_t k = 0; k < 32; ++k) bf.values[k] *= 1.0 + 0.5 * std::cos(2 * oracle::kPi * g.node(k)[0]);
  const auto want = apply_fso(FsoOperator::create(phi, reg().symbol(EntrySpec{"identity", {}, {}}, 1), g, c), bf).values;
  EXPECT_LT(max_diff(apply_amplitude(phi, amp, f, c).values, want), 1e-10);
}

TEST(OperatorEngine, EuclideanIdentityReproducesGaussian) {
  EuclideanFio T;
  T.phase = [](double x, double xi) { return x * xi; };
  T.symbol = [](double, double) { return Complex(1.0); };
  T.symbol_x_independent = true;
  const std::vector<double> xs{-1.0, 0.0, 0.3, 2.5};
  const auto r = apply_euclidean_fio(T, [](double y) { return Complex(std::exp(-oracle::kPi * y * y)); }, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(std::abs(r.values[i] - std::exp(-oracle::kPi * xs[i] * xs[i])), 0.0, 1e-10);
  EXPECT_LT(r.refinement_change, 1e-4);
}

TEST(OperatorEngine, EuclideanMultiplierOnGaussian) {
  // m(xi) = e^{-pi xi^2} on g = e^{-pi y^2}: output e^{-pi x^2 / 2} / sqrt 2
  EuclideanFio T;
  T.phase = [](double x, double xi) { return x * xi + 0.5 * xi; };
  T.symbol = [](double, double xi) { return Complex(std::exp(-oracle::kPi * xi * xi)); };
  T.symbol_x_independent = true;
  const std::vector<double> xs{-1.0, 0.0, 0.7};
  const auto r = apply_euclidean_fio(T, [](double y) { return Complex(std::exp(-oracle::kPi * y * y)); }, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i] + 0.5;
    EXPECT_NEAR(std::abs(r.values[i] - std::exp(-oracle::kPi * x * x / 2) / std::sqrt(2.0)), 0.0, 1e-10);
  }
  // the batched plan agrees with the per-point evaluation
  const EuclideanPlan plan(T, xs);
  Eigen::MatrixXcd G(static_cast<Eigen::Index>(plan.y().size()), 1);
  for (std::size_t i = 0; i < plan.y().size(); ++i)
    G(Eigen::Index(i), 0) = std::exp(-oracle::kPi * plan.y()[i] * plan.y()[i]);
  const Eigen::MatrixXcd out = plan.apply(G);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(std::abs(out(Eigen::Index(i), 0) - r.values[i]), 0.0, 1e-12);
}

TEST(OperatorEngine, MismatchedShapesRaise) {
  const TorusGrid g(1, 16);
  EXPECT_THROW(FsoOperator::create(linear_phase(2), reg().symbol(EntrySpec{"identity", {}, {}}, 1), g,
                                   FrequencyCube::for_grid(g)),
               Error);
  EXPECT_THROW(FsoOperator::create(linear_phase(1), reg().symbol(EntrySpec{"identity", {}, {}}, 1), g,
                                   FrequencyCube(1, 9)),
               Error);
}

}  // namespace
