#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "registry.hpp"
#include "torusfio/boundedness_lab.hpp"
#include "torusfio/error.hpp"
#include "torusfio/random.hpp"

using namespace torusfio;
using tfio::EntrySpec;
using tfio::Registry;

namespace {

const Registry& reg() {
  static const Registry r = Registry::builtin();
  return r;
}

FsoOperator make(const std::string& phase, ParamMap pp, const std::string& symbol, ParamMap sp, int dim, int n,
                 int cutoff = -1) {
  const TorusGrid g(dim, n);
  const FrequencyCube c = cutoff < 0 ? FrequencyCube::for_grid(g) : FrequencyCube(dim, cutoff);
  return FsoOperator::create(reg().phase(EntrySpec{phase, std::move(pp), {}}, dim),
                             reg().symbol(EntrySpec{symbol, std::move(sp), {}}, dim), g, c);
}

TEST(Thresholds, SymmetricInConjugateExponent) {
  for (int n = 1; n <= 3; ++n)
    for (double p : {1.1, 1.5, 2.0, 3.0, 4.0, 7.5})
      for (double rho : {0.5, 1.0}) {
        const auto a = thresholds(n, p, rho);
        const auto b = thresholds(n, p / (p - 1.0), rho);
        EXPECT_EQ(a.kappa_p, b.kappa_p);
        EXPECT_EQ(a.m_p, b.m_p);
      }
  // 1/4 - 1/2 and 3/4 - 1/2 are exact in binary
  const auto t = thresholds(2, 4.0);
  EXPECT_EQ(t.kappa_p, -0.25);
  EXPECT_EQ(t.p_conjugate, 4.0 / 3.0);
  EXPECT_EQ(thresholds(3, 4.0).kappa_p, -0.5);
  EXPECT_FALSE(std::signbit(thresholds(1, 4.0).kappa_p));
  EXPECT_EQ(thresholds(2, 4.0, 0.5).m_p, -0.25);
  EXPECT_THROW(thresholds(1, 1.0), Error);
  EXPECT_THROW(thresholds(1, kInfinity), Error);
}

TEST(NormEstimation, ExactMatchesJacobiSvd) {
  for (const auto& [ph, sy] : {std::pair{"perturbed", "cosine-modulated"}, std::pair{"half-wave", "smoothed-sign"}}) {
    const auto M = assemble_matrix(make(ph, {}, sy, {}, 1, 16));
    const auto e = norm_p2_exact(M);
    EXPECT_EQ(e.method, NormEstimate::Method::ExactSvdP2);
    EXPECT_EQ(e.direction_name(), "exact");
    EXPECT_NEAR(e.value, oracle::largest_singular_value(M.matrix), 1e-12);
  }
}

TEST(NormEstimation, ProbeBelowExactAndCloseAtLargeBudget) {
  struct C {
    std::string ph;
    ParamMap pp;
    std::string sy;
    ParamMap sp;
  };
  const std::vector<C> cases = {{"perturbed", {{"c", 0.1}}, "cosine-modulated", {}},
                                {"perturbed", {{"c", 0.15}}, "smoothed-sign", {}},
                                {"half-wave", {{"t", 0.3}}, "cosine-modulated", {{"kappa", -0.5}, {"c", 0.8}}},
                                {"linear", {}, "modulation", {{"kappa", -1}}}};
  for (const auto& c : cases) {
    // 16 x 16 operators with the cube filling the grid
    const auto A = make(c.ph, c.pp, c.sy, c.sp, 1, 16, 7);
    const double exact = norm_p2_exact(assemble_matrix(A)).value;
    ProbeOptions o;
    o.probes = 512;
    const auto e = norm_lp_probe(A, 2.0, o);
    EXPECT_LE(e.value, exact * (1.0 + 1e-12)) << c.sy;
    EXPECT_GE(e.value, 0.98 * exact) << c.sy;
    for (double v : e.probe_values) EXPECT_LE(v, exact * (1.0 + 1e-12));
    EXPECT_EQ(e.direction_name(), "lower-bound");
  }
}

TEST(NormEstimation, ReportedRatiosComeFromExplicitInputs) {
  const auto A = make("perturbed", {}, "cosine-modulated", {}, 1, 32);
  ProbeOptions o;
  o.probes = 32;
  o.steps = 5;
  o.keep_iterates = true;
  for (double p : {1.5, 4.0, kInfinity}) {
    const auto e = norm_lp_probe(A, p, o);
    ASSERT_EQ(e.iterates.size(), 32u);
    for (std::size_t i = 0; i < e.iterates.size(); ++i) {
      PeriodicFunction f(A.grid);
      f.values = e.iterates[i];
      const auto Af = apply_fso(A, f).values;
      const double w = A.grid.weight();
      const double r = oracle::grid_lp(Af, w, p) / oracle::grid_lp(f.values, w, p);
      EXPECT_NEAR(r, e.probe_values[i], 1e-10 * r);
      // band-limited to the cube
      const auto s = oracle::direct_dft(f.values, A.grid, FrequencyCube::for_grid(A.grid));
      double inside = 0.0;
      for (const auto& z : s) inside += std::norm(z);
      const double energy = std::pow(oracle::grid_lp(f.values, w, 2.0), 2);
      EXPECT_NEAR(inside, energy, 1e-10 * energy);
    }
  }
}

TEST(NormEstimation, ProbesAgreeAcrossThreadCounts) {
  const auto A = make("perturbed", {}, "smoothed-sign", {}, 2, 16);
  set_threads(1);
  const auto a = norm_lp_probe(A, 4.0, 64, 5);
  set_threads(2);
  const auto b = norm_lp_probe(A, 4.0, 64, 5);
  set_threads(0);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.probe_values, b.probe_values);
}

TEST(NormEstimation, TranslationIsAnIsometry) {
  const auto A = make("translation", {{"v1", 0.25}}, "identity", {}, 1, 16);
  for (double p : {1.5, 3.0, 6.0}) EXPECT_NEAR(norm_lp_probe(A, p, 32, 1).value, 1.0, 1e-12);
}

TEST(NormEstimation, SmallBudgetRejected) {
  const auto A = make("linear", {}, "identity", {}, 1, 16);
  EXPECT_THROW(norm_lp_probe(A, 2.0, 8, 1), Error);
  EXPECT_THROW(norm_lp_probe(A, 0.5, 64, 1), Error);
}

TEST(NormEstimation, DenseProbeMatchesOperatorProbe) {
  const auto A = make("perturbed", {}, "cosine-modulated", {}, 1, 16);
  ProbeOptions o;
  o.probes = 32;
  const auto a = norm_lp_probe(A, 3.0, o);
  const auto b = norm_lp_probe(assemble_matrix(A), A.cube, 3.0, o);
  EXPECT_NEAR(a.value, b.value, 1e-10);
}

TEST(GaussianLimit, ConstantFunctionGivesOne) {
  const TorusGrid g(1, 16);
  const auto one = PeriodicFunction::sample(g, [](const Coord&) { return Complex(1.0); });
  const std::vector<double> eps{1.0, 0.5, 1e-1, 1e-2, 1e-3, 1e-4};
  for (const auto& v : gaussian_limit(one, eps)) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-12);

  const TorusGrid g2(2, 8);
  const auto one2 = PeriodicFunction::sample(g2, [](const Coord&) { return Complex(1.0); });
  for (const auto& v : gaussian_limit(one2, {0.3, 1e-2})) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-12);
}

TEST(GaussianLimit, MonomialsMatchClosedForm) {
  const TorusGrid g(1, 16);
  for (int m = 1; m <= 3; ++m) {
    const auto f = PeriodicFunction::sample(g, [m](const Coord& x) { return oracle::expi(m * x[0]); });
    const std::vector<double> eps{4.0, 1.0, 0.5, 1e-2};
    const auto v = gaussian_limit(f, eps);
    for (std::size_t i = 0; i < eps.size(); ++i)
      EXPECT_NEAR(std::abs(v[i] - oracle::gaussian_moment(eps[i], 1.0, m)), 0.0, 1e-12) << m << " " << eps[i];
  }
}

TEST(GaussianLimit, SequenceVersionUsesOneFunctionPerStep) {
  const TorusGrid g(1, 16);
  const auto v = gaussian_limit_sequence(
      [&](std::size_t i) {
        const int m = static_cast<int>(i);
        return PeriodicFunction::sample(g, [m](const Coord& x) { return 1.0 + oracle::expi(m * x[0]); });
      },
      {2.0, 1.0, 0.5});
  EXPECT_NEAR(v[0].real(), 2.0, 1e-12);
  EXPECT_NEAR(v[1].real(), 1.0 + std::exp(-oracle::kPi), 1e-12);
  EXPECT_NEAR(v[2].real(), 1.0 + std::exp(-8 * oracle::kPi), 1e-12);
}

TEST(GaussianLimit, RejectsUnorderedEps) {
  const TorusGrid g(1, 16);
  const auto one = PeriodicFunction::sample(g, [](const Coord&) { return Complex(1.0); });
  EXPECT_THROW(gaussian_limit(one, {1e-2, 1e-1}), Error);
  EXPECT_THROW(gaussian_limit(one, {-1.0}), Error);
}

EuclideanFio multiplier(std::function<double(double)> a) {
  EuclideanFio T;
  T.phase = [](double x, double xi) { return x * xi; };
  T.symbol = [a](double, double xi) { return Complex(a(xi)); };
  T.symbol_x_independent = true;
  return T;
}

// eps^{1/2} (ab)^{-1/2} int a(xi) e^{-pi (xi-m)^2/a} e^{-pi (xi-k)^2/b} dxi by Parseval, a = eps alpha, b = eps beta
double pairing_oracle(const std::function<double(double)>& sym, double eps, double alpha, double beta, int m, int k) {
  const double a = eps * alpha, b = eps * beta;
  const double s = std::sqrt(a * b / (a + b));
  const double c = (m * b + k * a) / (a + b);
  const int n = 20001;
  const double L = 12.0 * s, h = 2.0 * L / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = c - L + i * h;
    acc += sym(xi) * std::exp(-oracle::kPi * (xi - m) * (xi - m) / a - oracle::kPi * (xi - k) * (xi - k) / b);
  }
  return std::sqrt(eps / (a * b)) * acc * h;
}

TEST(GaussianPairing, IdentityMatchesClosedForm) {
  const auto T = multiplier([](double) { return 1.0; });
  for (const auto& [alpha, beta] : {std::pair{0.5, 0.5}, std::pair{0.25, 0.75}}) {
    for (const auto& [m, k] : {std::pair{2, 2}, std::pair{1, 3}, std::pair{1, 2}}) {
      GaussianPairingConfig cfg;
      cfg.alpha = alpha;
      cfg.beta = beta;
      cfg.m = m;
      cfg.k = k;
      cfg.eps = {1.0, 1e-1, 1e-2, 1e-3};
      const auto v = gaussian_pairing(T, cfg);
      for (std::size_t i = 0; i < v.size(); ++i)
        EXPECT_NEAR(std::abs(v[i] - oracle::gaussian_moment(cfg.eps[i], alpha + beta, m - k)), 0.0, 1e-9)
            << m << "," << k << " eps=" << cfg.eps[i];
    }
  }
}

TEST(GaussianPairing, MultiplierMatchesParsevalOracle) {
  const auto sym = [](double xi) { return 1.0 / std::sqrt(1.0 + xi * xi); };
  const auto T = multiplier(sym);
  for (const auto& [m, k] : {std::pair{2, 2}, std::pair{1, 3}, std::pair{0, 0}}) {
    GaussianPairingConfig cfg;
    cfg.m = m;
    cfg.k = k;
    cfg.eps = {1e-1, 1e-2, 1e-3};
    const auto v = gaussian_pairing(T, cfg);
    for (std::size_t i = 0; i < v.size(); ++i)
      EXPECT_NEAR(std::abs(v[i] - pairing_oracle(sym, cfg.eps[i], cfg.alpha, cfg.beta, m, k)), 0.0, 1e-9);
  }
}

TEST(GaussianPairing, LimitIsTheUnscaledTorusPairing) {
  // eps^{1/2} int w_{eps alpha} w_{eps beta} = (alpha + beta)^{-1/2} = 1, and a(m) factors out in the
  // limit, so the pairing tends to <A P, Q> = beta^{1/2} pairing_target
  const auto sym = [](double xi) { return 1.0 / std::sqrt(1.0 + xi * xi); };
  const auto T = multiplier(sym);
  const auto A = make("linear", {}, "bracket-power", {{"kappa", -1}}, 1, 16);
  for (const auto& [alpha, beta] : {std::pair{0.5, 0.5}, std::pair{0.25, 0.75}, std::pair{0.625, 0.375}}) {
    GaussianPairingConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.m = 2;
    cfg.k = 2;
    cfg.eps = {1e-3};
    const Complex v = gaussian_pairing(T, cfg)[0];
    const Complex discrete = pairing_target(A, cfg) * std::sqrt(beta);
    EXPECT_NEAR(std::abs(discrete - sym(2.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v - discrete), 0.0, 1e-4);
  }
}

TEST(GaussianPairing, TargetUsesTorusOperator) {
  const auto A = make("half-wave", {{"t", 0.25}}, "bracket-power", {{"kappa", -1}}, 1, 16);
  GaussianPairingConfig cfg;
  cfg.m = 3;
  cfg.k = 3;
  cfg.alpha = 0.75;
  cfg.beta = 0.25;
  // <A e_3, e_3> = e^{2 pi i t 3} <3>^{-1}
  const Complex want = 2.0 * oracle::expi(0.75) / std::sqrt(10.0);
  EXPECT_NEAR(std::abs(pairing_target(A, cfg) - want), 0.0, 1e-12);
  cfg.k = 1;
  EXPECT_NEAR(std::abs(pairing_target(A, cfg)), 0.0, 1e-12);
}

TEST(GaussianPairing, ConfigValidation) {
  GaussianPairingConfig cfg;
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.alpha = 0.3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.alpha = 0.5;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps = {1e-2, 1e-1};
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Transference, TorusDoesNotExceedLine) {
  const TorusGrid g(1, 32);
  const FrequencyCube c(1, 7);
  TransferenceOptions o;
  o.probes = 32;
  o.steps = 10;
  const auto phi = reg().phase(EntrySpec{"linear", {}, {}}, 1);
  const auto sym = reg().continuum_symbol(EntrySpec{"smoothed-sign", {}, {}}, 1);
  const auto r4 = transference_check(phi, sym, 4.0, g, c, o);
  EXPECT_LE(r4.ratio, 1.05);
  EXPECT_GT(r4.euclid_norm_lb, 1.0);
  EXPECT_TRUE(std::isnan(r4.torus_exact));
  const auto r2 = transference_check(phi, sym, 2.0, g, c, o);
  EXPECT_LE(r2.ratio, 1.05);
  EXPECT_LE(r2.torus_norm_lb, r2.torus_exact * (1 + 1e-12));
  EXPECT_THROW(transference_check(linear_phase(2), sym, 2.0, TorusGrid(2, 8), FrequencyCube(2, 3), o), Error);
}

TEST(FrozenBound, MultiplierBoundIsTheNormItself) {
  const auto A = make("half-wave", {}, "bracket-power", {{"kappa", -0.5}}, 1, 16);
  const auto b = frozen_family_bound(A, 2.0);
  EXPECT_EQ(b.max_order, 1);
  EXPECT_NEAR(b.slack, 1.0, 1e-12);
  EXPECT_EQ(b.measured_method, "exact-svd-p2");
}

TEST(FrozenBound, MeasuredBelowBoundOnXDependentSymbols) {
  struct C {
    std::string ph;
    std::string sy;
    ParamMap sp;
  };
  for (const auto& c : std::vector<C>{{"linear", "modulation", {{"kappa", -1}}},
                                      {"linear", "cosine-modulated", {}},
                                      {"half-wave", "cosine-modulated", {{"kappa", -1}}},
                                      {"perturbed", "cosine-modulated", {{"c", 0.9}}}}) {
    const auto A = make(c.ph, {}, c.sy, c.sp, 1, 16);
    const auto b = frozen_family_bound(A, 2.0);
    EXPECT_LE(b.measured_norm, b.sobolev_bound) << c.sy;
    EXPECT_GT(b.terms.size(), 1u);
    EXPECT_NEAR(b.slack, b.measured_norm / b.sobolev_bound, 1e-15);
  }
  // the modulation symbol e^{2 pi i x}: frozen norms 1 (beta = 0) and 2 pi (beta = 1)
  const auto b = frozen_family_bound(make("linear", {}, "modulation", {{"kappa", 0}}, 1, 16), 2.0);
  EXPECT_NEAR(b.sobolev_bound, std::sqrt(1.0 + 4.0 * oracle::kPi * oracle::kPi), 1e-10);
  EXPECT_NEAR(b.measured_norm, 1.0, 1e-12);
}

TEST(FrozenBound, ProbeMeasurementForOtherP) {
  const auto b = frozen_family_bound(make("linear", {}, "cosine-modulated", {}, 1, 16), 4.0, ProbeOptions{});
  EXPECT_EQ(b.measured_method, "probe-lower-bound");
  EXPECT_LE(b.measured_norm, b.sobolev_bound);
}

TEST(GrowthFit, RecoversPowerLaw) {
  const std::vector<double> x{4, 8, 16, 32};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.3));
  const auto f = fit_growth(x, y);
  EXPECT_NEAR(f.exponent, 0.3, 1e-12);
  EXPECT_NEAR(std::exp2(f.intercept), 3.0, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_TRUE(f.reliable);
  const auto noisy = fit_growth(x, {1.0, 4.0, 1.0, 4.0});
  EXPECT_FALSE(noisy.reliable);
  EXPECT_THROW(fit_growth({1, 2}, {1, 2}), Error);
  EXPECT_THROW(fit_growth({1, 1, 2}, {1, 1, 2}), Error);
  EXPECT_THROW(fit_growth({1, 2, 3}, {1, 0, 2}), Error);
}

TEST(TruncationSweep, FlatForBoundedMultiplier) {
  TruncationSweepOptions o;
  o.cutoffs = {2, 4, 8};
  o.p = 2.0;
  o.probes = 64;
  const auto s = truncation_sweep(linear_phase(1), 0.0, o);
  ASSERT_EQ(s.estimates.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.estimates[i].value, 1.0, 1e-12);
    EXPECT_EQ(s.estimates[i].seed, derive_seed(1, i));
  }
  EXPECT_NEAR(s.fit.exponent, 0.0, 1e-10);
  const auto t = s.table();
  ASSERT_EQ(t.header.size(), 5u);
  EXPECT_EQ(t.header[0], "abscissa");
  EXPECT_EQ(t.header[3], "seed");
  EXPECT_EQ(s.records().size(), 4u);
}

TEST(TruncationSweep, RejectsBadCutoffs) {
  TruncationSweepOptions o;
  o.cutoffs = {4, 4, 8};
  EXPECT_THROW(truncation_sweep(linear_phase(1), 0.0, o), Error);
  o.cutoffs = {4, 8};
  EXPECT_THROW(truncation_sweep(linear_phase(1), 0.0, o), Error);
}

TEST(DispersiveSweep, UnimodularFamilyHasUnitNorms) {
  const TorusGrid g(1, 32);
  const auto phi = reg().phase_family(EntrySpec{"dispersive-wave", {}, {}}, 1);
  const auto fam = reg().symbol_family(EntrySpec{"dispersive-cutoff", {}, {}}, 1);
  const auto s = dispersive_sweep(phi, fam, {1, 2, 4, 8}, g, FrequencyCube::for_grid(g), {});
  for (const auto& e : s.estimates) EXPECT_NEAR(e.value, 1.0, 1e-10);
  EXPECT_TRUE(std::isfinite(s.sup));
  EXPECT_TRUE(s.bound_ok);
  bool attained = false;
  for (std::size_t i = 0; i < s.abscissas.size(); ++i) attained = attained || (s.estimates[i].value == s.sup && s.abscissas[i] == s.sup_at);
  EXPECT_TRUE(attained);
}

TEST(DispersiveSweep, SupAttainedOnShippedFamilies) {
  const TorusGrid g(1, 32);
  for (const auto& [ph, sy] : {std::pair{"dispersive-wave", "dispersive-cosine"},
                               std::pair{"dispersive-cosine-wave", "dispersive-cosine"},
                               std::pair{"dispersive-cosine-wave", "dispersive-cutoff"}}) {
    const auto phi = reg().phase_family(EntrySpec{ph, {}, {}}, 1);
    const auto fam = reg().symbol_family(EntrySpec{sy, {}, {}}, 1);
    const auto s = dispersive_sweep(phi, fam, {1, 2, 4, 8}, g, FrequencyCube::for_grid(g), {});
    ASSERT_TRUE(std::isfinite(s.sup)) << ph << "/" << sy;
    double m = 0.0;
    for (const auto& e : s.estimates) m = std::max(m, e.value);
    EXPECT_EQ(m, s.sup);
    EXPECT_TRUE(std::isfinite(s.constant));
  }
}

TEST(DispersiveSweep, FailingHypothesesRaiseUnlessWaived) {
  const TorusGrid g(1, 16);
  const auto phi = reg().phase_family(EntrySpec{"dispersive-wave", {}, {}}, 1);
  const auto fam = reg().symbol_family(EntrySpec{"dispersive-cutoff", {}, {}}, 1);
  DispersiveSweepOptions o;
  o.validation.support_constant = 3.0;
  EXPECT_THROW(dispersive_sweep(phi, fam, {1, 2, 4}, g, FrequencyCube::for_grid(g), o), Error);
  o.waive_hypotheses = true;
  const auto s = dispersive_sweep(phi, fam, {1, 2, 4}, g, FrequencyCube::for_grid(g), o);
  EXPECT_TRUE(s.hypotheses_waived);
}

TEST(Records, NormEstimateRecordShape) {
  const auto e = norm_p2_exact(assemble_matrix(make("linear", {}, "identity", {}, 1, 8)));
  const std::string j = e.record().to_json();
  EXPECT_EQ(j.rfind("{\"schema\":\"torusfio/norm-estimate/1\"", 0), 0u) << j;
  EXPECT_NE(j.find("\"method\":\"exact-svd-p2\""), std::string::npos);
  EXPECT_NE(j.find("\"value\":1"), std::string::npos);
}

}  // namespace
