#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "torusfio/operator_engine.hpp"
#include "torusfio/phase_toolkit.hpp"
#include "torusfio/records.hpp"
#include "torusfio/symbol_calculus.hpp"
#include "torusfio/torus_fourier.hpp"

namespace torusfio {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ------------------------------------------------------------ thresholds

struct OrderThresholds {
  int dim = 1;
  double p = 2.0;
  double p_conjugate = 2.0;
  double rho = 1.0;
  /// -(n-1)|1/p - 1/2|
  double kappa_p = 0.0;
  /// -n(1-rho)|1/p - 1/2|
  double m_p = 0.0;
};

/// Needs 1 < p < inf.
OrderThresholds thresholds(int dim, double p, double rho = 1.0);

// ------------------------------------------------------------ norms

struct NormEstimate {
  enum class Method { ExactSvdP2, ProbeLowerBound };
  enum class Direction { Exact, LowerBound };

  double p = 2.0;
  double value = 0.0;
  Method method = Method::ProbeLowerBound;
  Direction direction = Direction::LowerBound;
  int probes = 0;
  std::uint64_t seed = 0;
  int steps = 0;
  /// best ratio reached by each probe; value is their maximum
  std::vector<double> probe_values;
  /// grid values of each probe's best input, when requested
  std::vector<std::vector<Complex>> iterates;

  std::string method_name() const;
  std::string direction_name() const;
  Record record() const;
};

/// Largest singular value of the matrix (the discrete L^2 operator norm).
NormEstimate norm_p2_exact(const DenseOperator& m);

/// Probe inputs: i.i.d. complex normal coefficients (E|c|^2 = 1) on the cube,
/// keeping the largest 25% by modulus, one stream per probe derived from
/// (seed, probe index). Each probe then takes `steps` steps of the dual power
/// ascent f <- band(J_{p'}(A^* J_p(A f))), J_p(y) = |y|^{p-1} sign(y), which is
/// plain power iteration on A^*A at p = 2. Every reported ratio is
/// ||A f||_p / ||f||_p of an explicit input.
struct ProbeOptions {
  int probes = 64;
  std::uint64_t seed = 1;
  int steps = 20;
  double keep_fraction = 0.25;
  bool keep_iterates = false;
};

NormEstimate norm_lp_probe(const FsoOperator& A, double p, const ProbeOptions& opts);
NormEstimate norm_lp_probe(const FsoOperator& A, double p, int probes, std::uint64_t seed);
/// Same estimator for a dense operator, inputs band-limited to `cube`.
NormEstimate norm_lp_probe(const DenseOperator& m, const FrequencyCube& cube, double p, const ProbeOptions& opts);

// ------------------------------------------------------------ gaussian limits

/// eps^{n/2} int_{R^n} e^{-pi eps |x|^2} f(x) dx per eps, f given by its
/// trigonometric polynomial. Trapezoid over |x_j| <= window_factor/sqrt(eps)
/// per axis; Gaussian tail mass beyond the window above 1e-8 raises an
/// accuracy error.
std::vector<Complex> gaussian_limit(const PeriodicFunction& f, const std::vector<double>& eps,
                                    double window_factor = 6.0);

/// One function per step: term m uses f_m and eps[m].
std::vector<Complex> gaussian_limit_sequence(const std::function<PeriodicFunction(std::size_t)>& f,
                                             const std::vector<double>& eps, double window_factor = 6.0);

struct GaussianPairingConfig {
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  int m = 1;
  int k = 1;
  double window_factor = 6.0;

  void validate() const;
};

/// eps^{1/2} int [T(P w_{eps alpha})](x) conj(Q(x)) w_{eps beta}(x) dx with
/// P = e^{2 pi i m x}, Q = e^{2 pi i k x}, w_d(x) = e^{-pi d x^2}. Quadratures
/// are rebuilt per eps around the spectrum of P w; the phase and symbol of T
/// are kept.
std::vector<Complex> gaussian_pairing(const EuclideanFio& T, const GaussianPairingConfig& cfg);

/// beta^{-1/2} <A P, Q> on the torus, the comparison value for the pairing.
Complex pairing_target(const FsoOperator& A, const GaussianPairingConfig& cfg);

// ------------------------------------------------------------ transference

struct TransferenceOptions {
  int probes = 256;
  std::uint64_t seed = 1;
  int steps = 20;
  /// width of the window w_delta applied to torus probes on the line
  double delta = 1e-2;
};

struct TransferenceRecord {
  double p = 2.0;
  double euclid_norm_lb = 0.0;
  double torus_norm_lb = 0.0;
  /// torus / euclid
  double ratio = 0.0;
  /// exact torus norm at p = 2, NaN otherwise
  double torus_exact = kNaN;
  double delta = 0.0;
  int probes = 0;
  std::uint64_t seed = 0;

  Record record() const;
};

/// Torus side: probe estimate of the FSO with the restricted symbol. Line side:
/// each probe's best torus input P is windowed to P w_delta and pushed through
/// the euclidean operator; the ratio of L^p(R) norms is taken by quadrature.
/// n = 1 only.
TransferenceRecord transference_check(const PhaseFunction& phi, const ContinuumSymbol& a, double p,
                                      const TorusGrid& grid, const FrequencyCube& cube,
                                      const TransferenceOptions& opts);

// ------------------------------------------------------------ frozen symbols

struct FrozenTerm {
  Index beta{0, 0, 0};
  double sup_norm = 0.0;
  Coord argmax{0, 0, 0};
};

struct FrozenBound {
  double p = 2.0;
  double measured_norm = 0.0;
  std::string measured_method;
  double sobolev_bound = 0.0;
  /// measured / bound
  double slack = 0.0;
  int max_order = 0;
  std::vector<FrozenTerm> terms;

  Record record() const;
};

/// B = (sum_{|beta| <= [n/p]+1} sup_z ||A_z^(beta)||^p)^{1/p} over the grid
/// nodes z, A_z^(beta) the FSO with symbol d_z^beta a(z, .). Exact norms at
/// p = 2, probe lower bounds otherwise.
FrozenBound frozen_family_bound(const FsoOperator& A, double p, const ProbeOptions& opts = {});

// ------------------------------------------------------------ sweeps

struct GrowthFit {
  double exponent = kNaN;
  double intercept = kNaN;
  /// RMS residual of the log2 fit
  double residual = kNaN;
  int points = 0;
  bool reliable = false;
};

/// OLS of log2 y against log2 x; needs >= 3 points, x strictly increasing and
/// positive, y positive. Residual above 0.2 marks the fit unreliable.
GrowthFit fit_growth(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  std::string kind;
  std::string phase;
  std::string symbol;
  double p = 2.0;
  std::vector<double> abscissas;
  std::vector<NormEstimate> estimates;
  std::vector<std::string> paths;
  GrowthFit fit;

  double sup = 0.0;
  double sup_at = kNaN;
  /// dispersive sweeps: sup_t max_{alpha,beta} C_{alpha beta} t^{|beta|}
  double symbol_bound = kNaN;
  /// sup / symbol_bound
  double constant = kNaN;
  bool bound_ok = true;
  bool hypotheses_waived = false;

  std::vector<Record> records() const;
  /// columns abscissa, estimate, method, seed, fitted_exponent
  CsvTable table() const;
};

/// <xi>^kappa, x independent, with its analytic x-derivative (zero).
LatticeSymbol bracket_power_symbol(int dim, double kappa);

struct TruncationSweepOptions {
  std::vector<int> cutoffs{4, 8, 16, 32};
  double p = 4.0;
  int probes = 256;
  std::uint64_t seed = 1;
  int steps = 20;
  /// grid points per axis N = oversampling * cutoff + 4
  int oversampling = 4;
};

/// Per cutoff, probe estimate of the FSO of a on that cube; point i uses the
/// seed derive_seed(seed, i).
SweepResult truncation_sweep(const PhaseFunction& phi, const LatticeSymbol& a, const TruncationSweepOptions& opts);
SweepResult truncation_sweep(const PhaseFunction& phi, double kappa, const TruncationSweepOptions& opts);

struct DispersiveSweepOptions {
  /// When set, the check is sup <= constant * symbol_bound.
  std::optional<double> constant;
  bool waive_hypotheses = false;
  DispersiveOptions validation;
};

/// Exact p = 2 norms of the dense A_t. Without waiver the hypotheses are checked
/// first (or taken from `precheck`) and a failing family raises a domain error.
SweepResult dispersive_sweep(const TimeDependentPhase& phi, const SymbolFamily& a, const std::vector<double>& t_grid,
                             const TorusGrid& grid, const FrequencyCube& cube, const DispersiveSweepOptions& opts,
                             const DispersivePhaseReport* precheck = nullptr);

}  // namespace torusfio
