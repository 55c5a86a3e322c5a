#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "torusfio/symbol_calculus.hpp"
#include "torusfio/torus_fourier.hpp"
#include "torusfio/types.hpp"

namespace torusfio {

using PhaseValueFn = std::function<double(const Coord& x, const Coord& xi)>;
using PhaseGradFn = std::function<Coord(const Coord& x, const Coord& xi)>;
/// H[i][j] = d_{x_i} d_{xi_j} phi
using PhaseHessFn = std::function<Matrix(const Coord& x, const Coord& xi)>;
/// d_x^alpha phi for a spatial multi-index alpha
using PhaseXDerivFn = std::function<double(const Coord& x, const Coord& xi, const Index& alpha)>;

struct PhaseFunction {
  std::string name;
  int dim = 1;
  PhaseValueFn value;
  PhaseGradFn grad_x;
  PhaseGradFn grad_xi;
  PhaseHessFn mixed_hessian;
  PhaseXDerivFn x_deriv;
  bool homogeneous = false;
  /// Set when phi(x, xi) = x.xi + r(xi); operators then use FFTs.
  std::function<double(const Coord& xi)> multiplier_remainder;
  ParamMap params;

  double operator()(const Coord& x, const Coord& xi) const { return value(x, xi); }
  double operator()(const Coord& x, const Index& xi) const { return value(x, to_coord(xi)); }
};

PhaseFunction linear_phase(int dim);

/// Perturbation phi(t, x, xi) of the family x.xi + t phi(t, x, xi), t >= t0.
struct TimeDependentPhase {
  std::string name;
  int dim = 1;
  double t0 = 1.0;
  std::function<double(double t, const Coord& x, const Coord& xi)> value;
  std::function<Matrix(double t, const Coord& x, const Coord& xi)> mixed_hessian;
  bool homogeneous = true;
  bool x_independent = false;
  ParamMap params;

  /// The full phase x.xi + t phi(t, x, xi) at one time.
  PhaseFunction at(double t) const;
};

struct PhaseReport {
  std::string phase;
  std::uint64_t seed = 0;
  int samples = 0;
  int pair_samples = 0;

  double periodicity_defect = 0.0;
  bool periodicity_ok = true;
  Coord periodicity_worst_x{0, 0, 0};
  Index periodicity_worst_xi{0, 0, 0};
  int periodicity_worst_axis = -1;

  bool homogeneity_declared = false;
  double homogeneity_defect = 0.0;

  double det_lower_bound = 0.0;
  double det_upper_bound = 0.0;
  std::pair<double, double> grad_xi_window{0.0, 0.0};
  std::pair<double, double> grad_x_window{0.0, 0.0};
  double separation_constant = 0.0;

  /// sup |d_{x_i} d_{xi_j} phi|, row-major dim x dim
  std::vector<double> mixed_seminorms;
  /// sup |d_x^alpha phi| / |xi| for pure-axis alpha of order 1..ceiling, per order
  int spatial_ceiling = 3;
  std::vector<double> spatial_growth;

  bool analytic_gradients = false;

  std::vector<std::pair<std::string, std::string>> records() const;
  std::string serialize() const;
};

struct PhaseValidationOptions {
  int sample_budget = 1000;
  std::uint64_t seed = 1;
  int spatial_ceiling = 3;
  double periodicity_tolerance = 1e-9;
};

PhaseReport validate_phase(const PhaseFunction& phi, const TorusGrid& grid, const FrequencyCube& cube,
                           const PhaseValidationOptions& opts);
PhaseReport validate_phase(const PhaseFunction& phi, const TorusGrid& grid, const FrequencyCube& cube,
                           int sample_budget, std::uint64_t seed);

/// Numerical derivatives used when analytic handles are absent.
Coord numeric_grad_xi(const PhaseFunction& phi, const Coord& x, const Coord& xi);
Coord numeric_grad_x(const PhaseFunction& phi, const Coord& x, const Coord& xi, int line_points);
Matrix numeric_mixed_hessian(const PhaseFunction& phi, const Coord& x, const Coord& xi, int line_points);
double determinant(const Matrix& m, int dim);

using SymbolFamily = std::function<LatticeSymbol(double t)>;

struct DispersiveEntry {
  double t = 0.0;
  double min_det = 0.0;
  /// max over 1 <= |alpha|, |beta| <= ceiling of sup |d_x^beta d_xi^alpha phi| t^{|beta|}
  double phase_ratio = 0.0;
  /// max over |alpha|, |beta| <= ceiling of sup |d_x^beta Delta^alpha a| t^{|beta|}
  double symbol_ratio = 0.0;
  std::vector<std::pair<std::string, double>> symbol_terms;
  std::vector<std::pair<std::string, double>> phase_terms;
  bool support_ok = true;
  std::size_t support_violations = 0;
};

struct DispersivePhaseReport {
  std::string phase;
  std::string symbol;
  int ceiling = 2;
  double support_constant = 1.0;
  std::uint64_t seed = 0;
  std::vector<DispersiveEntry> entries;

  std::vector<std::pair<std::string, std::string>> records() const;
  std::string serialize() const;
};

struct DispersiveOptions {
  int ceiling = 2;
  int sample_budget = 256;
  double support_constant = 1.0;
  std::uint64_t seed = 1;
};

DispersivePhaseReport validate_dispersive(const TimeDependentPhase& phi, const SymbolFamily& a,
                                          const std::vector<double>& t_grid, const TorusGrid& grid,
                                          const FrequencyCube& cube, const DispersiveOptions& opts);

}  // namespace torusfio
