#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "torusfio/phase_toolkit.hpp"
#include "torusfio/symbol_calculus.hpp"
#include "torusfio/torus_fourier.hpp"

namespace torusfio {

/// Largest phase-compatibility defect dist(phi(x+e_j,xi) - phi(x,xi), Z) over
/// seeded random x and lattice xi in the cube.
double periodicity_defect(const PhaseFunction& phi, const FrequencyCube& cube, int samples, std::uint64_t seed);

class FsoKernel;

struct FsoOperator {
  PhaseFunction phase;
  LatticeSymbol symbol;
  TorusGrid grid;
  FrequencyCube cube;
  bool periodicity_waived = false;
  double periodicity_defect_seen = 0.0;

  /// Checks torus compatibility of the phase (256 samples) unless waived; an
  /// incompatible phase without the waiver raises a domain error.
  static FsoOperator create(PhaseFunction phase, LatticeSymbol symbol, const TorusGrid& grid,
                            const FrequencyCube& cube, bool waive_periodicity = false);

  /// Lazily built evaluation plan, shared between copies.
  const FsoKernel& kernel() const;

 private:
  struct KernelSlot;
  std::shared_ptr<KernelSlot> slot_;
};

/// Evaluation plan for one operator. Multiplier-type phases x.xi + r(xi) with a
/// symbol that is a finite trigonometric polynomial in x use one inverse FFT per
/// x-mode. Other operators use a cached kernel matrix
/// K[j, xi] = e^{2 pi i phi(x_j, xi)} a(x_j, xi) when it fits in memory and the
/// row-by-row direct sum otherwise.
class FsoKernel {
 public:
  enum class Path { Modes, Matrix, Direct };

  explicit FsoKernel(const FsoOperator& op);

  Path path() const { return path_; }
  std::string path_name() const;

  /// values on the grid -> values on the grid
  std::vector<Complex> apply(const std::vector<Complex>& f) const;
  /// Adjoint in the discrete L^2 inner product <u,v> = N^{-n} sum u conj(v).
  std::vector<Complex> apply_adjoint(const std::vector<Complex>& g) const;
  /// spectrum on the cube -> values on the grid
  std::vector<Complex> apply_spectrum(const std::vector<Complex>& fhat) const;

  /// K as a dense |grid| x |cube| matrix.
  Eigen::MatrixXcd kernel_matrix() const;

 private:
  struct Mode {
    Index q;
    std::vector<Complex> weight;  // e^{2 pi i r(xi)} c_q(xi) per cube point
    std::vector<Complex> x_factor;  // e^{2 pi i q.x_k} per node
  };

  Complex entry(std::size_t node, std::size_t freq) const;
  std::vector<Complex> synthesize(const std::vector<Complex>& on_cube) const;

  PhaseFunction phase_;
  LatticeSymbol symbol_;
  TorusGrid grid_;
  FrequencyCube cube_;
  Path path_ = Path::Direct;
  std::vector<Mode> modes_;
  Eigen::MatrixXcd k_;
};

PeriodicFunction apply_fso(const FsoOperator& A, const PeriodicFunction& f);
PeriodicFunction apply_fso_adjoint(const FsoOperator& A, const PeriodicFunction& g);

/// a(X,D) f on the alias-free cube of f's grid.
PeriodicFunction apply_pseudo(const LatticeSymbol& a, const PeriodicFunction& f);
PeriodicFunction apply_pseudo(const LatticeSymbol& a, const PeriodicFunction& f, const FrequencyCube& cube);

/// Defining sum at an arbitrary point; needs a handle symbol.
Complex evaluate_fso(const FsoOperator& A, const SpectralSequence& fhat, const Coord& x);

/// T f(x) = sum_xi N^{-n} sum_y e^{2 pi i (phi(x,xi) - y.xi)} amp(x, y, xi) f(y)
PeriodicFunction apply_amplitude(const PhaseFunction& phi, const AmplitudeSymbol& amp, const PeriodicFunction& f,
                                 const FrequencyCube& cube);
PeriodicFunction apply_amplitude(const PhaseFunction& phi, const AmplitudeSymbol& amp, const PeriodicFunction& f);

struct DenseOperator {
  TorusGrid grid;
  Eigen::MatrixXcd matrix;
  std::string provenance;
  /// max relative error of the assembly check
  double consistency_error = 0.0;

  std::vector<Complex> apply(const std::vector<Complex>& f) const;
};

inline constexpr std::size_t kMaxDenseNodes = 4096;

/// Columns are A applied to the delta basis. The product with 10 seeded random
/// inputs is compared to apply_fso; a relative error above 1e-9 raises.
DenseOperator assemble_matrix(const FsoOperator& A);

DenseOperator adjoint(const DenseOperator& M);

/// <f, g> = N^{-n} sum_k f_k conj(g_k)
Complex inner_product(const std::vector<Complex>& f, const std::vector<Complex>& g, const TorusGrid& grid);

// ------------------------------------------------------------ euclidean side

struct EuclideanFio {
  std::function<double(double x, double xi)> phase;
  std::function<Complex(double x, double xi)> symbol;
  /// y-integral of the forward transform
  LineQuadrature y_quad{0.0, 12.0, 2049};
  /// xi-integral of the synthesis
  LineQuadrature xi_quad{0.0, 12.0, 2049};
  bool symbol_x_independent = false;
};

struct EuclideanResult {
  std::vector<double> x;
  std::vector<Complex> values;
  /// max |T_h f - T_{h/2} f| / max |T f| under node doubling of both rules
  double refinement_change = 0.0;
};

/// f sampled at the y-quadrature nodes, output at the requested points. With
/// `check_refinement` the computation is repeated on doubled rules and a change
/// above 1e-4 raises an accuracy error.
EuclideanResult apply_euclidean_fio(const EuclideanFio& T, const std::function<Complex(double)>& f,
                                    const std::vector<double>& x_out, bool check_refinement = true);

/// Same operator on samples of f already taken at T.y_quad nodes; no refinement.
std::vector<Complex> apply_euclidean_fio_samples(const EuclideanFio& T, const std::vector<Complex>& f_at_y,
                                                 const std::vector<double>& x_out);

/// Both quadratures assembled as matrices, for many inputs at once:
/// out = S F f with F[m, i] = w_i e^{-2 pi i y_i xi_m} and
/// S[k, m] = w_m e^{2 pi i phi(x_k, xi_m)} a(x_k, xi_m).
class EuclideanPlan {
 public:
  EuclideanPlan(const EuclideanFio& T, const std::vector<double>& x_out);

  /// columns of `f_at_y` are inputs sampled at the y nodes
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& f_at_y) const;

  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& x() const { return x_; }

 private:
  std::vector<double> y_;
  std::vector<double> x_;
  Eigen::MatrixXcd forward_;
  Eigen::MatrixXcd synthesis_;
};

}  // namespace torusfio
