#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torusfio/torus_fourier.hpp"
#include "torusfio/types.hpp"

namespace torusfio {

using SymbolFn = std::function<Complex(const Coord& x, const Index& xi)>;
/// Analytic x-derivative handle: returns d_x^beta a(x, xi).
using SymbolDerivFn = std::function<Complex(const Coord& x, const Index& xi, const Index& beta)>;
using ContinuumFn = std::function<Complex(const Coord& x, const Coord& xi)>;
using ContinuumDerivFn = std::function<Complex(const Coord& x, const Coord& xi, const Index& beta)>;
using AmplitudeFn = std::function<Complex(const Coord& x, const Coord& y, const Index& xi)>;

using ParamMap = std::map<std::string, double>;

/// Inclusive box lo..hi of lattice frequencies.
struct LatticeBox {
  int dim = 1;
  Index lo{0, 0, 0};
  Index hi{0, 0, 0};

  static LatticeBox from_cube(const FrequencyCube& cube);

  bool empty() const;
  bool contains(const Index& xi) const;
  std::size_t size() const;
  std::size_t flat(const Index& xi) const;
  Index point(std::size_t flat) const;
  LatticeBox intersect(const FrequencyCube& cube) const;
};

/// Values a(x_k, xi) for all grid nodes k and xi in the box; layout [k][xi].
struct SymbolTable {
  TorusGrid grid;
  LatticeBox box;
  std::vector<Complex> values;

  Complex& at(std::size_t node, const Index& xi) { return values[node * box.size() + box.flat(xi)]; }
  const Complex& at(std::size_t node, const Index& xi) const {
    return values[node * box.size() + box.flat(xi)];
  }
};

/// One x-Fourier mode e^{2 pi i q.x} c(xi) of a symbol that is a finite
/// trigonometric polynomial in x.
struct XMode {
  Index q{0, 0, 0};
  std::function<Complex(const Index&)> coeff;
};

class LatticeSymbol {
 public:
  struct HandleSpec {
    std::string name;
    int dim = 1;
    double order = 0.0;
    SymbolFn eval;
    SymbolDerivFn deriv;
    ParamMap params;
    bool x_independent = false;
    std::vector<XMode> x_modes;
  };

  LatticeSymbol() = default;
  static LatticeSymbol handle(HandleSpec spec);
  static LatticeSymbol tabulated(std::string name, double order, SymbolTable table, ParamMap params = {});
  /// Tabulate a handle symbol on grid x cube.
  static LatticeSymbol tabulate(const LatticeSymbol& a, const TorusGrid& grid, const FrequencyCube& cube);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double order() const { return order_; }
  const ParamMap& params() const { return params_; }
  bool x_independent() const { return x_independent_; }
  bool is_table() const { return static_cast<bool>(table_); }
  bool has_x_derivative() const { return static_cast<bool>(deriv_); }
  const std::vector<XMode>& x_modes() const { return x_modes_; }
  const std::optional<LatticeBox>& box() const { return box_; }
  const SymbolTable& table() const { return *table_; }
  const SymbolFn& handle_fn() const { return eval_; }
  const SymbolDerivFn& deriv_fn() const { return deriv_; }

  bool defined_at(const Index& xi) const { return !box_ || box_->contains(xi); }

  /// Handle symbols at any x; tables only at their grid nodes.
  Complex operator()(const Coord& x, const Index& xi) const;
  Complex at_node(const TorusGrid& grid, std::size_t node, const Index& xi) const;

  LatticeSymbol with_box(const LatticeBox& box) const;
  LatticeSymbol renamed(std::string name) const;

 private:
  std::string name_;
  int dim_ = 1;
  double order_ = 0.0;
  ParamMap params_;
  SymbolFn eval_;
  SymbolDerivFn deriv_;
  std::shared_ptr<const SymbolTable> table_;
  std::optional<LatticeBox> box_;
  bool x_independent_ = false;
  std::vector<XMode> x_modes_;
};

struct ContinuumSymbol {
  std::string name;
  int dim = 1;
  double order = 0.0;
  ContinuumFn eval;
  ContinuumDerivFn deriv;
  bool x_independent = false;

  Complex operator()(const Coord& x, const Coord& xi) const { return eval(x, xi); }
};

struct AmplitudeSymbol {
  std::string name;
  int dim = 1;
  double order = 0.0;
  AmplitudeFn eval;

  Complex operator()(const Coord& x, const Coord& y, const Index& xi) const { return eval(x, y, xi); }
};

struct SymbolClassSpec {
  double order = 0.0;
  double rho = 1.0;
  double delta = 0.0;
  int max_alpha = 2;
  int max_beta = 1;

  SymbolClassSpec() = default;
  SymbolClassSpec(double m, double rho_, double delta_, int n1, int n2);
  /// Ceilings |alpha| <= n+1, |beta| <= [n/p]+1.
  static SymbolClassSpec with_default_ceilings(double m, double rho, double delta, int dim, double p);
  void validate() const;
};

inline constexpr int kMaxDifferenceOrder = 8;

LatticeSymbol forward_difference(const LatticeSymbol& a, const Index& alpha);
LatticeSymbol backward_difference(const LatticeSymbol& a, const Index& alpha);

/// d_x^beta a: analytic handle when present, zero for x-independent symbols,
/// tabulated symbols and derivative-free handles by spectral differentiation per
/// axis. Gate: x-spectral energy beyond |eta_j| > N/4 must stay below 1e-6.
LatticeSymbol x_derivative(const LatticeSymbol& a, const Index& beta);

/// sum_{gamma <= alpha} (-1)^{|alpha - gamma|} binom(alpha, gamma) d_x^beta a(x, xi + gamma)
LatticeSymbol difference_by_formula(const LatticeSymbol& a, const Index& alpha, const Index& beta);

/// max over grid x cube of |Delta^alpha d_x^beta a| <xi>^{-(m - rho|alpha| + delta|beta|)}.
/// Handle symbols are sampled at the nodes of `grid` (x = 0 only if x independent).
double seminorm(const LatticeSymbol& a, const Index& alpha, const Index& beta, const SymbolClassSpec& spec,
                const FrequencyCube& cube, const TorusGrid& grid);

struct SeminormEntry {
  Index alpha;
  Index beta;
  double value;
};

struct SeminormTable {
  SymbolClassSpec spec;
  int cutoff = 0;
  int dim = 1;
  std::vector<SeminormEntry> entries;

  double max() const;
  const SeminormEntry* find(const Index& alpha, const Index& beta) const;
};

SeminormTable seminorm_table(const LatticeSymbol& a, const SymbolClassSpec& spec, const FrequencyCube& cube,
                             const TorusGrid& grid);

/// All multi-indices in dimension `dim` with |alpha| <= max_order, graded.
std::vector<Index> multi_indices(int dim, int max_order);

struct OrderFit {
  double order = 0.0;
  double residual = 0.0;
  int shells = 0;
};

/// Least-squares slope of log sup_shell sup_x |a| against log <xi*> over dyadic
/// Euclidean shells 2^j <= |xi| < 2^{j+1}, xi* the maximizing frequency.
OrderFit estimate_order_fit(const LatticeSymbol& a, const FrequencyCube& cube, const TorusGrid& grid);
double estimate_order(const LatticeSymbol& a, const FrequencyCube& cube, const TorusGrid& grid);

LatticeSymbol restrict_symbol(const ContinuumSymbol& a, const FrequencyCube& cube);

struct Extension {
  ContinuumSymbol symbol;
  int kernel_radius = 0;
  /// Measured truncation defects of the kernel; they bound the interior error of
  /// reproducing constants and linear functions.
  double partition_defect = 0.0;
  double moment_defect = 0.0;
};

/// Tensor-product cardinal interpolation of the lattice data. Indices outside the
/// box are clamped to its faces. Tables are interpolated in x by their
/// trigonometric interpolant.
Extension extend_symbol(const LatticeSymbol& a);

}  // namespace torusfio
