#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "torusfio/types.hpp"

namespace torusfio {

/// Uniform grid x_k = k/N on the n-torus, n in {1,2,3}, N even and >= 4.
/// Nodes are stored row-major with the last axis fastest.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return size_; }
  double weight() const { return weight_; }

  Index node_index(std::size_t flat) const;
  std::size_t flat(const Index& k) const;
  Coord node(std::size_t flat) const;

  bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int dim_ = 1;
  int n_ = 4;
  std::size_t size_ = 4;
  double weight_ = 0.25;
};

/// Lattice points of Z^n with every component in [-cutoff, cutoff].
class FrequencyCube {
 public:
  FrequencyCube() = default;
  FrequencyCube(int dim, int cutoff);

  /// The alias-free default cube for a grid: cutoff N/2 - 1.
  static FrequencyCube for_grid(const TorusGrid& grid);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  int side() const { return 2 * cutoff_ + 1; }
  std::size_t size() const { return size_; }

  Index point(std::size_t flat) const;
  std::size_t flat(const Index& xi) const;
  bool contains(const Index& xi) const;

  bool fits(const TorusGrid& grid) const;

  bool operator==(const FrequencyCube& o) const { return dim_ == o.dim_ && cutoff_ == o.cutoff_; }
  bool operator!=(const FrequencyCube& o) const { return !(*this == o); }

 private:
  int dim_ = 1;
  int cutoff_ = 1;
  std::size_t size_ = 3;
};

struct SpectralSequence {
  FrequencyCube cube;
  std::vector<Complex> coeffs;

  SpectralSequence() = default;
  explicit SpectralSequence(const FrequencyCube& c) : cube(c), coeffs(c.size(), Complex(0.0)) {}

  Complex& at(const Index& xi) { return coeffs[cube.flat(xi)]; }
  const Complex& at(const Index& xi) const { return coeffs[cube.flat(xi)]; }
};

struct PeriodicFunction {
  TorusGrid grid;
  std::vector<Complex> values;
  std::optional<SpectralSequence> spectrum;

  PeriodicFunction() = default;
  explicit PeriodicFunction(const TorusGrid& g) : grid(g), values(g.size(), Complex(0.0)) {}

  static PeriodicFunction sample(const TorusGrid& g, const std::function<Complex(const Coord&)>& f);
};

/// f^(xi) = N^{-n} sum_k e^{-2 pi i x_k.xi} f(x_k) on the given cube (default:
/// the alias-free cube of the grid).
SpectralSequence forward_transform(const PeriodicFunction& f);
SpectralSequence forward_transform(const PeriodicFunction& f, const FrequencyCube& cube);

/// f(x_k) = sum_xi e^{2 pi i x_k.xi} f^(xi). The returned function carries the
/// input spectrum.
PeriodicFunction inverse_transform(const SpectralSequence& s, const TorusGrid& grid);

/// Trigonometric polynomial value at an arbitrary point (direct sum).
Complex evaluate_spectrum(const SpectralSequence& s, const Coord& x);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double lp_norm(const PeriodicFunction& f, double p);
double lp_norm(const std::vector<Complex>& values, const TorusGrid& grid, double p);

/// max_xi |q(xi)| <xi>^M over the cube.
double schwartz_decay(const SpectralSequence& s, double M);

/// Trapezoid rule for the integral of g over [-L, L] with Q equispaced nodes.
Complex line_quadrature(const std::function<Complex(double)>& g, double half_width, int nodes);

/// Nodes and weights of the same rule, for batched use.
struct LineQuadrature {
  double center = 0.0;
  double half_width = 8.0;
  int nodes = 2048;

  std::vector<double> points() const;
  std::vector<double> weights() const;
};

/// Unnormalized in-place n-dimensional DFT on an N^n row-major array, sign -1 for
/// the forward kernel e^{-2 pi i k.j/N}. Thread safe.
void grid_dft(std::vector<Complex>& data, int dim, int points_per_axis, int sign);

/// Index of the DFT slot holding lattice frequency xi.
std::size_t dft_slot(const Index& xi, const TorusGrid& grid);

void set_threads(int threads);

/// Version string of the FFT backend.
std::string fft_backend_version();

}  // namespace torusfio
