#include "torusfio/torus_fourier.hpp"

#include <algorithm>
#include <cmath>

#include "torusfio/error.hpp"

namespace torusfio {

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorKind::Dimension, "torus dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (points_per_axis < 4 || points_per_axis % 2 != 0)
    throw Error(ErrorKind::Dimension,
                "points per axis must be even and >= 4, got " + std::to_string(points_per_axis));
  size_ = 1;
  for (int j = 0; j < dim; ++j) size_ *= static_cast<std::size_t>(points_per_axis);
  weight_ = 1.0 / static_cast<double>(size_);
}

Index TorusGrid::node_index(std::size_t flat) const {
  Index k{0, 0, 0};
  for (int j = dim_ - 1; j >= 0; --j) {
    k[j] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return k;
}

std::size_t TorusGrid::flat(const Index& k) const {
  std::size_t f = 0;
  for (int j = 0; j < dim_; ++j) {
    int kj = ((k[j] % n_) + n_) % n_;
    f = f * n_ + static_cast<std::size_t>(kj);
  }
  return f;
}

Coord TorusGrid::node(std::size_t flat) const {
  Index k = node_index(flat);
  Coord x{0.0, 0.0, 0.0};
  for (int j = 0; j < dim_; ++j) x[j] = static_cast<double>(k[j]) / n_;
  return x;
}

FrequencyCube::FrequencyCube(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorKind::Dimension, "cube dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (cutoff < 1) throw Error(ErrorKind::Domain, "cube cutoff must be positive");
  size_ = 1;
  for (int j = 0; j < dim; ++j) size_ *= static_cast<std::size_t>(2 * cutoff + 1);
}

FrequencyCube FrequencyCube::for_grid(const TorusGrid& grid) {
  return FrequencyCube(grid.dim(), grid.points_per_axis() / 2 - 1);
}

Index FrequencyCube::point(std::size_t flat) const {
  Index xi{0, 0, 0};
  const std::size_t s = static_cast<std::size_t>(side());
  for (int j = dim_ - 1; j >= 0; --j) {
    xi[j] = static_cast<int>(flat % s) - cutoff_;
    flat /= s;
  }
  return xi;
}

std::size_t FrequencyCube::flat(const Index& xi) const {
  std::size_t f = 0;
  const std::size_t s = static_cast<std::size_t>(side());
  for (int j = 0; j < dim_; ++j) f = f * s + static_cast<std::size_t>(xi[j] + cutoff_);
  return f;
}

bool FrequencyCube::contains(const Index& xi) const {
  for (int j = 0; j < dim_; ++j)
    if (xi[j] < -cutoff_ || xi[j] > cutoff_) return false;
  for (int j = dim_; j < kMaxDim; ++j)
    if (xi[j] != 0) return false;
  return true;
}

bool FrequencyCube::fits(const TorusGrid& grid) const {
  return dim_ == grid.dim() && side() <= grid.points_per_axis();
}

PeriodicFunction PeriodicFunction::sample(const TorusGrid& g,
                                          const std::function<Complex(const Coord&)>& f) {
  PeriodicFunction out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.node(i));
  return out;
}

std::size_t dft_slot(const Index& xi, const TorusGrid& grid) { return grid.flat(xi); }

namespace {

void check_pairing(const FrequencyCube& cube, const TorusGrid& grid) {
  if (cube.dim() != grid.dim())
    throw Error(ErrorKind::Dimension,
                "cube dimension " + std::to_string(cube.dim()) + " vs grid dimension " +
                    std::to_string(grid.dim()),
                std::min(cube.dim(), grid.dim()));
  if (!cube.fits(grid))
    throw Error(ErrorKind::Aliasing,
                "cube side " + std::to_string(cube.side()) + " exceeds " +
                    std::to_string(grid.points_per_axis()) + " grid points",
                0);
}

}  // namespace

SpectralSequence forward_transform(const PeriodicFunction& f) {
  return forward_transform(f, FrequencyCube::for_grid(f.grid));
}

SpectralSequence forward_transform(const PeriodicFunction& f, const FrequencyCube& cube) {
  if (f.values.size() != f.grid.size())
    throw Error(ErrorKind::Dimension, "value array has " + std::to_string(f.values.size()) +
                                          " entries for a grid of " + std::to_string(f.grid.size()));
  check_pairing(cube, f.grid);
  std::vector<Complex> buf = f.values;
  grid_dft(buf, f.grid.dim(), f.grid.points_per_axis(), -1);
  SpectralSequence s(cube);
  const double w = f.grid.weight();
  for (std::size_t i = 0; i < cube.size(); ++i) s.coeffs[i] = w * buf[dft_slot(cube.point(i), f.grid)];
  return s;
}

PeriodicFunction inverse_transform(const SpectralSequence& s, const TorusGrid& grid) {
  check_pairing(s.cube, grid);
  if (s.coeffs.size() != s.cube.size())
    throw Error(ErrorKind::Dimension, "coefficient array does not match the cube");
  PeriodicFunction f(grid);
  for (std::size_t i = 0; i < s.cube.size(); ++i) f.values[dft_slot(s.cube.point(i), grid)] += s.coeffs[i];
  grid_dft(f.values, grid.dim(), grid.points_per_axis(), +1);
  f.spectrum = s;
  return f;
}

Complex evaluate_spectrum(const SpectralSequence& s, const Coord& x) {
  Complex acc(0.0);
  for (std::size_t i = 0; i < s.cube.size(); ++i) {
    if (s.coeffs[i] == Complex(0.0)) continue;
    acc += s.coeffs[i] * unimodular(dot(x, s.cube.point(i), s.cube.dim()));
  }
  return acc;
}

double lp_norm(const std::vector<Complex>& values, const TorusGrid& grid, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::Domain, "lp_norm needs p >= 1");
  if (values.size() != grid.size()) throw Error(ErrorKind::Dimension, "value array does not match grid");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  // Scale by the max first so large p does not overflow.
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& v : values) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s * grid.weight(), 1.0 / p);
}

double lp_norm(const PeriodicFunction& f, double p) { return lp_norm(f.values, f.grid, p); }

double schwartz_decay(const SpectralSequence& s, double M) {
  double c = 0.0;
  for (std::size_t i = 0; i < s.cube.size(); ++i)
    c = std::max(c, std::abs(s.coeffs[i]) * std::pow(bracket(s.cube.point(i), s.cube.dim()), M));
  return c;
}

std::vector<double> LineQuadrature::points() const {
  std::vector<double> x(static_cast<std::size_t>(nodes));
  const double h = 2.0 * half_width / (nodes - 1);
  for (int i = 0; i < nodes; ++i) x[i] = center - half_width + i * h;
  return x;
}

std::vector<double> LineQuadrature::weights() const {
  std::vector<double> w(static_cast<std::size_t>(nodes), 2.0 * half_width / (nodes - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

Complex line_quadrature(const std::function<Complex(double)>& g, double half_width, int nodes) {
  if (!(half_width > 0.0)) throw Error(ErrorKind::Domain, "half width must be positive");
  if (nodes < 64) throw Error(ErrorKind::Domain, "line quadrature needs at least 64 nodes");
  LineQuadrature q{0.0, half_width, nodes};
  const auto x = q.points();
  const auto w = q.weights();
  Complex acc(0.0);
  for (int i = 0; i < nodes; ++i) {
    Complex v = g(x[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::Numeric, "non-finite integrand at x=" + std::to_string(x[i]));
    acc += w[i] * v;
  }
  return acc;
}

}  // namespace torusfio
