#pragma once

// Slow reference computations used to check the library. Nothing here calls the
// FFT paths or the operator kernels.

#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "torusfio/torus_fourier.hpp"

namespace oracle {

using torusfio::Complex;
using torusfio::Coord;
using torusfio::FrequencyCube;
using torusfio::Index;
using torusfio::TorusGrid;

inline constexpr double kPi = 3.14159265358979323846;

inline Complex expi(double theta) { return std::polar(1.0, 2.0 * kPi * theta); }

inline double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// f^(xi) = N^{-n} sum_k e^{-2 pi i x_k . xi} f(x_k)
inline std::vector<Complex> direct_dft(const std::vector<Complex>& f, const TorusGrid& g, const FrequencyCube& c) {
  std::vector<Complex> out(c.size());
  for (std::size_t m = 0; m < c.size(); ++m) {
    const Index xi = c.point(m);
    Complex s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Coord x = g.node(k);
      double t = 0.0;
      for (int j = 0; j < g.dim(); ++j) t += x[j] * xi[j];
      s += f[k] * expi(-t);
    }
    out[m] = s * g.weight();
  }
  return out;
}

// sum_xi e^{2 pi i phi(x, xi)} a(x, xi) fhat(xi) at one point
inline Complex direct_fso(const std::function<double(const Coord&, const Index&)>& phi,
                          const std::function<Complex(const Coord&, const Index&)>& a,
                          const std::vector<Complex>& fhat, const FrequencyCube& c, const Coord& x) {
  Complex s = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const Index xi = c.point(m);
    s += expi(phi(x, xi)) * a(x, xi) * fhat[m];
  }
  return s;
}

inline double grid_lp(const std::vector<Complex>& v, double w, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
  }
  double s = 0.0;
  for (const auto& z : v) s += std::pow(std::abs(z), p);
  return std::pow(s * w, 1.0 / p);
}

// band-limited random coefficients, plain std::mt19937_64 so the stream is not
// the library's
inline std::vector<Complex> random_coeffs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> d;
  std::vector<Complex> c(n);
  for (auto& z : c) z = {d(eng), d(eng)};
  return c;
}

inline double largest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

// eps^{1/2} int e^{2 pi i q x} e^{-pi eps s x^2} dx
inline double gaussian_moment(double eps, double s, double q) {
  return std::exp(-kPi * q * q / (eps * s)) / std::sqrt(s);
}

}  // namespace oracle
