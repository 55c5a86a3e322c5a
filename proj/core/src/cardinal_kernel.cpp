#include "torusfio/cardinal_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "torusfio/error.hpp"
#include "torusfio/types.hpp"

namespace torusfio {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t);
  const double b = bump(1.0 - t);
  return a / (a + b);
}

}  // namespace

double CardinalKernel::psi(double eta) {
  const double e = std::abs(eta);
  if (e >= 1.0) return 0.0;
  return smooth_step(1.0 - e);
}

CardinalKernel::CardinalKernel(int radius, int quadrature_nodes) : radius_(radius), m_(quadrature_nodes) {
  if (radius < 4) throw Error(ErrorKind::Domain, "cardinal kernel radius must be >= 4");
  if (quadrature_nodes < 4 * radius || quadrature_nodes % 2)
    throw Error(ErrorKind::Domain, "cardinal kernel needs an even node count >= 4*radius");
  psi_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) psi_[i] = psi(static_cast<double>(i) / m_);

  std::vector<double> w;
  int first = 0;
  for (int s = 0; s < 256; ++s) {
    const double u = s / 256.0;
    stencil(u, first, w);
    double sum = 0.0, mom = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      sum += w[j];
      mom += w[j] * (u - (first + static_cast<int>(j)));
    }
    partition_defect_ = std::max(partition_defect_, std::abs(1.0 - sum));
    moment_defect_ = std::max(moment_defect_, std::abs(mom));
  }
}

double CardinalKernel::operator()(double u) const {
  // theta(u) = h [psi(0) + 2 sum_{i=1}^{M-1} psi(ih) cos(2 pi i h u)], h = 1/M
  const double h = 1.0 / m_;
  const double frac = u * h - std::floor(u * h);
  const std::complex<double> step = std::polar(1.0, kTwoPi * frac);
  std::complex<double> rot = step;
  double acc = 0.0;
  for (int i = 1; i < m_; ++i) {
    if (psi_[i] != 0.0) acc += psi_[i] * rot.real();
    rot *= step;
    if ((i & 63) == 63) rot = std::polar(1.0, kTwoPi * std::fmod(frac * (i + 1), 1.0));
  }
  return h * (psi_[0] + 2.0 * acc);
}

void CardinalKernel::stencil(double u, int& first, std::vector<double>& weights) const {
  const int base = static_cast<int>(std::floor(u));
  first = base - radius_;
  const int count = 2 * radius_ + 2;
  weights.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const int k = first + j;
    const double d = u - k;
    if (std::abs(d) > radius_ + 1e-12) {
      weights[j] = 0.0;
      continue;
    }
    // Exact zeros and one on the lattice.
    weights[j] = (d == 0.0) ? 1.0 : (d == std::round(d) ? 0.0 : (*this)(d));
  }
}

const CardinalKernel& default_cardinal_kernel() {
  static const CardinalKernel k;
  return k;
}

}  // namespace torusfio
