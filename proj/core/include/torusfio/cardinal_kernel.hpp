#pragma once

#include <vector>

namespace torusfio {

/// Smooth cardinal kernel theta on R with theta(k) = delta_{k0} on the integers
/// and sum_k theta(u - k) = 1.
///
/// theta is the inverse Fourier transform of psi(eta) = S(1 - |eta|) on [-1, 1],
/// S(t) = f(t) / (f(t) + f(1 - t)), f(t) = e^{-1/t}. psi is C^infinity, flat at 0
/// and at +-1, and psi(eta) + psi(1 - eta) = 1 on [0, 1]. Poisson summation then
/// gives the partition of unity and exact reproduction of polynomials; the
/// trapezoid evaluation below keeps both identities to rounding because the
/// pairing i <-> M - i survives discretization.
///
/// theta decays faster than any power but is not compactly supported; sums are cut
/// at |u - k| <= radius. The truncation tail is measured at construction.
class CardinalKernel {
 public:
  explicit CardinalKernel(int radius = 64, int quadrature_nodes = 512);

  double operator()(double u) const;

  /// theta(u - k) for k = floor(u) - radius + j, j = 0..2*radius+1.
  void stencil(double u, int& first, std::vector<double>& weights) const;

  int radius() const { return radius_; }

  /// sup over sampled u in [0,1) of |1 - sum_{|u-k|<=R} theta(u-k)|.
  double partition_defect() const { return partition_defect_; }
  /// same for the first moment sum_k theta(u-k)(u-k), which is 0 untruncated.
  double moment_defect() const { return moment_defect_; }

  static double psi(double eta);

 private:
  int radius_;
  int m_;
  std::vector<double> psi_;  // psi(i/M), i = 0..M-1
  double partition_defect_ = 0.0;
  double moment_defect_ = 0.0;
};

const CardinalKernel& default_cardinal_kernel();

}  // namespace torusfio
