#include <algorithm>
#include <cmath>

#include "torusfio/error.hpp"
#include "torusfio/operator_engine.hpp"

namespace torusfio {

std::vector<Complex> apply_euclidean_fio_samples(const EuclideanFio& T, const std::vector<Complex>& f_at_y,
                                                 const std::vector<double>& x_out) {
  if (!T.phase || !T.symbol) throw Error(ErrorKind::Domain, "euclidean FIO needs a phase and a symbol");
  const auto y = T.y_quad.points();
  const auto wy = T.y_quad.weights();
  const auto xi = T.xi_quad.points();
  const auto wxi = T.xi_quad.weights();
  if (f_at_y.size() != y.size()) throw Error(ErrorKind::Dimension, "samples do not match the y-quadrature");

  // (F f)(xi_m) = sum_i w_i e^{-2 pi i y_i xi_m} f(y_i)
  const std::ptrdiff_t mx = static_cast<std::ptrdiff_t>(xi.size());
  std::vector<Complex> fhat(xi.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < mx; ++m) {
    Complex acc(0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (f_at_y[i] == Complex(0.0)) continue;
      acc += wy[i] * unimodular(-y[i] * xi[m]) * f_at_y[i];
    }
    fhat[m] = acc;
  }

  std::vector<Complex> sym;
  if (T.symbol_x_independent) {
    sym.resize(xi.size());
    for (std::size_t m = 0; m < xi.size(); ++m) sym[m] = wxi[m] * T.symbol(0.0, xi[m]) * fhat[m];
  }
  const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x_out.size());
  std::vector<Complex> out(x_out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nx; ++k) {
    const double x = x_out[k];
    Complex acc(0.0);
    for (std::size_t m = 0; m < xi.size(); ++m) {
      const Complex w = T.symbol_x_independent ? sym[m] : wxi[m] * T.symbol(x, xi[m]) * fhat[m];
      if (w == Complex(0.0)) continue;
      acc += unimodular(T.phase(x, xi[m])) * w;
    }
    out[k] = acc;
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    if (!std::isfinite(out[k].real()) || !std::isfinite(out[k].imag()))
      throw Error(ErrorKind::Numeric, "non-finite euclidean FIO output at x=" + std::to_string(x_out[k]));
  return out;
}

EuclideanResult apply_euclidean_fio(const EuclideanFio& T, const std::function<Complex(double)>& f,
                                    const std::vector<double>& x_out, bool check_refinement) {
  auto run = [&](const EuclideanFio& op) {
    const auto y = op.y_quad.points();
    std::vector<Complex> fy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) fy[i] = f(y[i]);
    return apply_euclidean_fio_samples(op, fy, x_out);
  };
  EuclideanResult r;
  r.x = x_out;
  r.values = run(T);
  if (!check_refinement) return r;

  EuclideanFio fine = T;
  fine.y_quad.nodes = 2 * T.y_quad.nodes - 1;
  fine.xi_quad.nodes = 2 * T.xi_quad.nodes - 1;
  const auto v2 = run(fine);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < v2.size(); ++k) {
    diff = std::max(diff, std::abs(v2[k] - r.values[k]));
    scale = std::max(scale, std::abs(v2[k]));
  }
  r.refinement_change = scale > 0.0 ? diff / scale : diff;
  if (r.refinement_change > 1e-4)
    throw Error(ErrorKind::Accuracy,
                "euclidean quadrature unstable under refinement (change " + std::to_string(r.refinement_change) + ")");
  return r;
}

EuclideanPlan::EuclideanPlan(const EuclideanFio& T, const std::vector<double>& x_out)
    : y_(T.y_quad.points()), x_(x_out) {
  if (!T.phase || !T.symbol) throw Error(ErrorKind::Domain, "euclidean FIO needs a phase and a symbol");
  const auto wy = T.y_quad.weights();
  const auto xi = T.xi_quad.points();
  const auto wxi = T.xi_quad.weights();
  const auto my = static_cast<Eigen::Index>(y_.size());
  const auto mx = static_cast<Eigen::Index>(xi.size());
  const auto nx = static_cast<Eigen::Index>(x_.size());
  forward_.resize(mx, my);
  synthesis_.resize(nx, mx);
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < mx; ++m)
    for (Eigen::Index i = 0; i < my; ++i) forward_(m, i) = wy[i] * unimodular(-y_[i] * xi[m]);
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < nx; ++k)
    for (Eigen::Index m = 0; m < mx; ++m)
      synthesis_(k, m) = wxi[m] * unimodular(T.phase(x_[k], xi[m])) * T.symbol(x_[k], xi[m]);
  if (!synthesis_.allFinite()) throw Error(ErrorKind::Numeric, "non-finite euclidean FIO kernel");
}

Eigen::MatrixXcd EuclideanPlan::apply(const Eigen::MatrixXcd& f_at_y) const {
  if (f_at_y.rows() != forward_.cols())
    throw Error(ErrorKind::Dimension, "inputs do not match the y-quadrature of the plan");
  Eigen::MatrixXcd spec = forward_ * f_at_y;
  return synthesis_ * spec;
}

}  // namespace torusfio
