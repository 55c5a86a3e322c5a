#include <algorithm>
#include <cmath>

#include "torusfio/boundedness_lab.hpp"
#include "torusfio/error.hpp"

namespace torusfio {

namespace {

constexpr double kTailLimit = 1e-8;
constexpr double kMaxNodes = 5e7;

void check_eps(const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorKind::Domain, "empty eps sequence");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw Error(ErrorKind::Domain, "eps values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw Error(ErrorKind::Domain, "eps sequence must be strictly decreasing");
  }
}

int node_count(double half_width, double step) {
  const double q = std::ceil(2.0 * half_width / step);
  if (q > kMaxNodes) throw Error(ErrorKind::Resource, "quadrature would need " + std::to_string(q) + " nodes");
  // odd, so the rule is symmetric about its center with a node there
  int nodes = static_cast<int>(q) + 1;
  if (nodes % 2 == 0) ++nodes;
  return std::max(nodes, 65);
}

// sqrt(eps) * int_{|x| <= L} e^{-pi eps x^2} cos(2 pi eta x) dx for eta = 0..cutoff,
// by the trapezoid rule on symmetric nodes (the sine part cancels exactly).
std::vector<double> gaussian_moments(double eps, int cutoff, double window_factor) {
  const double L = window_factor / std::sqrt(eps);
  const double h = 1.0 / (2.0 * (cutoff + 2));
  const LineQuadrature rule{0.0, L, node_count(L, h)};
  const auto x = rule.points();
  const auto w = rule.weights();
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = w[i] * std::exp(-kPi * eps * x[i] * x[i]);
  std::vector<double> out(static_cast<std::size_t>(cutoff) + 1, 0.0);
  const std::size_t mid = x.size() / 2;
  for (int eta = 0; eta <= cutoff; ++eta) {
    // pair nodes symmetric about zero before summing
    double s = g[mid];
    for (std::size_t i = 1; i <= mid; ++i) {
      const double c = eta == 0 ? 1.0 : std::cos(kTwoPi * eta * std::fmod(x[mid + i], 1.0));
      s += (g[mid + i] + g[mid - i]) * c;
    }
    out[static_cast<std::size_t>(eta)] = std::sqrt(eps) * s;
  }
  return out;
}

void check_tail(double window_factor, int dim) {
  // fraction of Gaussian mass outside |x_j| <= window_factor / sqrt(eps) on some axis
  const double axis = std::erfc(std::sqrt(kPi) * window_factor);
  const double tail = 1.0 - std::pow(1.0 - axis, dim);
  if (tail > kTailLimit)
    throw Error(ErrorKind::Accuracy, "quadrature window too small: tail mass " + std::to_string(tail));
}

Complex gaussian_term(const PeriodicFunction& f, double eps, double window_factor) {
  const SpectralSequence s = f.spectrum ? *f.spectrum : forward_transform(f);
  const int n = s.cube.dim();
  check_tail(window_factor, n);
  const auto mom = gaussian_moments(eps, s.cube.cutoff(), window_factor);
  Complex acc(0.0);
  for (std::size_t i = 0; i < s.cube.size(); ++i) {
    if (s.coeffs[i] == Complex(0.0)) continue;
    const Index eta = s.cube.point(i);
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= mom[static_cast<std::size_t>(std::abs(eta[j]))];
    acc += w * s.coeffs[i];
  }
  return acc;
}

}  // namespace

std::vector<Complex> gaussian_limit(const PeriodicFunction& f, const std::vector<double>& eps, double window_factor) {
  check_eps(eps);
  std::vector<Complex> out;
  out.reserve(eps.size());
  for (double e : eps) out.push_back(gaussian_term(f, e, window_factor));
  return out;
}

std::vector<Complex> gaussian_limit_sequence(const std::function<PeriodicFunction(std::size_t)>& f,
                                             const std::vector<double>& eps, double window_factor) {
  check_eps(eps);
  std::vector<Complex> out;
  out.reserve(eps.size());
  for (std::size_t m = 0; m < eps.size(); ++m) out.push_back(gaussian_term(f(m), eps[m], window_factor));
  return out;
}

// ------------------------------------------------------------ pairing

void GaussianPairingConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorKind::Domain, "Holder split needs alpha, beta > 0");
  if (alpha + beta != 1.0) throw Error(ErrorKind::Domain, "Holder split needs alpha + beta = 1");
  check_eps(eps);
  check_tail(window_factor, 1);
}

std::vector<Complex> gaussian_pairing(const EuclideanFio& T, const GaussianPairingConfig& cfg) {
  cfg.validate();
  const double wf = cfg.window_factor;
  std::vector<Complex> out;
  for (double eps : cfg.eps) {
    const double a = eps * cfg.alpha;
    const double b = eps * cfg.beta;
    // input Gaussian width, its spectrum around m, and the output window
    const double Ly = wf / std::sqrt(a);
    const double Lxi = wf * std::sqrt(a);
    const double Lx = wf / std::sqrt(b);

    EuclideanFio op = T;
    op.y_quad = {0.0, Ly, node_count(Ly, 1.0 / (4.0 * Lxi + 4.0))};
    op.xi_quad = {static_cast<double>(cfg.m), Lxi, node_count(Lxi, 1.0 / (1.5 * (Lx + Ly) + 10.0))};
    const LineQuadrature xr{0.0, Lx, node_count(Lx, 1.0 / (std::abs(cfg.m - cfg.k) + 4.0 * Lxi + 4.0))};
    const auto x = xr.points();
    const auto wx = xr.weights();

    const int m = cfg.m;
    auto f = [m, a](double y) { return unimodular(m * y) * std::exp(-kPi * a * y * y); };
    const EuclideanResult r = apply_euclidean_fio(op, f, x, true);
    Complex acc(0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      acc += wx[i] * r.values[i] * unimodular(-cfg.k * x[i]) * std::exp(-kPi * b * x[i] * x[i]);
    out.push_back(std::sqrt(eps) * acc);
  }
  return out;
}

Complex pairing_target(const FsoOperator& A, const GaussianPairingConfig& cfg) {
  cfg.validate();
  if (A.grid.dim() != 1) throw Error(ErrorKind::Dimension, "the pairing is one-dimensional");
  if (!A.cube.contains({cfg.m, 0, 0}) || !A.cube.contains({cfg.k, 0, 0}))
    throw Error(ErrorKind::Domain, "pairing frequencies must lie in the cube");
  const int m = cfg.m;
  const int k = cfg.k;
  const auto P = PeriodicFunction::sample(A.grid, [m](const Coord& x) { return unimodular(m * x[0]); });
  const auto Q = PeriodicFunction::sample(A.grid, [k](const Coord& x) { return unimodular(k * x[0]); });
  const PeriodicFunction AP = apply_fso(A, P);
  return inner_product(AP.values, Q.values, A.grid) / std::sqrt(cfg.beta);
}

// ------------------------------------------------------------ transference

Record TransferenceRecord::record() const {
  Record r("torusfio/transference/1");
  r.set("p", p).set("euclid_norm_lb", euclid_norm_lb).set("torus_norm_lb", torus_norm_lb).set("ratio", ratio);
  r.set("torus_exact", torus_exact).set("delta", delta).set("probes", probes).set("seed", seed);
  return r;
}

namespace {

double line_lp(const Eigen::VectorXcd& v, const std::vector<double>& w, double p) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i)));
  if (std::isinf(p) || m == 0.0) return m;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += w[static_cast<std::size_t>(i)] * std::pow(std::abs(v(i)) / m, p);
  return m * std::pow(s, 1.0 / p);
}

}  // namespace

TransferenceRecord transference_check(const PhaseFunction& phi, const ContinuumSymbol& a, double p,
                                      const TorusGrid& grid, const FrequencyCube& cube,
                                      const TransferenceOptions& opts) {
  if (grid.dim() != 1 || phi.dim != 1 || a.dim != 1)
    throw Error(ErrorKind::Dimension, "transference runs in one dimension");
  if (!(opts.delta > 0.0 && opts.delta < 1.0)) throw Error(ErrorKind::Domain, "window width must lie in (0, 1)");

  TransferenceRecord rec;
  rec.p = p;
  rec.delta = opts.delta;
  rec.probes = opts.probes;
  rec.seed = opts.seed;

  const auto A = FsoOperator::create(phi, restrict_symbol(a, cube), grid, cube);
  ProbeOptions po;
  po.probes = opts.probes;
  po.seed = opts.seed;
  po.steps = opts.steps;
  po.keep_iterates = true;
  const NormEstimate torus = norm_lp_probe(A, p, po);
  rec.torus_norm_lb = torus.value;
  if (p == 2.0 && grid.size() <= kMaxDenseNodes) rec.torus_exact = norm_p2_exact(assemble_matrix(A)).value;

  // w_delta drops below e^{-40} outside |x| <= L; the output window gets a
  // margin for phases that move mass
  const double delta = opts.delta;
  const double L = std::sqrt(40.0 / (kPi * delta)) + 2.0;
  const int Xi = cube.cutoff();
  const double pp = std::isinf(p) ? 4.0 : std::max(std::ceil(p), 2.0);
  const double hy = 1.0 / (pp * (Xi + 2));
  const double spread = std::sqrt(40.0 * delta / kPi) + 0.25;

  EuclideanFio T;
  T.phase = [phi](double x, double xi) { return phi.value({x, 0, 0}, {xi, 0, 0}); };
  T.symbol = [a](double x, double xi) { return a.eval({x, 0, 0}, {xi, 0, 0}); };
  T.symbol_x_independent = a.x_independent;
  T.y_quad = {0.0, L, node_count(L, hy)};
  T.xi_quad = {0.0, Xi + spread, node_count(Xi + spread, 1.0 / (2.5 * L + 4.0))};
  const EuclideanPlan plan(T, T.y_quad.points());
  const auto& y = plan.y();
  const auto wy = T.y_quad.weights();

  const auto my = static_cast<Eigen::Index>(y.size());
  const auto np = static_cast<Eigen::Index>(torus.iterates.size());
  Eigen::MatrixXcd G(my, np);
  for (Eigen::Index c = 0; c < np; ++c) {
    PeriodicFunction P(grid);
    P.values = torus.iterates[static_cast<std::size_t>(c)];
    if (P.values.empty()) P.values.assign(grid.size(), Complex(0.0));
    const SpectralSequence s = forward_transform(P, cube);
    for (Eigen::Index i = 0; i < my; ++i)
      G(i, c) = evaluate_spectrum(s, {y[static_cast<std::size_t>(i)], 0, 0}) *
                std::exp(-kPi * delta * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)]);
  }
  const Eigen::MatrixXcd TG = plan.apply(G);
  if (!TG.allFinite()) throw Error(ErrorKind::Numeric, "non-finite euclidean probe output");
  double best = 0.0;
  for (Eigen::Index c = 0; c < np; ++c) {
    const double den = line_lp(G.col(c), wy, p);
    if (den == 0.0) continue;
    best = std::max(best, line_lp(TG.col(c), wy, p) / den);
  }
  rec.euclid_norm_lb = best;
  rec.ratio = best > 0.0 ? rec.torus_norm_lb / best : kNaN;
  return rec;
}

}  // namespace torusfio
