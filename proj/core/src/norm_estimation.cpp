#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include <Eigen/SVD>

#include "torusfio/boundedness_lab.hpp"
#include "torusfio/error.hpp"
#include "torusfio/random.hpp"

namespace torusfio {

OrderThresholds thresholds(int dim, double p, double rho) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::Dimension, "dimension must be 1, 2 or 3");
  if (!(p > 1.0) || std::isinf(p)) throw Error(ErrorKind::Domain, "thresholds need 1 < p < inf");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::Domain, "rho must lie in [0, 1]");
  OrderThresholds t;
  t.dim = dim;
  t.p = p;
  t.p_conjugate = p / (p - 1.0);
  t.rho = rho;
  // snapped to multiples of 2^-40 so that p and p/(p-1) give identical values
  const double gap = std::ldexp(std::nearbyint(std::ldexp(std::abs(1.0 / p - 0.5), 40)), -40);
  t.kappa_p = -(dim - 1) * gap;
  t.m_p = -dim * (1.0 - rho) * gap;
  // keep the sign of zero out of the output
  if (t.kappa_p == 0.0) t.kappa_p = 0.0;
  if (t.m_p == 0.0) t.m_p = 0.0;
  return t;
}

std::string NormEstimate::method_name() const {
  return method == Method::ExactSvdP2 ? "exact-svd-p2" : "probe-lower-bound";
}

std::string NormEstimate::direction_name() const { return direction == Direction::Exact ? "exact" : "lower-bound"; }

Record NormEstimate::record() const {
  Record r("torusfio/norm-estimate/1");
  r.set("p", p).set("value", value).set("method", method_name()).set("direction", direction_name());
  r.set("probes", probes).set("seed", seed).set("steps", steps);
  return r;
}

NormEstimate norm_p2_exact(const DenseOperator& m) {
  if (!m.matrix.allFinite()) throw Error(ErrorKind::Numeric, "dense operator has non-finite entries");
  NormEstimate e;
  e.p = 2.0;
  e.method = NormEstimate::Method::ExactSvdP2;
  e.direction = NormEstimate::Direction::Exact;
  if (m.matrix.size() == 0) return e;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m.matrix);
  e.value = svd.singularValues()(0);
  return e;
}

namespace {

using Map = std::function<std::vector<Complex>(const std::vector<Complex>&)>;

std::vector<Complex> band_limit(const std::vector<Complex>& v, const TorusGrid& grid, const FrequencyCube& cube) {
  PeriodicFunction f(grid);
  f.values = v;
  return inverse_transform(forward_transform(f, cube), grid).values;
}

// J_p(y) = |y|^{p-1} sign(y) up to a positive factor; p = inf gives the signed
// delta at the first maximizer.
std::vector<Complex> dual_map(const std::vector<Complex>& y, double p) {
  std::vector<Complex> z(y.size(), Complex(0.0));
  double m = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::abs(y[i]) > m) {
      m = std::abs(y[i]);
      arg = i;
    }
  if (m == 0.0) return z;
  if (std::isinf(p)) {
    z[arg] = y[arg] / m;
    return z;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a == 0.0) continue;
    z[i] = (y[i] / a) * std::pow(a / m, p - 1.0);
  }
  return z;
}

double conjugate(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInfinity;
  return p / (p - 1.0);
}

std::vector<Complex> initial_probe(const TorusGrid& grid, const FrequencyCube& cube, std::uint64_t seed,
                                   std::size_t index, double keep_fraction) {
  Stream s(seed, index);
  SpectralSequence c(cube);
  for (auto& v : c.coeffs) v = s.complex_normal();
  const std::size_t keep =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(cube.size()))));
  std::vector<std::size_t> order(cube.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(c.coeffs[a]) > std::abs(c.coeffs[b]); });
  for (std::size_t r = keep; r < order.size(); ++r) c.coeffs[order[r]] = Complex(0.0);
  return inverse_transform(c, grid).values;
}

NormEstimate probe_ascent(const Map& apply, const Map& adjoint, const TorusGrid& grid, const FrequencyCube& cube,
                          double p, const ProbeOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::Domain, "norm estimation needs p >= 1");
  if (opts.probes < 32) throw Error(ErrorKind::Domain, "probe budget must be at least 32");
  if (opts.steps < 0) throw Error(ErrorKind::Domain, "ascent steps must be nonnegative");
  if (!(opts.keep_fraction > 0.0 && opts.keep_fraction <= 1.0))
    throw Error(ErrorKind::Domain, "keep fraction must lie in (0, 1]");
  if (!cube.fits(grid)) throw Error(ErrorKind::Aliasing, "probe cube does not fit the grid");

  const double q = conjugate(p);
  const int n = opts.probes;
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  std::vector<std::vector<Complex>> best_input(opts.keep_iterates ? static_cast<std::size_t>(n) : 0);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      std::vector<Complex> f = initial_probe(grid, cube, opts.seed, static_cast<std::size_t>(i), opts.keep_fraction);
      double top = 0.0;
      std::vector<Complex> arg;
      for (int step = 0; step <= opts.steps; ++step) {
        const double nf = lp_norm(f, grid, p);
        if (nf == 0.0) break;
        const auto y = apply(f);
        const double r = lp_norm(y, grid, p) / nf;
        if (!std::isfinite(r)) throw Error(ErrorKind::Numeric, "non-finite probe ratio");
        if (r > top) {
          top = r;
          if (opts.keep_iterates) arg = f;
        }
        if (step == opts.steps) break;
        f = band_limit(dual_map(adjoint(dual_map(y, p)), q), grid, cube);
      }
      best[static_cast<std::size_t>(i)] = top;
      if (opts.keep_iterates) best_input[static_cast<std::size_t>(i)] = std::move(arg);
    } catch (...) {
#pragma omp critical(probe_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  NormEstimate e;
  e.p = p;
  e.method = NormEstimate::Method::ProbeLowerBound;
  e.direction = NormEstimate::Direction::LowerBound;
  e.probes = n;
  e.seed = opts.seed;
  e.steps = opts.steps;
  e.value = *std::max_element(best.begin(), best.end());
  e.probe_values = std::move(best);
  e.iterates = std::move(best_input);
  return e;
}

}  // namespace

NormEstimate norm_lp_probe(const FsoOperator& A, double p, const ProbeOptions& opts) {
  const FsoKernel& k = A.kernel();
  return probe_ascent([&](const std::vector<Complex>& f) { return k.apply(f); },
                      [&](const std::vector<Complex>& g) { return k.apply_adjoint(g); }, A.grid, A.cube, p, opts);
}

NormEstimate norm_lp_probe(const FsoOperator& A, double p, int probes, std::uint64_t seed) {
  ProbeOptions o;
  o.probes = probes;
  o.seed = seed;
  return norm_lp_probe(A, p, o);
}

NormEstimate norm_lp_probe(const DenseOperator& m, const FrequencyCube& cube, double p, const ProbeOptions& opts) {
  // adjoint in the weighted inner product: both sides carry N^{-n}, so it is M^H
  const Eigen::MatrixXcd mh = m.matrix.adjoint();
  auto mul = [](const Eigen::MatrixXcd& a, const std::vector<Complex>& f) {
    Eigen::Map<const Eigen::VectorXcd> v(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXcd r = a * v;
    return std::vector<Complex>(r.data(), r.data() + r.size());
  };
  if (static_cast<std::size_t>(m.matrix.cols()) != m.grid.size())
    throw Error(ErrorKind::Dimension, "dense operator does not match its grid");
  return probe_ascent([&](const std::vector<Complex>& f) { return mul(m.matrix, f); },
                      [&](const std::vector<Complex>& g) { return mul(mh, g); }, m.grid, cube, p, opts);
}

// ------------------------------------------------------------ frozen symbols

Record FrozenBound::record() const {
  Record r("torusfio/frozen-bound/1");
  r.set("p", p).set("measured_norm", measured_norm).set("measured_method", measured_method);
  r.set("sobolev_bound", sobolev_bound).set("slack", slack).set("max_order", max_order);
  std::vector<double> sups;
  for (const auto& t : terms) sups.push_back(t.sup_norm);
  r.set("term_sup_norms", sups);
  return r;
}

namespace {

double operator_norm(const FsoOperator& A, double p, const ProbeOptions& opts, std::string* method) {
  if (p == 2.0 && A.grid.size() <= kMaxDenseNodes) {
    if (method) *method = "exact-svd-p2";
    return norm_p2_exact(assemble_matrix(A)).value;
  }
  if (method) *method = "probe-lower-bound";
  return norm_lp_probe(A, p, opts).value;
}

}  // namespace

FrozenBound frozen_family_bound(const FsoOperator& A, double p, const ProbeOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::Domain, "frozen bound needs p >= 1");
  const int n = A.grid.dim();
  const int order = (std::isinf(p) ? 0 : static_cast<int>(std::floor(n / p))) + 1;
  if (order > kMaxDifferenceOrder)
    throw Error(ErrorKind::Domain, "derivative order " + std::to_string(order) + " exceeds the supported ceiling");

  FrozenBound b;
  b.p = p;
  b.max_order = order;
  b.measured_norm = operator_norm(A, p, opts, &b.measured_method);

  const auto betas = multi_indices(n, order);
  for (const Index& beta : betas) {
    const LatticeSymbol d = x_derivative(A.symbol, beta);
    FrozenTerm term;
    term.beta = beta;
    // x-independent symbols have no z-dependence: one frozen operator suffices
    const std::size_t nodes = A.symbol.x_independent() ? 1 : A.grid.size();
    for (std::size_t z = 0; z < nodes; ++z) {
      auto vals = std::make_shared<std::vector<Complex>>(A.cube.size());
      for (std::size_t i = 0; i < A.cube.size(); ++i) {
        const Index xi = A.cube.point(i);
        (*vals)[i] = d.defined_at(xi) ? d.at_node(A.grid, z, xi) : Complex(0.0);
      }
      const FrequencyCube cube = A.cube;
      LatticeSymbol::HandleSpec spec;
      spec.name = A.symbol.name() + "/frozen";
      spec.dim = n;
      spec.order = A.symbol.order();
      spec.x_independent = true;
      spec.eval = [vals, cube](const Coord&, const Index& xi) {
        return cube.contains(xi) ? (*vals)[cube.flat(xi)] : Complex(0.0);
      };
      spec.deriv = [vals, cube, n](const Coord&, const Index& xi, const Index& b) {
        if (total_order(b, n) > 0) return Complex(0.0);
        return cube.contains(xi) ? (*vals)[cube.flat(xi)] : Complex(0.0);
      };
      const auto frozen = FsoOperator::create(A.phase, LatticeSymbol::handle(std::move(spec)), A.grid, A.cube,
                                              A.periodicity_waived);
      const double v = operator_norm(frozen, p, opts, nullptr);
      if (v > term.sup_norm) {
        term.sup_norm = v;
        term.argmax = A.grid.node(z);
      }
    }
    b.terms.push_back(term);
  }
  if (std::isinf(p)) {
    for (const auto& t : b.terms) b.sobolev_bound = std::max(b.sobolev_bound, t.sup_norm);
  } else {
    double s = 0.0;
    for (const auto& t : b.terms) s += std::pow(t.sup_norm, p);
    b.sobolev_bound = std::pow(s, 1.0 / p);
  }
  b.slack = b.sobolev_bound > 0.0 ? b.measured_norm / b.sobolev_bound : kNaN;
  return b;
}

}  // namespace torusfio
