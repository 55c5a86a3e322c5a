#include "torusfio/phase_toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "torusfio/error.hpp"
#include "torusfio/random.hpp"

namespace torusfio {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int signed_mode(int slot, int n) { return slot <= n / 2 ? slot : slot - n; }

// k-th derivative at s = 0 of the trigonometric interpolant of r(s/M).
double line_derivative(std::vector<Complex> samples, int k) {
  const int m = static_cast<int>(samples.size());
  if (k == 0) return samples[0].real();
  grid_dft(samples, 1, m, -1);
  Complex acc(0.0);
  for (int s = 0; s < m; ++s) {
    const int eta = signed_mode(s, m);
    if (2 * std::abs(eta) == m) continue;
    acc += samples[s] * std::pow(Complex(0.0, kTwoPi * eta), k);
  }
  return acc.real() / m;
}

// d^k/dx_j^k phi(x, xi), computed from the periodic remainder
// phi(x + s e_j, xi) - s W, W = phi(x + e_j, xi) - phi(x, xi).
double spatial_axis_derivative(const PhaseValueFn& f, const Coord& x, const Coord& xi, int axis, int k,
                               int line_points) {
  Coord e = x;
  e[axis] += 1.0;
  const double base = f(x, xi);
  const double w = f(e, xi) - base;
  std::vector<Complex> r(static_cast<std::size_t>(line_points));
  for (int s = 0; s < line_points; ++s) {
    Coord y = x;
    const double frac = static_cast<double>(s) / line_points;
    y[axis] += frac;
    r[s] = f(y, xi) - base - frac * w;
  }
  const double d = line_derivative(std::move(r), k);
  return k == 1 ? w + d : d;
}

// Mixed spatial derivative d_x^beta g by nesting axis-line derivatives.
double spatial_derivative(const PhaseValueFn& f, const Coord& x, const Coord& xi, const Index& beta, int dim,
                          int line_points, int axis = 0) {
  while (axis < dim && beta[axis] == 0) ++axis;
  if (axis >= dim) return f(x, xi);
  PhaseValueFn inner = [&](const Coord& y, const Coord& z) {
    return spatial_derivative(f, y, z, beta, dim, line_points, axis + 1);
  };
  return spatial_axis_derivative(inner, x, xi, axis, beta[axis], line_points);
}

void ensure_finite(double v, const char* what, const Coord& x, const Coord& xi, int dim) {
  if (!std::isfinite(v))
    throw Error(ErrorKind::Numeric, std::string("non-finite ") + what + " at x=" + format_coord(x, dim) +
                                        " xi=" + format_coord(xi, dim));
}

int line_points_for(const TorusGrid& grid) { return std::max(16, grid.points_per_axis()); }

}  // namespace

PhaseFunction linear_phase(int dim) {
  PhaseFunction p;
  p.name = "linear";
  p.dim = dim;
  p.value = [dim](const Coord& x, const Coord& xi) { return dot(x, xi, dim); };
  p.grad_x = [](const Coord&, const Coord& xi) { return xi; };
  p.grad_xi = [](const Coord& x, const Coord&) { return x; };
  p.mixed_hessian = [](const Coord&, const Coord&) {
    Matrix m{};
    for (int i = 0; i < kMaxDim; ++i) m[i][i] = 1.0;
    return m;
  };
  p.x_deriv = [](const Coord&, const Coord& xi, const Index& a) {
    int order = a[0] + a[1] + a[2];
    if (order != 1) return 0.0;
    for (int j = 0; j < kMaxDim; ++j)
      if (a[j]) return xi[j];
    return 0.0;
  };
  p.homogeneous = true;
  p.multiplier_remainder = [](const Coord&) { return 0.0; };
  return p;
}

PhaseFunction TimeDependentPhase::at(double t) const {
  PhaseFunction p;
  p.name = name + "@t=" + num(t);
  p.dim = dim;
  auto v = value;
  const int n = dim;
  p.value = [v, t, n](const Coord& x, const Coord& xi) { return dot(x, xi, n) + t * v(t, x, xi); };
  if (mixed_hessian) {
    auto h = mixed_hessian;
    p.mixed_hessian = [h, t](const Coord& x, const Coord& xi) {
      Matrix m = h(t, x, xi);
      for (int i = 0; i < kMaxDim; ++i) {
        for (int j = 0; j < kMaxDim; ++j) m[i][j] *= t;
        m[i][i] += 1.0;
      }
      return m;
    };
  }
  p.homogeneous = homogeneous;
  if (x_independent) {
    p.multiplier_remainder = [v, t](const Coord& xi) { return t * v(t, Coord{0, 0, 0}, xi); };
  }
  p.params = params;
  p.params["t"] = t;
  return p;
}

// ------------------------------------------------------------ derivatives

Coord numeric_grad_xi(const PhaseFunction& phi, const Coord& x, const Coord& xi) {
  Coord g{0, 0, 0};
  const double h = 1e-4 * bracket(xi, phi.dim);
  for (int j = 0; j < phi.dim; ++j) {
    Coord a = xi, b = xi;
    a[j] += h;
    b[j] -= h;
    g[j] = (phi.value(x, a) - phi.value(x, b)) / (2.0 * h);
  }
  return g;
}

Coord numeric_grad_x(const PhaseFunction& phi, const Coord& x, const Coord& xi, int line_points) {
  Coord g{0, 0, 0};
  for (int j = 0; j < phi.dim; ++j) g[j] = spatial_axis_derivative(phi.value, x, xi, j, 1, line_points);
  return g;
}

Matrix numeric_mixed_hessian(const PhaseFunction& phi, const Coord& x, const Coord& xi, int line_points) {
  Matrix m{};
  const double h = 1e-4 * bracket(xi, phi.dim);
  for (int j = 0; j < phi.dim; ++j) {
    Coord a = xi, b = xi;
    a[j] += h;
    b[j] -= h;
    const Coord ga = phi.grad_x ? phi.grad_x(x, a) : numeric_grad_x(phi, x, a, line_points);
    const Coord gb = phi.grad_x ? phi.grad_x(x, b) : numeric_grad_x(phi, x, b, line_points);
    for (int i = 0; i < phi.dim; ++i) m[i][j] = (ga[i] - gb[i]) / (2.0 * h);
  }
  return m;
}

double determinant(const Matrix& m, int dim) {
  switch (dim) {
    case 1: return m[0][0];
    case 2: return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    default:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
}

// --------------------------------------------------------- validate_phase

namespace {

struct PhaseSample {
  Coord x{0, 0, 0};
  Index xi{0, 0, 0};
  double period_defect = 0.0;
  int period_axis = -1;
  double homog = 0.0;
  double det = 0.0;
  double gxi = 0.0;
  double gx = 0.0;
  double separation = std::numeric_limits<double>::infinity();
  Matrix mixed{};
  std::vector<double> spatial;
};

Index draw_lattice(Stream& st, int dim, int cutoff) {
  Index xi{0, 0, 0};
  do {
    for (int j = 0; j < dim; ++j) xi[j] = st.uniform_int(-cutoff, cutoff);
  } while (euclidean_norm(xi, dim) == 0.0);
  return xi;
}

// Partner frequency in the dyadic distance stratum s (|xi - xi'| in [2^s, 2^{s+1})).
Index draw_partner(Stream& st, const Index& xi, int dim, int cutoff, int stratum) {
  Index best = xi;
  for (int tries = 0; tries < 64; ++tries) {
    Index c{0, 0, 0};
    for (int j = 0; j < dim; ++j) c[j] = st.uniform_int(-cutoff, cutoff);
    Index d{0, 0, 0};
    for (int j = 0; j < dim; ++j) d[j] = c[j] - xi[j];
    const double r = euclidean_norm(d, dim);
    if (r == 0.0) continue;
    best = c;
    if (static_cast<int>(std::floor(std::log2(r))) == stratum) return c;
  }
  if (best == xi) {
    best[0] = xi[0] + (xi[0] < cutoff ? 1 : -1);
  }
  return best;
}

}  // namespace

PhaseReport validate_phase(const PhaseFunction& phi, const TorusGrid& grid, const FrequencyCube& cube,
                           int sample_budget, std::uint64_t seed) {
  PhaseValidationOptions o;
  o.sample_budget = sample_budget;
  o.seed = seed;
  return validate_phase(phi, grid, cube, o);
}

PhaseReport validate_phase(const PhaseFunction& phi, const TorusGrid& grid, const FrequencyCube& cube,
                           const PhaseValidationOptions& opts) {
  if (opts.sample_budget < 1000) throw Error(ErrorKind::Domain, "phase validation needs >= 1000 samples");
  if (!phi.value) throw Error(ErrorKind::Domain, "phase has no evaluator");
  const int dim = phi.dim;
  if (grid.dim() != dim || cube.dim() != dim) throw Error(ErrorKind::Dimension, "phase/grid/cube dimensions differ");
  const int lp = line_points_for(grid);
  const int ceiling = opts.spatial_ceiling;
  const int strata = static_cast<int>(std::floor(std::log2(2.0 * cube.cutoff() * std::sqrt(dim)))) + 1;
  const double lambdas[3] = {2.0, 3.0, 7.5};

  std::vector<PhaseSample> samples(static_cast<std::size_t>(opts.sample_budget));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < opts.sample_budget; ++i) {
    try {
      Stream st(opts.seed, static_cast<std::uint64_t>(i));
      PhaseSample s;
      for (int j = 0; j < dim; ++j) s.x[j] = st.uniform();
      s.xi = draw_lattice(st, dim, cube.cutoff());
      const Index partner = draw_partner(st, s.xi, dim, cube.cutoff(), i % strata);
      const Coord xi = to_coord(s.xi);
      const double v = phi.value(s.x, xi);
      ensure_finite(v, "phase value", s.x, xi, dim);

      for (int j = 0; j < dim; ++j) {
        Coord e = s.x;
        e[j] += 1.0;
        const double w = phi.value(e, xi) - v;
        const double defect = std::abs(w - std::round(w));
        if (defect > s.period_defect) {
          s.period_defect = defect;
          s.period_axis = j;
        }
      }

      const double scale = std::max(std::abs(v), euclidean_norm(xi, dim));
      for (double lam : lambdas) {
        Coord lx = xi;
        for (int j = 0; j < dim; ++j) lx[j] *= lam;
        s.homog = std::max(s.homog, std::abs(phi.value(s.x, lx) - lam * v) / (lam * scale));
      }

      const Coord gxi = phi.grad_xi ? phi.grad_xi(s.x, xi) : numeric_grad_xi(phi, s.x, xi);
      const Coord gx = phi.grad_x ? phi.grad_x(s.x, xi) : numeric_grad_x(phi, s.x, xi, lp);
      s.mixed = phi.mixed_hessian ? phi.mixed_hessian(s.x, xi) : numeric_mixed_hessian(phi, s.x, xi, lp);
      for (int j = 0; j < dim; ++j) {
        ensure_finite(gxi[j], "xi-gradient", s.x, xi, dim);
        ensure_finite(gx[j], "x-gradient", s.x, xi, dim);
        for (int k = 0; k < dim; ++k) ensure_finite(s.mixed[j][k], "mixed Hessian", s.x, xi, dim);
      }
      s.det = std::abs(determinant(s.mixed, dim));
      s.gxi = bracket(gxi, dim);
      s.gx = bracket(gx, dim) / bracket(xi, dim);

      const Coord pxi = to_coord(partner);
      const Coord gp = phi.grad_x ? phi.grad_x(s.x, pxi) : numeric_grad_x(phi, s.x, pxi, lp);
      Coord dg{0, 0, 0}, dxi{0, 0, 0};
      for (int j = 0; j < dim; ++j) {
        dg[j] = gx[j] - gp[j];
        dxi[j] = xi[j] - pxi[j];
      }
      s.separation = euclidean_norm(dg, dim) / euclidean_norm(dxi, dim);

      s.spatial.assign(static_cast<std::size_t>(ceiling), 0.0);
      const double xin = euclidean_norm(xi, dim);
      for (int k = 1; k <= ceiling; ++k) {
        for (int j = 0; j < dim; ++j) {
          double d;
          if (phi.x_deriv) {
            Index a{0, 0, 0};
            a[j] = k;
            d = phi.x_deriv(s.x, xi, a);
          } else if (k == 1) {
            d = gx[j];
          } else {
            d = spatial_axis_derivative(phi.value, s.x, xi, j, k, lp);
          }
          ensure_finite(d, "spatial derivative", s.x, xi, dim);
          s.spatial[k - 1] = std::max(s.spatial[k - 1], std::abs(d) / xin);
        }
      }
      samples[i] = std::move(s);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  PhaseReport r;
  r.phase = phi.name;
  r.seed = opts.seed;
  r.samples = opts.sample_budget;
  r.pair_samples = opts.sample_budget;
  r.homogeneity_declared = phi.homogeneous;
  r.spatial_ceiling = ceiling;
  r.analytic_gradients = phi.grad_x && phi.grad_xi && phi.mixed_hessian;
  r.det_lower_bound = std::numeric_limits<double>::infinity();
  r.grad_xi_window = {std::numeric_limits<double>::infinity(), 0.0};
  r.grad_x_window = {std::numeric_limits<double>::infinity(), 0.0};
  r.separation_constant = std::numeric_limits<double>::infinity();
  r.mixed_seminorms.assign(static_cast<std::size_t>(dim * dim), 0.0);
  r.spatial_growth.assign(static_cast<std::size_t>(ceiling), 0.0);
  for (const auto& s : samples) {
    if (s.period_defect > r.periodicity_defect) {
      r.periodicity_defect = s.period_defect;
      r.periodicity_worst_x = s.x;
      r.periodicity_worst_xi = s.xi;
      r.periodicity_worst_axis = s.period_axis;
    }
    r.homogeneity_defect = std::max(r.homogeneity_defect, s.homog);
    r.det_lower_bound = std::min(r.det_lower_bound, s.det);
    r.det_upper_bound = std::max(r.det_upper_bound, s.det);
    r.grad_xi_window.first = std::min(r.grad_xi_window.first, s.gxi);
    r.grad_xi_window.second = std::max(r.grad_xi_window.second, s.gxi);
    r.grad_x_window.first = std::min(r.grad_x_window.first, s.gx);
    r.grad_x_window.second = std::max(r.grad_x_window.second, s.gx);
    r.separation_constant = std::min(r.separation_constant, s.separation);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        r.mixed_seminorms[i * dim + j] = std::max(r.mixed_seminorms[i * dim + j], std::abs(s.mixed[i][j]));
    for (int k = 0; k < ceiling; ++k) r.spatial_growth[k] = std::max(r.spatial_growth[k], s.spatial[k]);
  }
  r.periodicity_ok = r.periodicity_defect <= opts.periodicity_tolerance;
  return r;
}

std::vector<std::pair<std::string, std::string>> PhaseReport::records() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("phase", phase);
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("samples", std::to_string(samples));
  out.emplace_back("pair_samples", std::to_string(pair_samples));
  out.emplace_back("periodicity_ok", periodicity_ok ? "true" : "false");
  out.emplace_back("periodicity_defect", num(periodicity_defect));
  if (!periodicity_ok) {
    const int d = static_cast<int>(std::sqrt(static_cast<double>(mixed_seminorms.size())));
    out.emplace_back("periodicity_worst_x", format_coord(periodicity_worst_x, d));
    out.emplace_back("periodicity_worst_xi", format_index(periodicity_worst_xi, d));
    out.emplace_back("periodicity_worst_axis", std::to_string(periodicity_worst_axis));
  }
  out.emplace_back("homogeneity_declared", homogeneity_declared ? "true" : "false");
  out.emplace_back("homogeneity_defect", num(homogeneity_defect));
  out.emplace_back("det_lower_bound", num(det_lower_bound));
  out.emplace_back("det_upper_bound", num(det_upper_bound));
  out.emplace_back("grad_xi_window_min", num(grad_xi_window.first));
  out.emplace_back("grad_xi_window_max", num(grad_xi_window.second));
  out.emplace_back("grad_x_window_min", num(grad_x_window.first));
  out.emplace_back("grad_x_window_max", num(grad_x_window.second));
  out.emplace_back("separation_constant", num(separation_constant));
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mixed_seminorms.size()))));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.emplace_back("mixed_seminorm_x" + std::to_string(i) + "_xi" + std::to_string(j),
                       num(mixed_seminorms[i * d + j]));
  out.emplace_back("spatial_ceiling", std::to_string(spatial_ceiling));
  for (std::size_t k = 0; k < spatial_growth.size(); ++k)
    out.emplace_back("spatial_growth_order" + std::to_string(k + 1), num(spatial_growth[k]));
  out.emplace_back("analytic_gradients", analytic_gradients ? "true" : "false");
  return out;
}

std::string PhaseReport::serialize() const {
  std::string s;
  for (const auto& kv : records()) s += kv.first + "=" + kv.second + "\n";
  return s;
}

// ---------------------------------------------------- validate_dispersive

namespace {

// d_xi^alpha by nested five-point differences, step 1e-3 <xi>.
double xi_derivative(const std::function<double(const Coord&)>& g, const Coord& xi, const Index& alpha, int dim,
                     int axis = 0) {
  while (axis < dim && alpha[axis] == 0) ++axis;
  if (axis >= dim) return g(xi);
  Index rest = alpha;
  rest[axis] -= 1;
  const double h = 1e-3 * bracket(xi, dim);
  auto at = [&](double off) {
    Coord z = xi;
    z[axis] += off;
    return xi_derivative(g, z, rest, dim, axis);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

std::string term_key(const char* a, const Index& alpha, const char* b, const Index& beta, int dim) {
  return std::string(a) + format_index(alpha, dim) + b + format_index(beta, dim);
}

}  // namespace

DispersivePhaseReport validate_dispersive(const TimeDependentPhase& phi, const SymbolFamily& a,
                                          const std::vector<double>& t_grid, const TorusGrid& grid,
                                          const FrequencyCube& cube, const DispersiveOptions& opts) {
  const int dim = phi.dim;
  if (grid.dim() != dim || cube.dim() != dim) throw Error(ErrorKind::Dimension, "phase/grid/cube dimensions differ");
  if (phi.t0 <= 0.0) throw Error(ErrorKind::Domain, "dispersive families need t0 > 0");
  const int ceiling = std::min(2 * dim + 2, opts.ceiling);
  const int lp = std::max(16, std::min(32, grid.points_per_axis()));

  DispersivePhaseReport rep;
  rep.phase = phi.name;
  rep.ceiling = ceiling;
  rep.support_constant = opts.support_constant;
  rep.seed = opts.seed;

  const auto high = multi_indices(dim, ceiling);
  std::vector<Index> nonzero;
  for (const auto& m : high)
    if (total_order(m, dim) >= 1) nonzero.push_back(m);

  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::Domain, "dispersive time must be positive");
    if (t < phi.t0) throw Error(ErrorKind::Domain, "dispersive time below t0");
    DispersiveEntry e;
    e.t = t;
    e.min_det = std::numeric_limits<double>::infinity();

    PhaseFunction pert;
    pert.dim = dim;
    auto pv = phi.value;
    pert.value = [pv, t](const Coord& x, const Coord& xi) { return pv(t, x, xi); };

    std::vector<double> phase_sup(nonzero.size() * nonzero.size(), 0.0);
    for (int i = 0; i < opts.sample_budget; ++i) {
      Stream st(opts.seed, static_cast<std::uint64_t>(i));
      Coord x{0, 0, 0};
      for (int j = 0; j < dim; ++j) x[j] = st.uniform();
      const Coord xi = to_coord(draw_lattice(st, dim, cube.cutoff()));
      Matrix h = phi.mixed_hessian ? phi.mixed_hessian(t, x, xi) : numeric_mixed_hessian(pert, x, xi, lp);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) h[r][c] *= t;
        h[r][r] += 1.0;
      }
      const double det = std::abs(determinant(h, dim));
      ensure_finite(det, "dispersive determinant", x, xi, dim);
      e.min_det = std::min(e.min_det, det);

      if (phi.x_independent) continue;
      for (std::size_t ia = 0; ia < nonzero.size(); ++ia)
        for (std::size_t ib = 0; ib < nonzero.size(); ++ib) {
          const Index& alpha = nonzero[ia];
          const Index& beta = nonzero[ib];
          auto g = [&](const Coord& z) { return spatial_derivative(pert.value, x, z, beta, dim, lp); };
          const double d = std::abs(xi_derivative(g, xi, alpha, dim)) * std::pow(t, total_order(beta, dim));
          phase_sup[ia * nonzero.size() + ib] = std::max(phase_sup[ia * nonzero.size() + ib], d);
        }
    }
    for (std::size_t ia = 0; ia < nonzero.size(); ++ia)
      for (std::size_t ib = 0; ib < nonzero.size(); ++ib) {
        const double v = phase_sup[ia * nonzero.size() + ib];
        e.phase_terms.emplace_back(term_key("xi", nonzero[ia], "_x", nonzero[ib], dim), v);
        e.phase_ratio = std::max(e.phase_ratio, v);
      }

    const LatticeSymbol at = a(t);
    const FrequencyCube inner(dim, cube.cutoff());
    for (const Index& beta : high) {
      const LatticeSymbol dx = x_derivative(at, beta);
      for (const Index& alpha : high) {
        const LatticeSymbol d = forward_difference(dx, alpha);
        const LatticeBox region = d.box() ? d.box()->intersect(inner) : LatticeBox::from_cube(inner);
        double sup = 0.0;
        const std::size_t nodes = d.x_independent() ? 1 : grid.size();
        for (std::size_t i = 0; i < region.size(); ++i) {
          const Index xi = region.point(i);
          for (std::size_t k = 0; k < nodes; ++k) sup = std::max(sup, std::abs(d.at_node(grid, k, xi)));
        }
        sup *= std::pow(t, total_order(beta, dim));
        e.symbol_terms.emplace_back(term_key("D", alpha, "_dx", beta, dim), sup);
        e.symbol_ratio = std::max(e.symbol_ratio, sup);
      }
    }

    for (std::size_t i = 0; i < cube.size(); ++i) {
      const Index xi = cube.point(i);
      if (t * euclidean_norm(xi, dim) >= opts.support_constant) continue;
      for (std::size_t k = 0; k < grid.size(); ++k)
        if (at.at_node(grid, k, xi) != Complex(0.0)) ++e.support_violations;
    }
    e.support_ok = e.support_violations == 0;
    rep.entries.push_back(std::move(e));
  }
  if (!rep.entries.empty()) rep.symbol = a(rep.entries.front().t).name();
  return rep;
}

std::vector<std::pair<std::string, std::string>> DispersivePhaseReport::records() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("phase", phase);
  out.emplace_back("symbol", symbol);
  out.emplace_back("ceiling", std::to_string(ceiling));
  out.emplace_back("support_constant", num(support_constant));
  out.emplace_back("seed", std::to_string(seed));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string p = "t" + std::to_string(i) + ".";
    out.emplace_back(p + "t", num(e.t));
    out.emplace_back(p + "min_det", num(e.min_det));
    out.emplace_back(p + "phase_ratio", num(e.phase_ratio));
    out.emplace_back(p + "symbol_ratio", num(e.symbol_ratio));
    out.emplace_back(p + "support_ok", e.support_ok ? "true" : "false");
    out.emplace_back(p + "support_violations", std::to_string(e.support_violations));
    for (const auto& kv : e.phase_terms) out.emplace_back(p + "phase." + kv.first, num(kv.second));
    for (const auto& kv : e.symbol_terms) out.emplace_back(p + "symbol." + kv.first, num(kv.second));
  }
  return out;
}

std::string DispersivePhaseReport::serialize() const {
  std::string s;
  for (const auto& kv : records()) s += kv.first + "=" + kv.second + "\n";
  return s;
}

}  // namespace torusfio
