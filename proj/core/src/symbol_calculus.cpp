#include "torusfio/symbol_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "torusfio/cardinal_kernel.hpp"
#include "torusfio/error.hpp"

namespace torusfio {

// ---------------------------------------------------------------- LatticeBox

LatticeBox LatticeBox::from_cube(const FrequencyCube& cube) {
  LatticeBox b;
  b.dim = cube.dim();
  for (int j = 0; j < b.dim; ++j) {
    b.lo[j] = -cube.cutoff();
    b.hi[j] = cube.cutoff();
  }
  return b;
}

bool LatticeBox::empty() const {
  for (int j = 0; j < dim; ++j)
    if (hi[j] < lo[j]) return true;
  return false;
}

bool LatticeBox::contains(const Index& xi) const {
  for (int j = 0; j < dim; ++j)
    if (xi[j] < lo[j] || xi[j] > hi[j]) return false;
  return true;
}

std::size_t LatticeBox::size() const {
  if (empty()) return 0;
  std::size_t s = 1;
  for (int j = 0; j < dim; ++j) s *= static_cast<std::size_t>(hi[j] - lo[j] + 1);
  return s;
}

std::size_t LatticeBox::flat(const Index& xi) const {
  std::size_t f = 0;
  for (int j = 0; j < dim; ++j)
    f = f * static_cast<std::size_t>(hi[j] - lo[j] + 1) + static_cast<std::size_t>(xi[j] - lo[j]);
  return f;
}

Index LatticeBox::point(std::size_t flat) const {
  Index xi{0, 0, 0};
  for (int j = dim - 1; j >= 0; --j) {
    const std::size_t w = static_cast<std::size_t>(hi[j] - lo[j] + 1);
    xi[j] = lo[j] + static_cast<int>(flat % w);
    flat /= w;
  }
  return xi;
}

LatticeBox LatticeBox::intersect(const FrequencyCube& cube) const {
  LatticeBox b = *this;
  for (int j = 0; j < dim; ++j) {
    b.lo[j] = std::max(lo[j], -cube.cutoff());
    b.hi[j] = std::min(hi[j], cube.cutoff());
  }
  return b;
}

// ------------------------------------------------------------- LatticeSymbol

LatticeSymbol LatticeSymbol::handle(HandleSpec spec) {
  if (!spec.eval) throw Error(ErrorKind::Domain, "symbol handle '" + spec.name + "' has no evaluator");
  if (spec.dim < 1 || spec.dim > kMaxDim) throw Error(ErrorKind::Dimension, "symbol dimension out of range");
  LatticeSymbol s;
  s.name_ = std::move(spec.name);
  s.dim_ = spec.dim;
  s.order_ = spec.order;
  s.eval_ = std::move(spec.eval);
  s.deriv_ = std::move(spec.deriv);
  s.params_ = std::move(spec.params);
  s.x_independent_ = spec.x_independent;
  s.x_modes_ = std::move(spec.x_modes);
  return s;
}

LatticeSymbol LatticeSymbol::tabulated(std::string name, double order, SymbolTable table, ParamMap params) {
  if (table.values.size() != table.grid.size() * table.box.size())
    throw Error(ErrorKind::Dimension, "symbol table size does not match grid x box");
  if (table.box.dim != table.grid.dim()) throw Error(ErrorKind::Dimension, "table box and grid dimension differ");
  LatticeSymbol s;
  s.name_ = std::move(name);
  s.dim_ = table.grid.dim();
  s.order_ = order;
  s.params_ = std::move(params);
  s.box_ = table.box;
  s.table_ = std::make_shared<const SymbolTable>(std::move(table));
  return s;
}

LatticeSymbol LatticeSymbol::tabulate(const LatticeSymbol& a, const TorusGrid& grid, const FrequencyCube& cube) {
  if (grid.dim() != a.dim() || cube.dim() != a.dim())
    throw Error(ErrorKind::Dimension, "tabulation grid/cube dimension differs from symbol");
  SymbolTable t;
  t.grid = grid;
  t.box = a.box_ ? a.box_->intersect(cube) : LatticeBox::from_cube(cube);
  if (t.box.empty()) throw Error(ErrorKind::Domain, "symbol is undefined on the requested cube");
  const std::size_t bs = t.box.size();
  t.values.resize(grid.size() * bs);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(grid.size()); ++k)
    for (std::size_t i = 0; i < bs; ++i) t.values[k * bs + i] = a.at_node(grid, k, t.box.point(i));
  LatticeSymbol s = tabulated(a.name_, a.order_, std::move(t), a.params_);
  s.x_independent_ = a.x_independent_;
  return s;
}

Complex LatticeSymbol::operator()(const Coord& x, const Index& xi) const {
  if (!defined_at(xi))
    throw Error(ErrorKind::Boundary, "symbol '" + name_ + "' undefined at xi=" + format_index(xi, dim_));
  if (!table_) return eval_(x, xi);
  const TorusGrid& g = table_->grid;
  Index k{0, 0, 0};
  for (int j = 0; j < dim_; ++j) {
    const double s = x[j] * g.points_per_axis();
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9)
      throw Error(ErrorKind::Domain, "tabulated symbol evaluated off its grid", j);
    k[j] = static_cast<int>(r);
  }
  return table_->at(g.flat(k), xi);
}

Complex LatticeSymbol::at_node(const TorusGrid& grid, std::size_t node, const Index& xi) const {
  if (table_) {
    if (grid != table_->grid) throw Error(ErrorKind::Dimension, "tabulated symbol used on a different grid");
    if (!box_->contains(xi))
      throw Error(ErrorKind::Boundary, "symbol '" + name_ + "' undefined at xi=" + format_index(xi, dim_));
    return table_->at(node, xi);
  }
  if (!defined_at(xi))
    throw Error(ErrorKind::Boundary, "symbol '" + name_ + "' undefined at xi=" + format_index(xi, dim_));
  return eval_(grid.node(node), xi);
}

LatticeSymbol LatticeSymbol::with_box(const LatticeBox& box) const {
  LatticeSymbol s = *this;
  if (table_) throw Error(ErrorKind::Domain, "cannot rebox a tabulated symbol");
  s.box_ = box;
  return s;
}

LatticeSymbol LatticeSymbol::renamed(std::string name) const {
  LatticeSymbol s = *this;
  s.name_ = std::move(name);
  return s;
}

// ------------------------------------------------------------ class spec

SymbolClassSpec::SymbolClassSpec(double m, double rho_, double delta_, int n1, int n2)
    : order(m), rho(rho_), delta(delta_), max_alpha(n1), max_beta(n2) {
  validate();
}

SymbolClassSpec SymbolClassSpec::with_default_ceilings(double m, double rho, double delta, int dim, double p) {
  const int beta = std::isinf(p) ? 1 : static_cast<int>(std::floor(dim / p)) + 1;
  return SymbolClassSpec(m, rho, delta, dim + 1, beta);
}

void SymbolClassSpec::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::Domain, "rho must lie in [0,1]");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorKind::Domain, "delta must lie in [0,1]");
  if (max_alpha < 0 || max_beta < 0) throw Error(ErrorKind::Domain, "derivative ceilings must be >= 0");
}

// ------------------------------------------------------------- differences

namespace {

void check_multi_index(const Index& v, int dim, const char* what) {
  for (int j = 0; j < kMaxDim; ++j) {
    if (v[j] < 0) throw Error(ErrorKind::Domain, std::string(what) + " has a negative entry", j);
    if (j >= dim && v[j] != 0) throw Error(ErrorKind::Dimension, std::string(what) + " exceeds dimension", j);
  }
  if (total_order(v, dim) > kMaxDifferenceOrder)
    throw Error(ErrorKind::Domain, std::string(what) + " order exceeds " + std::to_string(kMaxDifferenceOrder));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Terms (gamma, (-1)^{|alpha-gamma|} binom(alpha,gamma)) of the difference formula.
std::vector<std::pair<Index, double>> difference_stencil(const Index& alpha, int dim) {
  std::vector<std::pair<Index, double>> out;
  Index g{0, 0, 0};
  while (true) {
    double c = 1.0;
    int sign = 0;
    for (int j = 0; j < dim; ++j) {
      c *= binomial(alpha[j], g[j]);
      sign += alpha[j] - g[j];
    }
    out.emplace_back(g, (sign % 2) ? -c : c);
    int j = dim - 1;
    while (j >= 0 && g[j] == alpha[j]) g[j--] = 0;
    if (j < 0) break;
    ++g[j];
  }
  return out;
}

Index shifted(const Index& xi, const Index& g, int sign) {
  Index r = xi;
  for (int j = 0; j < kMaxDim; ++j) r[j] += sign * g[j];
  return r;
}

LatticeBox shrink(const LatticeBox& box, const Index& alpha, bool forward, const std::string& name) {
  LatticeBox b = box;
  for (int j = 0; j < b.dim; ++j) {
    if (forward)
      b.hi[j] -= alpha[j];
    else
      b.lo[j] += alpha[j];
    if (b.hi[j] < b.lo[j])
      throw Error(ErrorKind::Boundary,
                  "difference of order " + std::to_string(alpha[j]) + " runs past the table of '" + name + "'",
                  j);
  }
  return b;
}

LatticeSymbol difference_impl(const LatticeSymbol& a, const Index& alpha, bool forward) {
  check_multi_index(alpha, a.dim(), "alpha");
  if (total_order(alpha, a.dim()) == 0) return a;
  const int dim = a.dim();
  const std::string nm = std::string(forward ? "D" : "Db") + format_index(alpha, dim) + "[" + a.name() + "]";

  if (a.is_table()) {
    // Recursive unit differences along each axis.
    SymbolTable cur = a.table();
    for (int j = 0; j < dim; ++j) {
      for (int step = 0; step < alpha[j]; ++step) {
        Index unit{0, 0, 0};
        unit[j] = 1;
        SymbolTable next;
        next.grid = cur.grid;
        next.box = shrink(cur.box, unit, forward, a.name());
        const std::size_t bs = next.box.size(), cs = cur.box.size();
        // (upper, lower) positions in the current box per point of the shrunken one
        std::vector<std::pair<std::size_t, std::size_t>> src(bs);
        for (std::size_t i = 0; i < bs; ++i) {
          const Index xi = next.box.point(i);
          src[i] = forward ? std::pair{cur.box.flat(shifted(xi, unit, 1)), cur.box.flat(xi)}
                           : std::pair{cur.box.flat(xi), cur.box.flat(shifted(xi, unit, -1))};
        }
        next.values.resize(cur.grid.size() * bs);
        for (std::size_t k = 0; k < cur.grid.size(); ++k) {
          const Complex* row = cur.values.data() + k * cs;
          Complex* out = next.values.data() + k * bs;
          for (std::size_t i = 0; i < bs; ++i) out[i] = row[src[i].first] - row[src[i].second];
        }
        cur = std::move(next);
      }
    }
    return LatticeSymbol::tabulated(nm, a.order(), std::move(cur), a.params());
  }

  const auto st = difference_stencil(alpha, dim);
  const int sign = forward ? 1 : -1;
  // Backward terms: Db^alpha s(xi) = sum_gamma (-1)^{|gamma|} binom s(xi - gamma).
  auto coeff = [forward, dim](const std::pair<Index, double>& t, const Index& al) {
    if (forward) return t.second;
    int parity = 0;
    for (int j = 0; j < dim; ++j) parity += al[j];
    return (parity % 2) ? -t.second : t.second;
  };
  LatticeSymbol::HandleSpec spec;
  spec.name = nm;
  spec.dim = dim;
  spec.order = a.order();
  spec.params = a.params();
  spec.x_independent = a.x_independent();
  SymbolFn base = a.handle_fn();
  spec.eval = [base, st, sign, alpha, coeff](const Coord& x, const Index& xi) {
    Complex acc(0.0);
    for (const auto& t : st) acc += coeff(t, alpha) * base(x, shifted(xi, t.first, sign));
    return acc;
  };
  if (a.has_x_derivative()) {
    SymbolDerivFn d = a.deriv_fn();
    spec.deriv = [d, st, sign, alpha, coeff](const Coord& x, const Index& xi, const Index& beta) {
      Complex acc(0.0);
      for (const auto& t : st) acc += coeff(t, alpha) * d(x, shifted(xi, t.first, sign), beta);
      return acc;
    };
  }
  LatticeSymbol out = LatticeSymbol::handle(std::move(spec));
  if (a.box()) out = out.with_box(shrink(*a.box(), alpha, forward, a.name()));
  return out;
}

}  // namespace

LatticeSymbol forward_difference(const LatticeSymbol& a, const Index& alpha) {
  return difference_impl(a, alpha, true);
}

LatticeSymbol backward_difference(const LatticeSymbol& a, const Index& alpha) {
  return difference_impl(a, alpha, false);
}

// ----------------------------------------------------------- x-derivatives

namespace {

constexpr double kTailThreshold = 1e-6;
constexpr int kLinePoints = 32;

int signed_mode(int slot, int n) { return slot <= n / 2 ? slot : slot - n; }

// d^b/ds^b of the trigonometric interpolant of samples g(s/M), at s = 0.
Complex line_derivative(const std::vector<Complex>& samples, int b, int axis) {
  const int m = static_cast<int>(samples.size());
  std::vector<Complex> c = samples;
  grid_dft(c, 1, m, -1);
  double total = 0.0, tail = 0.0;
  for (int s = 0; s < m; ++s) {
    const double e = std::norm(c[s]);
    total += e;
    if (std::abs(signed_mode(s, m)) > m / 4) tail += e;
  }
  if (total > 0.0 && tail > kTailThreshold * total)
    throw Error(ErrorKind::Accuracy,
                "x-spectrum tail mass " + std::to_string(tail / total) + " exceeds 1e-6; grid too coarse", axis);
  Complex acc(0.0);
  for (int s = 0; s < m; ++s) {
    const int eta = signed_mode(s, m);
    if (2 * std::abs(eta) == m) continue;
    acc += c[s] * std::pow(Complex(0.0, kTwoPi * eta), b);
  }
  return acc / static_cast<double>(m);
}

Complex handle_spectral_derivative(const SymbolFn& f, const Coord& x, const Index& xi, const Index& beta, int dim,
                                   int axis) {
  while (axis < dim && beta[axis] == 0) ++axis;
  if (axis >= dim) return f(x, xi);
  std::vector<Complex> samples(kLinePoints);
  for (int s = 0; s < kLinePoints; ++s) {
    Coord y = x;
    y[axis] += static_cast<double>(s) / kLinePoints;
    samples[s] = handle_spectral_derivative(f, y, xi, beta, dim, axis + 1);
  }
  return line_derivative(samples, beta[axis], axis);
}

SymbolTable table_spectral_derivative(const SymbolTable& t, const Index& beta) {
  const TorusGrid& g = t.grid;
  const int n = g.points_per_axis();
  const int dim = g.dim();
  const std::size_t bs = t.box.size();
  SymbolTable out;
  out.grid = g;
  out.box = t.box;
  out.values.resize(t.values.size());

  // multiplier per DFT slot
  std::vector<Complex> mult(g.size());
  // bit j set when the slot lies in the tail along axis j
  std::vector<unsigned> in_tail(g.size(), 0);
  for (std::size_t s = 0; s < g.size(); ++s) {
    const Index k = g.node_index(s);
    Complex m(1.0);
    for (int j = 0; j < dim; ++j) {
      const int eta = signed_mode(k[j], n);
      if (std::abs(eta) > n / 4) in_tail[s] |= 1u << j;
      if (beta[j] == 0) continue;
      if (2 * std::abs(eta) == n)
        m = 0.0;
      else
        m *= std::pow(Complex(0.0, kTwoPi * eta), beta[j]);
    }
    mult[s] = m * g.weight();
  }

  double total = 0.0, tail = 0.0;
  std::vector<int> tail_axis_hits(dim, 0);
  std::vector<Complex> buf(g.size());
  for (std::size_t i = 0; i < bs; ++i) {
    for (std::size_t k = 0; k < g.size(); ++k) buf[k] = t.values[k * bs + i];
    grid_dft(buf, dim, n, -1);
    for (std::size_t s = 0; s < g.size(); ++s) {
      const double e = std::norm(buf[s]);
      total += e;
      if (in_tail[s]) {
        tail += e;
        for (int j = 0; j < dim; ++j)
          if (in_tail[s] >> j & 1u) tail_axis_hits[j] += e > 0.0;
      }
      buf[s] *= mult[s];
    }
    grid_dft(buf, dim, n, +1);
    for (std::size_t k = 0; k < g.size(); ++k) out.values[k * bs + i] = buf[k];
  }
  if (total > 0.0 && tail > kTailThreshold * total) {
    const int axis = static_cast<int>(std::max_element(tail_axis_hits.begin(), tail_axis_hits.end()) -
                                      tail_axis_hits.begin());
    throw Error(ErrorKind::Accuracy,
                "x-spectrum tail mass " + std::to_string(tail / total) + " exceeds 1e-6; grid too coarse", axis);
  }
  return out;
}

}  // namespace

LatticeSymbol x_derivative(const LatticeSymbol& a, const Index& beta) {
  check_multi_index(beta, a.dim(), "beta");
  const int dim = a.dim();
  if (total_order(beta, dim) == 0) return a;
  const std::string nm = "dx" + format_index(beta, dim) + "[" + a.name() + "]";

  if (a.is_table()) {
    SymbolTable t = a.x_independent() ? a.table() : table_spectral_derivative(a.table(), beta);
    if (a.x_independent()) std::fill(t.values.begin(), t.values.end(), Complex(0.0));
    LatticeSymbol s = LatticeSymbol::tabulated(nm, a.order(), std::move(t), a.params());
    return s;
  }

  LatticeSymbol::HandleSpec spec;
  spec.name = nm;
  spec.dim = dim;
  spec.order = a.order();
  spec.params = a.params();
  if (a.x_independent()) {
    spec.eval = [](const Coord&, const Index&) { return Complex(0.0); };
    spec.deriv = [](const Coord&, const Index&, const Index&) { return Complex(0.0); };
    spec.x_independent = true;
  } else if (a.has_x_derivative()) {
    SymbolDerivFn d = a.deriv_fn();
    spec.eval = [d, beta](const Coord& x, const Index& xi) { return d(x, xi, beta); };
    spec.deriv = [d, beta](const Coord& x, const Index& xi, const Index& b2) {
      Index s = beta;
      for (int j = 0; j < kMaxDim; ++j) s[j] += b2[j];
      return d(x, xi, s);
    };
  } else {
    SymbolFn f = a.handle_fn();
    spec.eval = [f, beta, dim](const Coord& x, const Index& xi) {
      return handle_spectral_derivative(f, x, xi, beta, dim, 0);
    };
  }
  LatticeSymbol out = LatticeSymbol::handle(std::move(spec));
  if (a.box()) out = out.with_box(*a.box());
  return out;
}

LatticeSymbol difference_by_formula(const LatticeSymbol& a, const Index& alpha, const Index& beta) {
  check_multi_index(alpha, a.dim(), "alpha");
  const LatticeSymbol b = x_derivative(a, beta);
  if (total_order(alpha, a.dim()) == 0) return b;
  const int dim = a.dim();
  const auto st = difference_stencil(alpha, dim);
  const std::string nm = "F" + format_index(alpha, dim) + "[" + b.name() + "]";

  if (b.is_table()) {
    const SymbolTable& t = b.table();
    SymbolTable out;
    out.grid = t.grid;
    out.box = shrink(t.box, alpha, true, a.name());
    const std::size_t bs = out.box.size(), ts = t.box.size(), nt = st.size();
    std::vector<std::size_t> src(bs * nt);
    for (std::size_t i = 0; i < bs; ++i) {
      const Index xi = out.box.point(i);
      for (std::size_t r = 0; r < nt; ++r) src[i * nt + r] = t.box.flat(shifted(xi, st[r].first, 1));
    }
    out.values.resize(t.grid.size() * bs);
    for (std::size_t k = 0; k < t.grid.size(); ++k) {
      const Complex* row = t.values.data() + k * ts;
      for (std::size_t i = 0; i < bs; ++i) {
        Complex acc(0.0);
        for (std::size_t r = 0; r < nt; ++r) acc += st[r].second * row[src[i * nt + r]];
        out.values[k * bs + i] = acc;
      }
    }
    return LatticeSymbol::tabulated(nm, a.order(), std::move(out), a.params());
  }
  return forward_difference(b, alpha).renamed(nm);
}

// --------------------------------------------------------------- seminorms

namespace {

std::vector<std::size_t> sample_nodes(const LatticeSymbol& a, const TorusGrid& grid) {
  if (a.x_independent()) return {0};
  std::vector<std::size_t> nodes(grid.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  return nodes;
}

const TorusGrid& effective_grid(const LatticeSymbol& a, const TorusGrid& grid) {
  return a.is_table() ? a.table().grid : grid;
}

}  // namespace

double seminorm(const LatticeSymbol& a, const Index& alpha, const Index& beta, const SymbolClassSpec& spec,
                const FrequencyCube& cube, const TorusGrid& grid) {
  spec.validate();
  const int dim = a.dim();
  if (cube.dim() != dim) throw Error(ErrorKind::Dimension, "cube dimension differs from symbol");
  const int na = total_order(alpha, dim);
  const int nb = total_order(beta, dim);
  if (na > spec.max_alpha) throw Error(ErrorKind::Domain, "|alpha| exceeds the class ceiling");
  if (nb > spec.max_beta) throw Error(ErrorKind::Domain, "|beta| exceeds the class ceiling");

  LatticeSymbol d;
  try {
    d = forward_difference(x_derivative(a, beta), alpha);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Boundary) throw Error(ErrorKind::Domain, e.what(), e.axis());
    throw;
  }
  const LatticeBox region = d.box() ? d.box()->intersect(cube) : LatticeBox::from_cube(cube);
  if (region.empty()) throw Error(ErrorKind::Domain, "boundary shrinkage leaves an empty cube");

  const TorusGrid& g = effective_grid(d, grid);
  const auto nodes = sample_nodes(d, g);
  const double w = spec.order - spec.rho * na + spec.delta * nb;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(region.size());
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const Index xi = region.point(static_cast<std::size_t>(i));
    const double scale = std::pow(bracket(xi, dim), -w);
    for (std::size_t k : nodes) best = std::max(best, std::abs(d.at_node(g, k, xi)) * scale);
  }
  return best;
}

std::vector<Index> multi_indices(int dim, int max_order) {
  std::vector<Index> out;
  for (int total = 0; total <= max_order; ++total) {
    Index v{0, 0, 0};
    // enumerate compositions of `total` into `dim` parts, lexicographically descending
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == dim - 1) {
        v[axis] = left;
        out.push_back(v);
        return;
      }
      for (int c = left; c >= 0; --c) {
        v[axis] = c;
        rec(axis + 1, left - c);
      }
    };
    rec(0, total);
  }
  return out;
}

double SeminormTable::max() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.value);
  return m;
}

const SeminormEntry* SeminormTable::find(const Index& alpha, const Index& beta) const {
  for (const auto& e : entries)
    if (e.alpha == alpha && e.beta == beta) return &e;
  return nullptr;
}

SeminormTable seminorm_table(const LatticeSymbol& a, const SymbolClassSpec& spec, const FrequencyCube& cube,
                             const TorusGrid& grid) {
  SeminormTable t;
  t.spec = spec;
  t.cutoff = cube.cutoff();
  t.dim = a.dim();
  for (const Index& beta : multi_indices(a.dim(), spec.max_beta))
    for (const Index& alpha : multi_indices(a.dim(), spec.max_alpha))
      t.entries.push_back({alpha, beta, seminorm(a, alpha, beta, spec, cube, grid)});
  return t;
}

// --------------------------------------------------------- order estimation

OrderFit estimate_order_fit(const LatticeSymbol& a, const FrequencyCube& cube, const TorusGrid& grid) {
  if (cube.cutoff() < 32) throw Error(ErrorKind::Domain, "order estimation needs a cutoff >= 32");
  const int dim = a.dim();
  const TorusGrid& g = effective_grid(a, grid);
  const auto nodes = sample_nodes(a, g);
  const LatticeBox region = a.box() ? a.box()->intersect(cube) : LatticeBox::from_cube(cube);

  int shells = 0;
  while ((1 << shells) <= cube.cutoff()) ++shells;
  std::vector<double> sup(shells, 0.0);
  std::vector<double> at(shells, 0.0);
  for (std::size_t i = 0; i < region.size(); ++i) {
    const Index xi = region.point(i);
    const double r = euclidean_norm(xi, dim);
    if (r < 1.0) continue;
    const int j = static_cast<int>(std::floor(std::log2(r)));
    if (j >= shells) continue;
    for (std::size_t k : nodes) {
      const double v = std::abs(a.at_node(g, k, xi));
      if (v > sup[j]) {
        sup[j] = v;
        at[j] = bracket(xi, dim);
      }
    }
  }
  std::vector<double> lx, ly;
  for (int j = 0; j < shells; ++j)
    if (sup[j] > 0.0 && std::isfinite(sup[j])) {
      lx.push_back(std::log(at[j]));
      ly.push_back(std::log(sup[j]));
    }
  if (lx.size() < 2) throw Error(ErrorKind::Domain, "order undefined: symbol vanishes on the dyadic shells");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  OrderFit fit;
  fit.order = sxy / sxx;
  fit.shells = static_cast<int>(lx.size());
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + fit.order * (lx[i] - mx));
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

double estimate_order(const LatticeSymbol& a, const FrequencyCube& cube, const TorusGrid& grid) {
  return estimate_order_fit(a, cube, grid).order;
}

// ---------------------------------------------------- extension/restriction

LatticeSymbol restrict_symbol(const ContinuumSymbol& a, const FrequencyCube& cube) {
  if (!a.eval) throw Error(ErrorKind::Domain, "continuum symbol has no evaluator");
  LatticeSymbol::HandleSpec spec;
  spec.name = "R[" + a.name + "]";
  spec.dim = a.dim;
  spec.order = a.order;
  spec.x_independent = a.x_independent;
  ContinuumFn f = a.eval;
  spec.eval = [f](const Coord& x, const Index& xi) { return f(x, to_coord(xi)); };
  if (a.deriv) {
    ContinuumDerivFn d = a.deriv;
    spec.deriv = [d](const Coord& x, const Index& xi, const Index& beta) { return d(x, to_coord(xi), beta); };
  }
  return LatticeSymbol::handle(std::move(spec)).with_box(LatticeBox::from_cube(cube));
}

namespace {

struct ExtensionData {
  LatticeSymbol a;
  LatticeBox box;
  // x-spectra of tabulated symbols, one full DFT per box point
  std::vector<Complex> xspec;

  Complex lattice_value(const Coord& x, const Index& k) const {
    if (!a.is_table()) return a(x, k);
    const SymbolTable& t = a.table();
    const TorusGrid& g = t.grid;
    const int n = g.points_per_axis();
    Index node{0, 0, 0};
    bool on_grid = true;
    for (int j = 0; j < g.dim(); ++j) {
      const double s = x[j] * n;
      const double r = std::round(s);
      if (std::abs(s - r) > 1e-12) on_grid = false;
      node[j] = static_cast<int>(r);
    }
    if (on_grid) return t.at(g.flat(node), k);
    const std::size_t base = box.flat(k) * g.size();
    Complex acc(0.0);
    for (std::size_t s = 0; s < g.size(); ++s) {
      const Index sl = g.node_index(s);
      // Nyquist modes enter symmetrically: e^{i pi n x} becomes cos(pi n x).
      Coord eta{0.0, 0.0, 0.0};
      double nyq = 1.0;
      for (int j = 0; j < g.dim(); ++j) {
        const int e = signed_mode(sl[j], n);
        if (2 * std::abs(e) == n)
          nyq *= std::cos(kPi * n * x[j]);
        else
          eta[j] = e;
      }
      acc += xspec[base + s] * nyq * unimodular(dot(x, eta, g.dim()));
    }
    return acc;
  }
};

}  // namespace

Extension extend_symbol(const LatticeSymbol& a) {
  if (!a.box()) throw Error(ErrorKind::Domain, "extension needs a symbol defined on a finite cube");
  const LatticeBox box = *a.box();
  for (int j = 0; j < a.dim(); ++j)
    if (box.hi[j] - box.lo[j] < 8)
      throw Error(ErrorKind::Domain, "cube too small for the cardinal kernel (need cutoff >= 4)", j);

  auto data = std::make_shared<ExtensionData>();
  data->a = a;
  data->box = box;
  if (a.is_table()) {
    const SymbolTable& t = a.table();
    const std::size_t bs = box.size();
    data->xspec.resize(bs * t.grid.size());
    std::vector<Complex> buf(t.grid.size());
    for (std::size_t i = 0; i < bs; ++i) {
      for (std::size_t k = 0; k < t.grid.size(); ++k) buf[k] = t.values[k * bs + i];
      grid_dft(buf, t.grid.dim(), t.grid.points_per_axis(), -1);
      for (std::size_t s = 0; s < t.grid.size(); ++s) data->xspec[i * t.grid.size() + s] = buf[s] * t.grid.weight();
    }
  }

  const CardinalKernel& kernel = default_cardinal_kernel();
  const int dim = a.dim();
  auto combine = [data, dim, &kernel](const Coord& xi, const std::function<Complex(const Index&)>& value) {
    int first[kMaxDim] = {0, 0, 0};
    std::vector<double> w[kMaxDim];
    for (int j = 0; j < dim; ++j) kernel.stencil(xi[j], first[j], w[j]);
    Complex acc(0.0);
    Index k{0, 0, 0};
    Index c{0, 0, 0};
    const std::size_t len = w[0].size();
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= len;
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t r = f;
      double weight = 1.0;
      for (int j = dim - 1; j >= 0; --j) {
        const std::size_t idx = r % len;
        r /= len;
        weight *= w[j][idx];
        k[j] = first[j] + static_cast<int>(idx);
        c[j] = std::clamp(k[j], data->box.lo[j], data->box.hi[j]);
      }
      if (weight == 0.0) continue;
      acc += weight * value(c);
    }
    return acc;
  };

  Extension ext;
  ext.kernel_radius = kernel.radius();
  ext.partition_defect = kernel.partition_defect();
  ext.moment_defect = kernel.moment_defect();
  ext.symbol.name = "E[" + a.name() + "]";
  ext.symbol.dim = dim;
  ext.symbol.order = a.order();
  ext.symbol.x_independent = a.x_independent();
  ext.symbol.eval = [data, combine](const Coord& x, const Coord& xi) {
    return combine(xi, [&](const Index& k) { return data->lattice_value(x, k); });
  };
  if (a.has_x_derivative() && !a.is_table()) {
    ext.symbol.deriv = [data, combine](const Coord& x, const Coord& xi, const Index& beta) {
      return combine(xi, [&](const Index& k) { return data->a.deriv_fn()(x, k, beta); });
    };
  }
  return ext;
}

}  // namespace torusfio
