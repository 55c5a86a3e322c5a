#include <algorithm>
#include <cmath>

#include "torusfio/boundedness_lab.hpp"
#include "torusfio/error.hpp"
#include "torusfio/random.hpp"

namespace torusfio {

GrowthFit fit_growth(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Dimension, "abscissas and estimates differ in length");
  if (x.size() < 3) throw Error(ErrorKind::Domain, "growth fit needs at least 3 points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::Domain, "growth fit needs positive data");
    if (i > 0 && !(x[i] > x[i - 1])) throw Error(ErrorKind::Domain, "abscissas must be strictly increasing");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log2(x[i]);
    my += std::log2(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log2(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log2(y[i]) - my);
  }
  GrowthFit f;
  f.points = static_cast<int>(x.size());
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log2(y[i]) - (f.intercept + f.exponent * std::log2(x[i]));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.reliable = f.residual <= 0.2;
  return f;
}

std::vector<Record> SweepResult::records() const {
  std::vector<Record> out;
  for (std::size_t i = 0; i < abscissas.size(); ++i) {
    const NormEstimate& e = estimates[i];
    Record r("torusfio/sweep-point/1");
    r.set("kind", kind).set("abscissa", abscissas[i]).set("estimate", e.value).set("method", e.method_name());
    r.set("direction", e.direction_name()).set("p", e.p).set("probes", e.probes).set("seed", e.seed);
    if (i < paths.size()) r.set("path", paths[i]);
    out.push_back(std::move(r));
  }
  Record s("torusfio/sweep-summary/1");
  s.set("kind", kind).set("phase", phase).set("symbol", symbol).set("p", p).set("points", fit.points);
  s.set("fitted_exponent", fit.exponent).set("intercept", fit.intercept).set("residual", fit.residual);
  s.set("reliable", fit.reliable).set("sup", sup).set("sup_at", sup_at);
  s.set("symbol_bound", symbol_bound).set("constant", constant).set("bound_ok", bound_ok);
  s.set("hypotheses_waived", hypotheses_waived);
  out.push_back(std::move(s));
  return out;
}

CsvTable SweepResult::table() const {
  CsvTable t;
  t.header = {"abscissa", "estimate", "method", "seed", "fitted_exponent"};
  for (std::size_t i = 0; i < abscissas.size(); ++i)
    t.rows.push_back({csv_real(abscissas[i]), csv_real(estimates[i].value), estimates[i].method_name(),
                      std::to_string(estimates[i].seed), csv_real(fit.exponent)});
  return t;
}

LatticeSymbol bracket_power_symbol(int dim, double kappa) {
  LatticeSymbol::HandleSpec s;
  s.name = "bracket-power";
  s.dim = dim;
  s.order = kappa;
  s.params = {{"kappa", kappa}};
  s.x_independent = true;
  s.eval = [dim, kappa](const Coord&, const Index& xi) { return Complex(std::pow(bracket(xi, dim), kappa)); };
  s.deriv = [dim, kappa](const Coord&, const Index& xi, const Index& beta) {
    return total_order(beta, dim) == 0 ? Complex(std::pow(bracket(xi, dim), kappa)) : Complex(0.0);
  };
  return LatticeSymbol::handle(std::move(s));
}

SweepResult truncation_sweep(const PhaseFunction& phi, const LatticeSymbol& a, const TruncationSweepOptions& opts) {
  if (opts.cutoffs.size() < 3) throw Error(ErrorKind::Domain, "a truncation sweep needs at least 3 cutoffs");
  for (std::size_t i = 0; i < opts.cutoffs.size(); ++i) {
    if (opts.cutoffs[i] < 1) throw Error(ErrorKind::Domain, "cutoffs must be positive");
    if (i > 0 && opts.cutoffs[i] <= opts.cutoffs[i - 1])
      throw Error(ErrorKind::Domain, "cutoffs must be strictly increasing");
  }
  if (opts.oversampling < 2) throw Error(ErrorKind::Domain, "oversampling must be at least 2");
  if (a.dim() != phi.dim) throw Error(ErrorKind::Dimension, "phase and symbol dimensions differ");

  SweepResult r;
  r.kind = "truncation";
  r.phase = phi.name;
  r.symbol = a.name();
  r.p = opts.p;
  for (std::size_t i = 0; i < opts.cutoffs.size(); ++i) {
    const int Xi = opts.cutoffs[i];
    const TorusGrid grid(phi.dim, opts.oversampling * Xi + 4);
    const FrequencyCube cube(phi.dim, Xi);
    const auto A = FsoOperator::create(phi, a, grid, cube);
    ProbeOptions po;
    po.probes = opts.probes;
    po.steps = opts.steps;
    po.seed = derive_seed(opts.seed, i);
    r.estimates.push_back(norm_lp_probe(A, opts.p, po));
    r.estimates.back().probe_values.clear();
    r.abscissas.push_back(Xi);
    r.paths.push_back(A.kernel().path_name());
  }
  std::vector<double> v;
  for (const auto& e : r.estimates) v.push_back(e.value);
  r.fit = fit_growth(r.abscissas, v);
  const auto top = std::max_element(v.begin(), v.end());
  r.sup = *top;
  r.sup_at = r.abscissas[static_cast<std::size_t>(top - v.begin())];
  return r;
}

SweepResult truncation_sweep(const PhaseFunction& phi, double kappa, const TruncationSweepOptions& opts) {
  return truncation_sweep(phi, bracket_power_symbol(phi.dim, kappa), opts);
}

SweepResult dispersive_sweep(const TimeDependentPhase& phi, const SymbolFamily& a, const std::vector<double>& t_grid,
                             const TorusGrid& grid, const FrequencyCube& cube, const DispersiveSweepOptions& opts,
                             const DispersivePhaseReport* precheck) {
  if (t_grid.empty()) throw Error(ErrorKind::Domain, "empty t-grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw Error(ErrorKind::Domain, "t-grid must be strictly increasing");

  SweepResult r;
  r.kind = "dispersive";
  r.phase = phi.name;
  r.p = 2.0;
  r.hypotheses_waived = opts.waive_hypotheses;

  if (!opts.waive_hypotheses) {
    DispersivePhaseReport local;
    if (!precheck) {
      local = validate_dispersive(phi, a, t_grid, grid, cube, opts.validation);
      precheck = &local;
    }
    if (precheck->entries.size() != t_grid.size())
      throw Error(ErrorKind::Domain, "hypothesis report does not cover the t-grid");
    r.symbol = precheck->symbol;
    r.symbol_bound = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      const DispersiveEntry& e = precheck->entries[i];
      if (e.t != t_grid[i]) throw Error(ErrorKind::Domain, "hypothesis report does not cover the t-grid");
      if (!e.support_ok)
        throw Error(ErrorKind::Domain, "symbol support violates t|xi| >= C at t=" + std::to_string(e.t));
      if (!(e.min_det > 0.0))
        throw Error(ErrorKind::Domain, "det(I + t d_x d_xi phi) degenerates at t=" + std::to_string(e.t));
      r.symbol_bound = std::max(r.symbol_bound, e.symbol_ratio);
    }
  }

  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const LatticeSymbol sym = a(t);
    if (r.symbol.empty()) r.symbol = sym.name();
    const auto A = FsoOperator::create(phi.at(t), sym, grid, cube);
    NormEstimate e = norm_p2_exact(assemble_matrix(A));
    r.abscissas.push_back(t);
    r.estimates.push_back(e);
    r.paths.push_back(A.kernel().path_name());
  }
  std::vector<double> v;
  for (const auto& e : r.estimates) v.push_back(e.value);
  const auto top = std::max_element(v.begin(), v.end());
  r.sup = *top;
  r.sup_at = r.abscissas[static_cast<std::size_t>(top - v.begin())];
  if (!std::isfinite(r.sup)) throw Error(ErrorKind::Numeric, "non-finite norm in dispersive sweep");
  if (std::isfinite(r.symbol_bound) && r.symbol_bound > 0.0) {
    r.constant = r.sup / r.symbol_bound;
    if (opts.constant) r.bound_ok = r.sup <= *opts.constant * r.symbol_bound * (1.0 + 1e-12);
  }
  if (t_grid.size() >= 3 && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; }))
    r.fit = fit_growth(r.abscissas, v);
  return r;
}

}  // namespace torusfio
