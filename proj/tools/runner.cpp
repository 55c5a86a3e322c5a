#include "runner.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include "torusfio/boundedness_lab.hpp"
#include "torusfio/columnar_io.hpp"
#include "torusfio/operator_engine.hpp"
#include "torusfio/phase_toolkit.hpp"
#include "torusfio/random.hpp"
#include "torusfio/symbol_calculus.hpp"
#include "torusfio/torus_fourier.hpp"

#ifndef TFIO_VERSION
#define TFIO_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace torusfio;

namespace tfio {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io:
      return kExitConfig;
    case ErrorKind::Resource:
      return kExitResource;
    default:
      return kExitNumeric;
  }
}

Record error_record(ErrorKind kind, int axis, const std::string& message) {
  Record r("torusfio/error/1");
  r.set("kind", to_string(kind)).set("message", message).set("exit_code", exit_code_for(kind));
  if (axis >= 0) r.set("axis", axis);
  return r;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename " + tmp + ": " + ec.message());
  }
}

namespace {

std::string index_text(const Index& a, int dim) {
  std::string s;
  for (int j = 0; j < dim; ++j) s += (j ? "," : "") + std::to_string(a[j]);
  return s;
}

// key/value pairs from the phase reports; numeric strings become reals
Record pairs_record(const std::string& schema, const std::vector<std::pair<std::string, std::string>>& kv) {
  Record r(schema);
  for (const auto& [k, v] : kv) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (!v.empty() && end && *end == '\0' && v.find(',') == std::string::npos)
      r.set(k, d);
    else if (v == "true" || v == "false")
      r.set(k, v == "true");
    else
      r.set(k, v);
  }
  return r;
}

std::string function_text(const PeriodicFunction& f) {
  std::ostringstream o;
  write_function(o, f);
  return o.str();
}

std::string num(double v) { return csv_real(v); }

struct Setup {
  TorusGrid grid;
  FrequencyCube cube;
};

Setup setup(const ExperimentConfig& c) { return {TorusGrid(c.dimension, c.grid), FrequencyCube(c.dimension, c.effective_cutoff())}; }

Artifacts do_apply(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  PeriodicFunction f(grid);
  if (c.apply.input == "random") {
    const int cut = c.apply.input_cutoff >= 0 ? c.apply.input_cutoff : cube.cutoff();
    SpectralSequence s(cube);
    Stream st(c.seed, 0);
    for (std::size_t i = 0; i < cube.size(); ++i) {
      const Index xi = cube.point(i);
      bool inside = true;
      for (int j = 0; j < c.dimension; ++j) inside = inside && std::abs(xi[j]) <= cut;
      const Complex z = st.complex_normal();
      if (inside) s.coeffs[i] = z;
    }
    f = inverse_transform(s, grid);
  } else if (c.apply.input == "monomial") {
    Index k{0, 0, 0};
    for (int j = 0; j < c.dimension; ++j) k[j] = c.apply.frequency[static_cast<std::size_t>(j)];
    const int n = c.dimension;
    f = PeriodicFunction::sample(grid, [k, n](const Coord& x) { return unimodular(dot(x, k, n)); });
  } else {
    std::ifstream in(c.apply.path);
    if (!in) throw Error(ErrorKind::Io, "cannot read input function '" + c.apply.path + "'");
    f = read_function(in);
    if (f.grid != grid) throw Error(ErrorKind::Config, "input function grid does not match the config grid");
  }
  const auto A = FsoOperator::create(reg.phase(c.phase, c.dimension), reg.symbol(c.symbol, c.dimension), grid, cube);
  const PeriodicFunction g = apply_fso(A, f);

  double diff = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) diff = std::max(diff, std::abs(g.values[k] - f.values[k]));
  Artifacts a;
  Record r("torusfio/apply/1");
  r.set("phase", c.phase.name).set("symbol", c.symbol.name).set("path", A.kernel().path_name());
  r.set("dimension", c.dimension).set("grid", c.grid).set("cutoff", cube.cutoff());
  r.set("input_l2", lp_norm(f, 2.0)).set("output_l2", lp_norm(g, 2.0)).set("max_abs_change", diff);
  a.records.push_back(r);
  a.table.header = {"node", "input_re", "input_im", "output_re", "output_im"};
  for (std::size_t k = 0; k < f.values.size(); ++k)
    a.table.rows.push_back({std::to_string(k), num(f.values[k].real()), num(f.values[k].imag()),
                            num(g.values[k].real()), num(g.values[k].imag())});
  a.files.emplace_back("input.txt", function_text(f));
  a.files.emplace_back("output.txt", function_text(g));
  a.summary.push_back("path " + A.kernel().path_name() + ", ||f||_2 " + num(lp_norm(f, 2.0)) + ", ||Af||_2 " +
                      num(lp_norm(g, 2.0)) + ", max |Af - f| " + num(diff));
  return a;
}

Artifacts do_analyze(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  const LatticeSymbol sym = reg.symbol(c.symbol, c.dimension);
  const double order = c.symbol_class.order ? *c.symbol_class.order : sym.order();
  SymbolClassSpec spec = SymbolClassSpec::with_default_ceilings(order, c.symbol_class.rho, c.symbol_class.delta,
                                                                c.dimension, c.p);
  if (c.symbol_class.max_alpha) spec.max_alpha = *c.symbol_class.max_alpha;
  if (c.symbol_class.max_beta) spec.max_beta = *c.symbol_class.max_beta;
  spec.validate();
  const SeminormTable t = seminorm_table(sym, spec, cube, grid);

  Artifacts a;
  a.table.header = {"alpha", "beta", "seminorm"};
  for (const auto& e : t.entries) {
    Record r("torusfio/seminorm/1");
    r.set("alpha", index_text(e.alpha, c.dimension)).set("beta", index_text(e.beta, c.dimension)).set("value", e.value);
    a.records.push_back(r);
    a.table.rows.push_back({index_text(e.alpha, c.dimension), index_text(e.beta, c.dimension), num(e.value)});
  }
  Record s("torusfio/symbol-analysis/1");
  s.set("symbol", sym.name()).set("order", order).set("rho", spec.rho).set("delta", spec.delta);
  s.set("max_alpha", spec.max_alpha).set("max_beta", spec.max_beta).set("cutoff", cube.cutoff());
  s.set("max_seminorm", t.max());
  if (cube.cutoff() >= 32) {
    const OrderFit fit = estimate_order_fit(sym, cube, grid);
    s.set("estimated_order", fit.order).set("order_fit_residual", fit.residual).set("order_fit_shells", fit.shells);
    a.summary.push_back("estimated order " + num(fit.order) + " (residual " + num(fit.residual) + ")");
  } else {
    s.set("estimated_order", kNaN);
    a.summary.push_back("order fit skipped: cutoff below 32");
  }
  a.records.push_back(s);
  a.summary.push_back(std::to_string(t.entries.size()) + " seminorms, max " + num(t.max()));
  if (grid.size() * cube.size() <= (std::size_t{1} << 20)) {
    std::ostringstream o;
    write_symbol_table(o, LatticeSymbol::tabulate(sym, grid, cube));
    a.files.emplace_back("symbol.txt", o.str());
  }
  return a;
}

Artifacts do_validate_phase(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  PhaseValidationOptions o;
  o.sample_budget = c.validation.samples;
  o.seed = c.seed;
  o.spatial_ceiling = c.validation.spatial_ceiling;
  const PhaseReport rep = validate_phase(reg.phase(c.phase, c.dimension), grid, cube, o);
  Artifacts a;
  a.records.push_back(pairs_record("torusfio/phase-report/1", rep.records()));
  a.table.header = {"key", "value"};
  for (const auto& [k, v] : rep.records()) a.table.rows.push_back({k, v});
  a.summary.push_back("periodicity " + std::string(rep.periodicity_ok ? "ok" : "FAILED") + ", det in [" +
                      num(rep.det_lower_bound) + ", " + num(rep.det_upper_bound) + "], separation " +
                      num(rep.separation_constant));
  return a;
}

void add_norm_row(Artifacts& a, const NormEstimate& e) {
  a.records.push_back(e.record());
  a.table.rows.push_back({num(e.p), num(e.value), e.method_name(), std::to_string(e.seed)});
  a.summary.push_back(e.method_name() + " ||A||_" + num(e.p) + " = " + num(e.value));
}

Artifacts do_estimate_norm(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  const auto A = FsoOperator::create(reg.phase(c.phase, c.dimension), reg.symbol(c.symbol, c.dimension), grid, cube);
  Artifacts a;
  a.table.header = {"abscissa", "estimate", "method", "seed"};
  if (c.p == 2.0 && grid.size() <= kMaxDenseNodes) {
    const DenseOperator m = assemble_matrix(A);
    add_norm_row(a, norm_p2_exact(m));
    if (grid.size() <= 256) {
      std::ostringstream o;
      write_dense_operator(o, m);
      a.files.emplace_back("operator.txt", o.str());
    }
  }
  ProbeOptions po;
  po.probes = c.probes;
  po.steps = c.steps;
  po.seed = c.seed;
  add_norm_row(a, norm_lp_probe(A, c.p, po));
  if (!A.symbol.x_independent()) {
    const FrozenBound b = frozen_family_bound(A, c.p, po);
    a.records.push_back(b.record());
    a.summary.push_back("frozen-symbol bound " + num(b.sobolev_bound) + ", measured " + num(b.measured_norm) +
                        ", slack " + num(b.slack));
  }
  return a;
}

Artifacts do_transference(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  TransferenceOptions o;
  o.probes = c.probes;
  o.seed = c.seed;
  o.steps = c.steps;
  o.delta = c.transference.delta;
  const auto rec = transference_check(reg.phase(c.phase, 1), reg.continuum_symbol(c.symbol, 1), c.p, grid, cube, o);
  Artifacts a;
  a.records.push_back(rec.record());
  a.table.header = {"p", "euclid_norm_lb", "torus_norm_lb", "ratio", "torus_exact"};
  a.table.rows.push_back({num(rec.p), num(rec.euclid_norm_lb), num(rec.torus_norm_lb), num(rec.ratio),
                          num(rec.torus_exact)});
  a.summary.push_back("torus " + num(rec.torus_norm_lb) + ", line " + num(rec.euclid_norm_lb) + ", ratio " +
                      num(rec.ratio));
  return a;
}

void add_sweep(Artifacts& a, const SweepResult& s) {
  for (auto& r : s.records()) a.records.push_back(r);
  a.table = s.table();
  for (std::size_t i = 0; i < s.abscissas.size(); ++i)
    a.summary.push_back(num(s.abscissas[i]) + "  " + num(s.estimates[i].value));
  a.summary.push_back("fitted exponent " + num(s.fit.exponent) + ", residual " + num(s.fit.residual) +
                      (s.fit.reliable ? "" : " (unreliable)") + ", sup " + num(s.sup));
}

Artifacts do_truncation(const ExperimentConfig& c, const Registry& reg) {
  TruncationSweepOptions o;
  o.cutoffs = c.truncation.cutoffs;
  o.oversampling = c.truncation.oversampling;
  o.p = c.p;
  o.probes = c.probes;
  o.steps = c.steps;
  o.seed = c.seed;
  Artifacts a;
  add_sweep(a, truncation_sweep(reg.phase(c.phase, c.dimension), reg.symbol(c.symbol, c.dimension), o));
  return a;
}

Artifacts do_dispersive(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  const TimeDependentPhase phi = reg.phase_family(c.phase, c.dimension);
  const SymbolFamily fam = reg.symbol_family(c.symbol, c.dimension);
  DispersiveSweepOptions o;
  o.constant = c.dispersive.constant;
  o.waive_hypotheses = c.dispersive.waive;
  o.validation.ceiling = c.dispersive.ceiling;
  o.validation.sample_budget = c.dispersive.samples;
  o.validation.support_constant = c.dispersive.support_constant;
  o.validation.seed = c.seed;
  Artifacts a;
  std::optional<DispersivePhaseReport> rep;
  if (!o.waive_hypotheses) {
    rep = validate_dispersive(phi, fam, c.dispersive.t_grid, grid, cube, o.validation);
  }
  const SweepResult s = dispersive_sweep(phi, fam, c.dispersive.t_grid, grid, cube, o, rep ? &*rep : nullptr);
  if (rep) a.records.push_back(pairs_record("torusfio/dispersive-report/1", rep->records()));
  add_sweep(a, s);
  if (!s.bound_ok) a.summary.push_back("bound check FAILED");
  return a;
}

Artifacts do_gaussian(const ExperimentConfig& c, const Registry& reg) {
  const auto [grid, cube] = setup(c);
  const int m = c.gaussian.frequency;
  const std::string kind = c.gaussian.function;
  const auto f = PeriodicFunction::sample(grid, [&](const Coord& x) -> Complex {
    if (kind == "one") return 1.0;
    if (kind == "monomial") return unimodular(m * x[0]);
    return 1.0 + std::cos(kTwoPi * m * x[0]);
  });
  const Complex mean = forward_transform(f, cube).at({0, 0, 0});
  const auto terms = gaussian_limit(f, c.gaussian.eps, c.gaussian.window);

  Artifacts a;
  a.table.header = {"kind", "eps", "re", "im", "target_re", "target_im"};
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Record r("torusfio/gaussian-term/1");
    r.set("function", kind).set("eps", c.gaussian.eps[i]).set("re", terms[i].real()).set("im", terms[i].imag());
    r.set("limit_re", mean.real()).set("limit_im", mean.imag()).set("abs_diff", std::abs(terms[i] - mean));
    a.records.push_back(r);
    a.table.rows.push_back({"limit", num(c.gaussian.eps[i]), num(terms[i].real()), num(terms[i].imag()),
                            num(mean.real()), num(mean.imag())});
    a.summary.push_back("eps " + num(c.gaussian.eps[i]) + "  term " + num(terms[i].real()));
  }
  if (c.gaussian.pairing) {
    GaussianPairingConfig pc;
    pc.alpha = c.gaussian.pairing->alpha;
    pc.beta = c.gaussian.pairing->beta;
    pc.m = c.gaussian.pairing->m;
    pc.k = c.gaussian.pairing->k;
    pc.eps = c.gaussian.eps;
    pc.window_factor = c.gaussian.window;
    const PhaseFunction phi = reg.phase(c.phase, 1);
    const ContinuumSymbol sym = reg.continuum_symbol(c.symbol, 1);
    EuclideanFio T;
    T.phase = [phi](double x, double xi) { return phi.value({x, 0, 0}, {xi, 0, 0}); };
    T.symbol = [sym](double x, double xi) { return sym.eval({x, 0, 0}, {xi, 0, 0}); };
    T.symbol_x_independent = sym.x_independent;
    const auto vals = gaussian_pairing(T, pc);
    const auto A = FsoOperator::create(phi, reg.symbol(c.symbol, 1), grid, cube);
    const Complex target = pairing_target(A, pc);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      Record r("torusfio/gaussian-pairing/1");
      r.set("eps", pc.eps[i]).set("alpha", pc.alpha).set("beta", pc.beta).set("m", pc.m).set("k", pc.k);
      r.set("re", vals[i].real()).set("im", vals[i].imag()).set("target_re", target.real());
      r.set("target_im", target.imag()).set("abs_diff", std::abs(vals[i] - target));
      a.records.push_back(r);
      a.table.rows.push_back({"pairing", num(pc.eps[i]), num(vals[i].real()), num(vals[i].imag()),
                              num(target.real()), num(target.imag())});
      a.summary.push_back("eps " + num(pc.eps[i]) + "  pairing " + num(vals[i].real()) + " vs " + num(target.real()));
    }
  }
  return a;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Record manifest(const ExperimentConfig& c, const std::string& status) {
  Record m("torusfio/manifest/1");
  m.set("tool", "tfio").set("version", TFIO_VERSION).set("subcommand", c.subcommand);
  m.set("config_hash", c.hash()).set("seed", c.seed).set("status", status);
  m.set("fft_backend", fft_backend_version());
  m.set("eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                     std::to_string(EIGEN_MINOR_VERSION));
  m.set("random", "mt19937_64 streams seeded by splitmix64(seed, index); complex normal, top 25% kept");
  m.set("config", c.canonical());
  m.set("created", utc_now());
  return m;
}

}  // namespace

Artifacts execute(const ExperimentConfig& cfg, const Registry& reg) {
  const std::string& s = cfg.subcommand;
  if (s == "apply") return do_apply(cfg, reg);
  if (s == "analyze-symbol") return do_analyze(cfg, reg);
  if (s == "validate-phase") return do_validate_phase(cfg, reg);
  if (s == "estimate-norm") return do_estimate_norm(cfg, reg);
  if (s == "transference") return do_transference(cfg, reg);
  if (s == "truncation-sweep") return do_truncation(cfg, reg);
  if (s == "dispersive-sweep") return do_dispersive(cfg, reg);
  if (s == "gaussian-limit") return do_gaussian(cfg, reg);
  throw Error(ErrorKind::Config, "unknown subcommand '" + s + "'");
}

RunOutcome run(const ExperimentConfig& base, const RunOverrides& o, std::ostream& log, std::ostream& err) {
  ExperimentConfig cfg = base;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.output = *o.out;

  RunOutcome out;
  Registry reg = Registry::builtin();
  try {
    for (const auto& [name, poly] : cfg.trig_polynomials) reg.add_trig_polynomial(name, poly);
    cfg.validate(reg);
  } catch (const Error& e) {
    err << error_record(e.kind(), e.axis(), e.what()).to_json() << '\n';
    out.exit_code = exit_code_for(e.kind());
    return out;
  }
  if (cfg.threads > 0) set_threads(cfg.threads);

  const fs::path dir = fs::path(cfg.output) / cfg.subcommand / cfg.hash();
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    err << error_record(ErrorKind::Io, -1, e.what()).to_json() << '\n';
    out.exit_code = kExitConfig;
    return out;
  }
  out.run_dir = dir.string();

  auto fail = [&](ErrorKind kind, int axis, const std::string& msg, int code) {
    const Record r = error_record(kind, axis, msg);
    err << r.to_json() << '\n';
    try {
      write_atomic((dir / "records.jsonl").string(), r.to_json() + "\n");
      write_atomic((dir / "manifest.json").string(), manifest(cfg, "error").to_json() + "\n");
    } catch (...) {
    }
    out.exit_code = code;
  };

  try {
    const Artifacts a = execute(cfg, reg);
    for (const auto& [name, content] : a.files) write_atomic((dir / name).string(), content);
    write_atomic((dir / "records.jsonl").string(), to_jsonl(a.records));
    write_atomic((dir / "table.csv").string(), a.table.to_string());
    write_atomic((dir / "manifest.json").string(), manifest(cfg, "ok").to_json() + "\n");
    if (!o.quiet) {
      log << cfg.subcommand << " -> " << dir.string() << '\n';
      for (const auto& line : a.summary) log << "  " << line << '\n';
    }
  } catch (const Error& e) {
    fail(e.kind(), e.axis(), e.what(), exit_code_for(e.kind()));
  } catch (const std::bad_alloc&) {
    fail(ErrorKind::Resource, -1, "out of memory", kExitResource);
  } catch (const std::exception& e) {
    fail(ErrorKind::Numeric, -1, std::string("internal error: ") + e.what(), kExitInternal);
  }
  return out;
}

RunOutcome run_file(const std::string& path, const RunOverrides& o, std::ostream& log, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::load(path);
  } catch (const Error& e) {
    err << error_record(e.kind(), e.axis(), e.what()).to_json() << '\n';
    return {exit_code_for(e.kind()), {}};
  }
  return run(cfg, o, log, err);
}

}  // namespace tfio
