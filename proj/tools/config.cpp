#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "torusfio/error.hpp"
#include "torusfio/operator_engine.hpp"

namespace tfio {

using torusfio::Error;
using torusfio::ErrorKind;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void only_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(where + " must be a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) fail("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail("'" + key + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail("'" + key + "' has an invalid value '" + n.Scalar() + "'");
  }
}

double real(const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    if (s == "inf" || s == "infinity") return torusfio::kInfinity;
  }
  return scalar<double>(n, key);
}

template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail("'" + key + "' must be a list");
  std::vector<T> v;
  for (const auto& e : n) v.push_back(scalar<T>(e, key));
  return v;
}

EntrySpec entry(const YAML::Node& n, const std::string& key) {
  EntrySpec e;
  if (n.IsScalar()) {
    e.name = n.Scalar();
    return e;
  }
  only_keys(n, key, {"name", "params"});
  if (!n["name"]) fail(key + " needs a name");
  e.name = scalar<std::string>(n["name"], key + ".name");
  if (const auto p = n["params"]) {
    if (!p.IsMap()) fail(key + ".params must be a mapping");
    for (const auto& kv : p) {
      const std::string k = kv.first.as<std::string>();
      if (!kv.second.IsScalar()) fail(key + ".params." + k + " must be a scalar");
      double v = 0.0;
      if (YAML::convert<double>::decode(kv.second, v))
        e.params[k] = v;
      else
        e.labels[k] = kv.second.Scalar();
    }
  }
  return e;
}

TrigPolynomial trig(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(key + " must be a list of terms");
  TrigPolynomial p;
  for (const auto& t : n) {
    only_keys(t, key, {"coeff", "q", "kind"});
    TrigTerm term;
    if (t["coeff"]) term.coeff = real(t["coeff"], key + ".coeff");
    if (!t["q"]) fail(key + " term needs q");
    const auto q = list<int>(t["q"], key + ".q");
    if (q.empty() || q.size() > 3) fail(key + ".q must have 1 to 3 entries");
    term.q = {0, 0, 0};
    for (std::size_t j = 0; j < q.size(); ++j) term.q[j] = q[j];
    if (t["kind"]) {
      const auto k = scalar<std::string>(t["kind"], key + ".kind");
      if (k != "cos" && k != "sin") fail(key + ".kind must be cos or sin");
      term.sine = k == "sin";
    }
    p.terms.push_back(term);
  }
  return p;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  only_keys(root, "config",
            {"subcommand", "dimension", "grid", "cutoff", "p", "seed", "threads", "output", "phase", "symbol",
             "probes", "steps", "apply", "symbol_class", "validation", "truncation", "dispersive", "gaussian",
             "transference", "trig_polynomials"});
  ExperimentConfig c;
  if (!root["subcommand"]) fail("config needs a subcommand");
  c.subcommand = scalar<std::string>(root["subcommand"], "subcommand");
  if (root["dimension"]) c.dimension = scalar<int>(root["dimension"], "dimension");
  if (root["grid"]) c.grid = scalar<int>(root["grid"], "grid");
  if (root["cutoff"]) c.cutoff = scalar<int>(root["cutoff"], "cutoff");
  if (root["p"]) c.p = real(root["p"], "p");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["threads"]) c.threads = scalar<int>(root["threads"], "threads");
  if (root["output"]) c.output = scalar<std::string>(root["output"], "output");
  if (root["phase"]) c.phase = entry(root["phase"], "phase");
  if (root["symbol"]) c.symbol = entry(root["symbol"], "symbol");
  if (root["probes"]) c.probes = scalar<int>(root["probes"], "probes");
  if (root["steps"]) c.steps = scalar<int>(root["steps"], "steps");

  if (const auto n = root["apply"]) {
    only_keys(n, "apply", {"input", "frequency", "path", "cutoff"});
    if (n["input"]) c.apply.input = scalar<std::string>(n["input"], "apply.input");
    if (n["frequency"]) c.apply.frequency = list<int>(n["frequency"], "apply.frequency");
    if (n["path"]) c.apply.path = scalar<std::string>(n["path"], "apply.path");
    if (n["cutoff"]) c.apply.input_cutoff = scalar<int>(n["cutoff"], "apply.cutoff");
  }
  if (const auto n = root["symbol_class"]) {
    only_keys(n, "symbol_class", {"order", "rho", "delta", "max_alpha", "max_beta"});
    if (n["order"]) c.symbol_class.order = real(n["order"], "symbol_class.order");
    if (n["rho"]) c.symbol_class.rho = real(n["rho"], "symbol_class.rho");
    if (n["delta"]) c.symbol_class.delta = real(n["delta"], "symbol_class.delta");
    if (n["max_alpha"]) c.symbol_class.max_alpha = scalar<int>(n["max_alpha"], "symbol_class.max_alpha");
    if (n["max_beta"]) c.symbol_class.max_beta = scalar<int>(n["max_beta"], "symbol_class.max_beta");
  }
  if (const auto n = root["validation"]) {
    only_keys(n, "validation", {"samples", "spatial_ceiling"});
    if (n["samples"]) c.validation.samples = scalar<int>(n["samples"], "validation.samples");
    if (n["spatial_ceiling"])
      c.validation.spatial_ceiling = scalar<int>(n["spatial_ceiling"], "validation.spatial_ceiling");
  }
  if (const auto n = root["truncation"]) {
    only_keys(n, "truncation", {"cutoffs", "oversampling"});
    if (n["cutoffs"]) c.truncation.cutoffs = list<int>(n["cutoffs"], "truncation.cutoffs");
    if (n["oversampling"]) c.truncation.oversampling = scalar<int>(n["oversampling"], "truncation.oversampling");
  }
  if (const auto n = root["dispersive"]) {
    only_keys(n, "dispersive", {"t_grid", "ceiling", "support_constant", "samples", "waive", "constant"});
    if (n["t_grid"]) c.dispersive.t_grid = list<double>(n["t_grid"], "dispersive.t_grid");
    if (n["ceiling"]) c.dispersive.ceiling = scalar<int>(n["ceiling"], "dispersive.ceiling");
    if (n["support_constant"])
      c.dispersive.support_constant = real(n["support_constant"], "dispersive.support_constant");
    if (n["samples"]) c.dispersive.samples = scalar<int>(n["samples"], "dispersive.samples");
    if (n["waive"]) c.dispersive.waive = scalar<bool>(n["waive"], "dispersive.waive");
    if (n["constant"]) c.dispersive.constant = real(n["constant"], "dispersive.constant");
  }
  if (const auto n = root["gaussian"]) {
    only_keys(n, "gaussian", {"eps", "window", "function", "frequency", "pairing"});
    if (n["eps"]) c.gaussian.eps = list<double>(n["eps"], "gaussian.eps");
    if (n["window"]) c.gaussian.window = real(n["window"], "gaussian.window");
    if (n["function"]) c.gaussian.function = scalar<std::string>(n["function"], "gaussian.function");
    if (n["frequency"]) c.gaussian.frequency = scalar<int>(n["frequency"], "gaussian.frequency");
    if (const auto q = n["pairing"]) {
      only_keys(q, "gaussian.pairing", {"alpha", "beta", "m", "k"});
      PairingBlock b;
      if (q["alpha"]) b.alpha = real(q["alpha"], "gaussian.pairing.alpha");
      if (q["beta"]) b.beta = real(q["beta"], "gaussian.pairing.beta");
      if (q["m"]) b.m = scalar<int>(q["m"], "gaussian.pairing.m");
      if (q["k"]) b.k = scalar<int>(q["k"], "gaussian.pairing.k");
      c.gaussian.pairing = b;
    }
  }
  if (const auto n = root["transference"]) {
    only_keys(n, "transference", {"delta"});
    if (n["delta"]) c.transference.delta = real(n["delta"], "transference.delta");
  }
  if (const auto n = root["trig_polynomials"]) {
    if (!n.IsMap()) fail("trig_polynomials must be a mapping of name to terms");
    for (const auto& kv : n) {
      const std::string name = kv.first.as<std::string>();
      c.trig_polynomials[name] = trig(kv.second, "trig_polynomials." + name);
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::validate(const Registry& reg) const {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
    fail("unknown subcommand '" + subcommand + "'");
  if (dimension < 1 || dimension > 3) fail("dimension must be 1, 2 or 3");
  if (grid < 4 || grid % 2 != 0) fail("grid must be even and at least 4");
  const int Xi = effective_cutoff();
  if (Xi < 1 || Xi > grid / 2 - 1) fail("cutoff must lie in 1..grid/2-1");
  if (!(p >= 1.0)) fail("p must be at least 1");
  if (threads < 0) fail("threads must be nonnegative");
  if (probes < 32) fail("probes must be at least 32");
  if (steps < 0) fail("steps must be nonnegative");
  if (output.empty()) fail("output directory must not be empty");

  // registry entries resolve with their parameters
  if (!reg.find_phase(phase.name)) fail("unknown phase '" + phase.name + "'");
  if (!reg.find_symbol(symbol.name)) fail("unknown symbol '" + symbol.name + "'");
  const auto& pe = *reg.find_phase(phase.name);
  const auto& se = *reg.find_symbol(symbol.name);
  reg.resolve(pe, phase);
  reg.resolve_labels(pe, phase);
  reg.resolve(se, symbol);

  const std::string& s = subcommand;
  if (s == "apply") {
    const auto& a = apply;
    if (a.input != "random" && a.input != "monomial" && a.input != "file")
      fail("apply.input must be random, monomial or file");
    if (a.input == "monomial") {
      if (static_cast<int>(a.frequency.size()) != dimension) fail("apply.frequency needs one entry per axis");
      for (int f : a.frequency)
        if (std::abs(f) > Xi) fail("apply.frequency must lie in the cube");
    }
    if (a.input == "file" && a.path.empty()) fail("apply.path is required for file input");
    if (a.input_cutoff > Xi) fail("apply.cutoff exceeds the run cutoff");
  } else if (s == "analyze-symbol") {
    if (!(symbol_class.rho >= 0.0 && symbol_class.rho <= 1.0)) fail("symbol_class.rho must lie in [0, 1]");
    if (!(symbol_class.delta >= 0.0 && symbol_class.delta <= 1.0)) fail("symbol_class.delta must lie in [0, 1]");
    if (symbol_class.max_alpha && (*symbol_class.max_alpha < 0 || *symbol_class.max_alpha > 8))
      fail("symbol_class.max_alpha must lie in 0..8");
    if (symbol_class.max_beta && (*symbol_class.max_beta < 0 || *symbol_class.max_beta > 3))
      fail("symbol_class.max_beta must lie in 0..3");
  } else if (s == "validate-phase") {
    if (validation.samples < 1) fail("validation.samples must be positive");
    if (validation.spatial_ceiling < 1 || validation.spatial_ceiling > 3)
      fail("validation.spatial_ceiling must lie in 1..3");
  } else if (s == "transference") {
    if (dimension != 1) fail("transference runs in dimension 1");
    if (!se.continuum) fail("symbol '" + symbol.name + "' has no continuum form");
    if (!(transference.delta > 0.0 && transference.delta < 1.0)) fail("transference.delta must lie in (0, 1)");
  } else if (s == "truncation-sweep") {
    if (!se.x_independent) fail("truncation-sweep needs an x-independent symbol");
    const auto& c = truncation.cutoffs;
    if (c.size() < 3) fail("truncation.cutoffs needs at least 3 entries");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] < 1) fail("truncation.cutoffs must be positive");
      if (i > 0 && c[i] <= c[i - 1]) fail("truncation.cutoffs must be strictly increasing");
    }
    if (truncation.oversampling < 2) fail("truncation.oversampling must be at least 2");
  } else if (s == "dispersive-sweep") {
    if (!pe.family) fail("dispersive-sweep needs a dispersive phase family");
    if (!se.family) fail("dispersive-sweep needs a dispersive symbol family");
    const auto& t = dispersive.t_grid;
    if (t.empty()) fail("dispersive.t_grid must not be empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] >= 1.0)) fail("dispersive.t_grid values must be at least 1");
      if (i > 0 && !(t[i] > t[i - 1])) fail("dispersive.t_grid must be strictly increasing");
    }
    if (dispersive.ceiling < 1) fail("dispersive.ceiling must be positive");
    if (!(dispersive.support_constant > 0.0)) fail("dispersive.support_constant must be positive");
    if (dispersive.samples < 1) fail("dispersive.samples must be positive");
    if (std::pow(grid, dimension) > static_cast<double>(torusfio::kMaxDenseNodes))
      fail("dispersive-sweep grid exceeds the dense assembly limit of 4096 nodes");
  } else if (s == "gaussian-limit") {
    const auto& e = gaussian.eps;
    if (e.empty()) fail("gaussian.eps must not be empty");
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!(e[i] > 0.0)) fail("gaussian.eps values must be positive");
      if (i > 0 && !(e[i] < e[i - 1])) fail("gaussian.eps must be strictly decreasing");
    }
    if (!(gaussian.window > 0.0)) fail("gaussian.window must be positive");
    const auto& f = gaussian.function;
    if (f != "one" && f != "monomial" && f != "one-plus-cosine")
      fail("gaussian.function must be one, monomial or one-plus-cosine");
    if (std::abs(gaussian.frequency) > Xi) fail("gaussian.frequency must lie in the cube");
    if (gaussian.pairing) {
      const auto& q = *gaussian.pairing;
      if (dimension != 1) fail("gaussian.pairing runs in dimension 1");
      if (!(q.alpha > 0.0 && q.beta > 0.0) || q.alpha + q.beta != 1.0)
        fail("gaussian.pairing needs alpha, beta > 0 with alpha + beta = 1");
      if (std::abs(q.m) > Xi || std::abs(q.k) > Xi) fail("gaussian.pairing frequencies must lie in the cube");
      if (!se.continuum) fail("symbol '" + symbol.name + "' has no continuum form");
    }
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  auto spec = [&](const char* key, const EntrySpec& e) {
    o << key << ".name=" << e.name << '\n';
    for (const auto& [k, v] : e.params) o << key << ".params." << k << '=' << num(v) << '\n';
    for (const auto& [k, v] : e.labels) o << key << ".labels." << k << '=' << v << '\n';
  };
  o << "subcommand=" << subcommand << '\n'
    << "dimension=" << dimension << '\n'
    << "grid=" << grid << '\n'
    << "cutoff=" << effective_cutoff() << '\n'
    << "p=" << num(p) << '\n'
    << "seed=" << seed << '\n'
    << "probes=" << probes << '\n'
    << "steps=" << steps << '\n';
  spec("phase", phase);
  spec("symbol", symbol);
  const std::string& s = subcommand;
  if (s == "apply") {
    o << "apply.input=" << apply.input << '\n' << "apply.frequency=";
    for (int f : apply.frequency) o << f << ',';
    o << '\n' << "apply.path=" << apply.path << '\n' << "apply.cutoff=" << apply.input_cutoff << '\n';
  } else if (s == "analyze-symbol") {
    o << "symbol_class.order=" << (symbol_class.order ? num(*symbol_class.order) : "-") << '\n'
      << "symbol_class.rho=" << num(symbol_class.rho) << '\n'
      << "symbol_class.delta=" << num(symbol_class.delta) << '\n'
      << "symbol_class.max_alpha=" << (symbol_class.max_alpha ? std::to_string(*symbol_class.max_alpha) : "-") << '\n'
      << "symbol_class.max_beta=" << (symbol_class.max_beta ? std::to_string(*symbol_class.max_beta) : "-") << '\n';
  } else if (s == "validate-phase") {
    o << "validation.samples=" << validation.samples << '\n'
      << "validation.spatial_ceiling=" << validation.spatial_ceiling << '\n';
  } else if (s == "transference") {
    o << "transference.delta=" << num(transference.delta) << '\n';
  } else if (s == "truncation-sweep") {
    o << "truncation.cutoffs=";
    for (int c : truncation.cutoffs) o << c << ',';
    o << '\n' << "truncation.oversampling=" << truncation.oversampling << '\n';
  } else if (s == "dispersive-sweep") {
    o << "dispersive.t_grid=";
    for (double t : dispersive.t_grid) o << num(t) << ',';
    o << '\n'
      << "dispersive.ceiling=" << dispersive.ceiling << '\n'
      << "dispersive.support_constant=" << num(dispersive.support_constant) << '\n'
      << "dispersive.samples=" << dispersive.samples << '\n'
      << "dispersive.waive=" << dispersive.waive << '\n'
      << "dispersive.constant=" << (dispersive.constant ? num(*dispersive.constant) : "-") << '\n';
  } else if (s == "gaussian-limit") {
    o << "gaussian.eps=";
    for (double e : gaussian.eps) o << num(e) << ',';
    o << '\n'
      << "gaussian.window=" << num(gaussian.window) << '\n'
      << "gaussian.function=" << gaussian.function << '\n'
      << "gaussian.frequency=" << gaussian.frequency << '\n';
    if (gaussian.pairing)
      o << "gaussian.pairing=" << num(gaussian.pairing->alpha) << ',' << num(gaussian.pairing->beta) << ','
        << gaussian.pairing->m << ',' << gaussian.pairing->k << '\n';
  }
  for (const auto& [name, poly] : trig_polynomials) {
    o << "trig." << name << '=';
    for (const auto& t : poly.terms)
      o << num(t.coeff) << ':' << t.q[0] << ',' << t.q[1] << ',' << t.q[2] << ':' << (t.sine ? "sin" : "cos") << ';';
    o << '\n';
  }
  return o.str();
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

}  // namespace tfio
