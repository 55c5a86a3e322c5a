#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "config.hpp"
#include "registry.hpp"
#include "runner.hpp"
#include "torusfio/columnar_io.hpp"
#include "torusfio/error.hpp"

namespace fs = std::filesystem;
using tfio::ExperimentConfig;
using tfio::Registry;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "tfio-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

struct Ran {
  tfio::RunOutcome outcome;
  std::string log, err;
};

Ran run_text(const std::string& yaml, const fs::path& out, std::optional<std::uint64_t> seed = {}) {
  Ran r;
  std::ostringstream log, err;
  tfio::RunOverrides o;
  o.out = out.string();
  o.seed = seed;
  try {
    r.outcome = tfio::run(ExperimentConfig::parse(yaml), o, log, err);
  } catch (const torusfio::Error& e) {
    r.outcome.exit_code = tfio::exit_code_for(e.kind());
    err << e.what();
  }
  r.log = log.str();
  r.err = err.str();
  return r;
}

int run_exe(const std::string& args) {
  const std::string cmd = std::string(TFIO_EXE) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// required fields per record schema
const std::map<std::string, std::vector<std::string>>& schemas() {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"torusfio/manifest/1", {"tool", "version", "subcommand", "config_hash", "seed", "status", "fft_backend", "eigen",
                               "random", "config", "created"}},
      {"torusfio/error/1", {"kind", "message", "exit_code"}},
      {"torusfio/apply/1", {"phase", "symbol", "path", "input_l2", "output_l2", "max_abs_change"}},
      {"torusfio/seminorm/1", {"alpha", "beta", "value"}},
      {"torusfio/symbol-analysis/1", {"symbol", "order", "rho", "delta", "max_alpha", "max_beta", "max_seminorm"}},
      {"torusfio/phase-report/1", {"phase", "seed", "periodicity_ok", "det_lower_bound", "det_upper_bound",
                                   "separation_constant"}},
      {"torusfio/norm-estimate/1", {"p", "value", "method", "direction", "probes", "seed", "steps"}},
      {"torusfio/frozen-bound/1", {"p", "measured_norm", "sobolev_bound", "slack", "max_order"}},
      {"torusfio/transference/1", {"p", "euclid_norm_lb", "torus_norm_lb", "ratio", "delta", "probes", "seed"}},
      {"torusfio/sweep-point/1", {"kind", "abscissa", "estimate", "method", "direction", "p", "seed"}},
      {"torusfio/sweep-summary/1", {"kind", "phase", "symbol", "p", "points", "fitted_exponent", "residual",
                                    "reliable", "sup"}},
      {"torusfio/dispersive-report/1", {"phase", "symbol", "ceiling", "support_constant"}},
      {"torusfio/gaussian-term/1", {"function", "eps", "re", "im", "limit_re", "abs_diff"}},
      {"torusfio/gaussian-pairing/1", {"eps", "alpha", "beta", "m", "k", "re", "im", "target_re", "abs_diff"}},
  };
  return s;
}

void check_schema(const nlohmann::json& j) {
  ASSERT_TRUE(j.is_object());
  ASSERT_TRUE(j.contains("schema"));
  const std::string s = j["schema"];
  EXPECT_TRUE(std::regex_match(s, std::regex("torusfio/[a-z-]+/[0-9]+"))) << s;
  const auto it = schemas().find(s);
  ASSERT_NE(it, schemas().end()) << "undocumented schema " << s;
  for (const auto& k : it->second) EXPECT_TRUE(j.contains(k)) << s << " lacks " << k;
}

void check_run_dir(const fs::path& dir) {
  ASSERT_TRUE(fs::exists(dir / "manifest.json"));
  ASSERT_TRUE(fs::exists(dir / "records.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "table.csv"));
  check_schema(nlohmann::json::parse(slurp(dir / "manifest.json")));
  std::istringstream rec(slurp(dir / "records.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(rec, line)) {
    check_schema(nlohmann::json::parse(line));
    ++n;
  }
  EXPECT_GT(n, 0);
  const std::string csv = slurp(dir / "table.csv");
  ASSERT_FALSE(csv.empty());
  EXPECT_EQ(csv.back(), '\n');
  // header plus rows with a constant column count
  std::istringstream rows(csv);
  std::getline(rows, line);
  const auto cols = std::count(line.begin(), line.end(), ',');
  while (std::getline(rows, line)) {
    if (line.find('"') == std::string::npos) {
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), cols) << line;
    }
  }
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(ExperimentConfig::parse("subcommand: apply\ngird: 16\n"), torusfio::Error);
  EXPECT_THROW(ExperimentConfig::parse("subcommand: apply\napply: {inptu: random}\n"), torusfio::Error);
  EXPECT_THROW(ExperimentConfig::parse("subcommand: apply\nphase: {name: linear, param: {}}\n"), torusfio::Error);
  EXPECT_THROW(ExperimentConfig::parse("grid: 16\n"), torusfio::Error);
  EXPECT_THROW(ExperimentConfig::parse("subcommand: [apply\n"), torusfio::Error);
}

TEST(Config, ValidationRejectsBadValues) {
  const Registry reg = Registry::builtin();
  auto bad = [&](const std::string& y) {
    const auto c = ExperimentConfig::parse(y);
    EXPECT_THROW(c.validate(reg), torusfio::Error) << y;
  };
  bad("subcommand: frobnicate\n");
  bad("subcommand: apply\ndimension: 4\n");
  bad("subcommand: apply\ngrid: 16\ncutoff: 8\n");
  bad("subcommand: apply\nphase: teleport\n");
  bad("subcommand: apply\nsymbol: {name: bracket-power, params: {kapa: 1}}\n");
  bad("subcommand: estimate-norm\np: 0.5\n");
  bad("subcommand: truncation-sweep\ntruncation: {cutoffs: [8, 4, 16]}\n");
  bad("subcommand: gaussian-limit\ngaussian: {eps: [0.01, 0.1]}\n");
  bad("subcommand: validate-phase\nphase: {name: perturbed, params: {psi: nosuch}}\n");
  EXPECT_NO_THROW(ExperimentConfig::parse("subcommand: estimate-norm\np: inf\n").validate(reg));
}

TEST(Config, HashCoversResultsOnly) {
  const auto a = ExperimentConfig::parse("subcommand: apply\nseed: 3\n");
  auto b = a;
  b.output = "elsewhere";
  b.threads = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 4;
  EXPECT_NE(a.hash(), b.hash());
  const auto c = ExperimentConfig::parse("subcommand: apply\nseed: 3\nsymbol: {name: bracket-power, params: {kappa: 0}}\n");
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(tfio::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(tfio::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, ShippedConfigsValidate) {
  const Registry reg = Registry::builtin();
  int n = 0;
  for (const auto& e : fs::directory_iterator(TFIO_CONFIG_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    const auto c = ExperimentConfig::load(e.path().string());
    Registry r = reg;
    for (const auto& [name, poly] : c.trig_polynomials) r.add_trig_polynomial(name, poly);
    EXPECT_NO_THROW(c.validate(r)) << e.path();
    ++n;
  }
  EXPECT_GE(n, 8);
}

TEST(Registry, ListingAndFilter) {
  const Registry reg = Registry::builtin();
  EXPECT_GE(reg.phases().size(), 4u);
  EXPECT_GE(reg.symbols().size(), 5u);
  const std::string all = reg.listing("");
  EXPECT_NE(all.find("half-wave"), std::string::npos);
  std::istringstream in(reg.listing("dispersive"));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find("dispersive"), std::string::npos) << line;
    ++n;
  }
  EXPECT_GE(n, 2);
  EXPECT_EQ(reg.listing("no-such-entry-anywhere"), "");
}

TEST(Registry, EntriesCarryAnalyticDerivatives) {
  const Registry reg = Registry::builtin();
  for (const auto& p : reg.phases()) {
    const auto phi = p.build(1, p.defaults, p.label_defaults, reg);
    EXPECT_TRUE(static_cast<bool>(phi.grad_xi)) << p.name;
    EXPECT_TRUE(static_cast<bool>(phi.grad_x)) << p.name;
    EXPECT_TRUE(static_cast<bool>(phi.mixed_hessian)) << p.name;
  }
  for (const auto& s : reg.symbols()) {
    const auto a = s.lattice(1, s.defaults);
    EXPECT_TRUE(a.has_x_derivative()) << s.name;
  }
}

TEST(Registry, TrigPolynomialDerivatives) {
  tfio::TrigPolynomial p{{{2.0, {1, 0, 0}, false}, {0.5, {0, 2, 0}, true}}};
  const torusfio::Coord x{0.1, 0.3, 0};
  const double tau = 2.0 * 3.14159265358979323846;
  EXPECT_NEAR(p.value(x, 2), 2.0 * std::cos(tau * 0.1) + 0.5 * std::sin(tau * 0.6), 1e-14);
  EXPECT_NEAR(p.derivative(x, {1, 0, 0}, 2), -2.0 * tau * std::sin(tau * 0.1), 1e-12);
  EXPECT_NEAR(p.derivative(x, {0, 2, 0}, 2), -0.5 * 4 * tau * tau * std::sin(tau * 0.6), 1e-10);
  EXPECT_NEAR(p.derivative(x, {1, 1, 0}, 2), 0.0, 1e-14);
}

TEST(Runner, ApplyWithIdentityReproducesInput) {
  TempDir t;
  const auto r = run_text("subcommand: apply\ngrid: 32\nphase: linear\nsymbol: identity\n", t.path());
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  const fs::path dir = r.outcome.run_dir;
  check_run_dir(dir);
  std::ifstream fi(dir / "input.txt"), fo(dir / "output.txt");
  const auto in = torusfio::read_function(fi);
  const auto out = torusfio::read_function(fo);
  for (std::size_t k = 0; k < in.values.size(); ++k) EXPECT_NEAR(std::abs(in.values[k] - out.values[k]), 0.0, 1e-10);
}

TEST(Runner, ApplyReadsInputFile) {
  TempDir t;
  const torusfio::TorusGrid g(1, 16);
  auto f = torusfio::PeriodicFunction::sample(g, [](const torusfio::Coord& x) { return torusfio::unimodular(2 * x[0]); });
  {
    std::ofstream o(t.path() / "f.txt");
    torusfio::write_function(o, f);
  }
  const auto r = run_text("subcommand: apply\ngrid: 16\nphase: {name: translation, params: {v1: 0.25}}\n"
                          "apply: {input: file, path: " + (t.path() / "f.txt").string() + "}\n",
                          t.path() / "runs");
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  std::ifstream fo(fs::path(r.outcome.run_dir) / "output.txt");
  const auto out = torusfio::read_function(fo);
  // e^{2 pi i 2 (x + 1/4)} = -e^{4 pi i x}
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(std::abs(out.values[k] + f.values[k]), 0.0, 1e-12);
}

TEST(Runner, ValidatePhaseHalfWave) {
  TempDir t;
  const auto r = run_text("subcommand: validate-phase\ngrid: 16\nphase: half-wave\n", t.path());
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  check_run_dir(r.outcome.run_dir);
  const auto j = nlohmann::json::parse(slurp(fs::path(r.outcome.run_dir) / "records.jsonl"));
  EXPECT_NEAR(j["det_lower_bound"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["separation_constant"].get<double>(), 1.0, 1e-9);
  EXPECT_TRUE(j["periodicity_ok"].get<bool>());
}

TEST(Runner, EverySubcommandWritesValidSchemas) {
  TempDir t;
  const std::vector<std::string> configs = {
      "subcommand: apply\ngrid: 16\nphase: half-wave\nsymbol: cosine-modulated\napply: {input: monomial, frequency: [2]}\n",
      "subcommand: analyze-symbol\ngrid: 8\ncutoff: 3\nsymbol: smoothed-sign\n",
      "subcommand: validate-phase\ndimension: 2\ngrid: 8\nphase: perturbed\n",
      "subcommand: estimate-norm\ngrid: 16\np: 3\nprobes: 32\nsymbol: cosine-modulated\n",
      "subcommand: transference\ngrid: 16\ncutoff: 3\np: 2\nprobes: 32\nsymbol: smoothed-sign\n",
      "subcommand: truncation-sweep\ndimension: 1\np: 4\nprobes: 32\nphase: half-wave\n"
      "truncation: {cutoffs: [2, 4, 8]}\n",
      "subcommand: dispersive-sweep\ngrid: 16\nphase: dispersive-wave\nsymbol: dispersive-cutoff\n"
      "dispersive: {t_grid: [1, 2, 4]}\n",
      "subcommand: gaussian-limit\ngrid: 16\nsymbol: {name: bracket-power, params: {kappa: -1}}\n"
      "gaussian: {function: monomial, frequency: 1, eps: [0.1, 0.01], pairing: {m: 1, k: 1}}\n",
  };
  std::set<std::string> seen;
  for (const auto& y : configs) {
    const auto r = run_text(y, t.path());
    ASSERT_EQ(r.outcome.exit_code, 0) << y << r.err;
    check_run_dir(r.outcome.run_dir);
    seen.insert(fs::path(r.outcome.run_dir).parent_path().filename().string());
  }
  EXPECT_EQ(seen.size(), tfio::kSubcommands.size());
}

TEST(Runner, TruncationSweepTableShape) {
  TempDir t;
  const auto r = run_text("subcommand: truncation-sweep\ndimension: 1\np: 4\nprobes: 32\nphase: half-wave\n"
                          "truncation: {cutoffs: [2, 4, 8, 16]}\n",
                          t.path());
  ASSERT_EQ(r.outcome.exit_code, 0) << r.err;
  std::istringstream csv(slurp(fs::path(r.outcome.run_dir) / "table.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "abscissa,estimate,method,seed,fitted_exponent");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    // 17 significant digits for the estimate
    const auto a = line.find(','), b = line.find(',', a + 1);
    const std::string est = line.substr(a + 1, b - a - 1);
    EXPECT_EQ(std::stod(est), std::stod(est));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::stod(est));
    EXPECT_EQ(est, buf);
  }
  EXPECT_EQ(rows, 4);
}

TEST(Runner, RerunsAreByteIdentical) {
  TempDir t;
  const std::string y = "subcommand: truncation-sweep\ndimension: 2\np: 4\nprobes: 32\nphase: half-wave\n"
                        "truncation: {cutoffs: [2, 3, 4]}\n";
  const auto a = run_text(y, t.path() / "a");
  const auto b = run_text(y, t.path() / "b");
  ASSERT_EQ(a.outcome.exit_code, 0);
  ASSERT_EQ(b.outcome.exit_code, 0);
  EXPECT_EQ(slurp(fs::path(a.outcome.run_dir) / "table.csv"), slurp(fs::path(b.outcome.run_dir) / "table.csv"));
  EXPECT_EQ(slurp(fs::path(a.outcome.run_dir) / "records.jsonl"), slurp(fs::path(b.outcome.run_dir) / "records.jsonl"));
  const auto c = run_text(y, t.path() / "c", 99);
  EXPECT_NE(fs::path(c.outcome.run_dir).filename(), fs::path(a.outcome.run_dir).filename());
}

TEST(Runner, ErrorsBecomeRecordsAndExitCodes) {
  TempDir t;
  // non-periodic phase without waiver: domain error, exit 3
  const auto r = run_text("subcommand: apply\ngrid: 16\nphase: nonperiodic\n", t.path());
  EXPECT_EQ(r.outcome.exit_code, 3);
  const auto j = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  check_schema(j);
  EXPECT_EQ(j["kind"], "domain");
  check_schema(nlohmann::json::parse(slurp(fs::path(r.outcome.run_dir) / "records.jsonl")));

  const auto c = run_text("subcommand: apply\ngrid: 16\ncutoff: 12\n", t.path());
  EXPECT_EQ(c.outcome.exit_code, 2);
  EXPECT_TRUE(c.outcome.run_dir.empty());

  // dense dispersive sweep past the node limit: resource
  const auto big = run_text("subcommand: dispersive-sweep\ndimension: 2\ngrid: 128\nphase: dispersive-wave\n"
                            "symbol: dispersive-cutoff\n",
                            t.path());
  EXPECT_TRUE(big.outcome.exit_code == 2 || big.outcome.exit_code == 4) << big.err;
}

TEST(Runner, ExitCodeMapping) {
  using torusfio::ErrorKind;
  EXPECT_EQ(tfio::exit_code_for(ErrorKind::Config), 2);
  EXPECT_EQ(tfio::exit_code_for(ErrorKind::Resource), 4);
  EXPECT_EQ(tfio::exit_code_for(ErrorKind::Numeric), 3);
  EXPECT_EQ(tfio::exit_code_for(ErrorKind::Domain), 3);
}

TEST(Executable, FlagsAndExitCodes) {
  TempDir t;
  const fs::path cfg = t.path() / "c.yaml";
  {
    std::ofstream o(cfg);
    o << "subcommand: estimate-norm\ngrid: 8\nprobes: 32\n";
  }
  EXPECT_EQ(run_exe("--config " + cfg.string() + " --out " + (t.path() / "o").string() + " --quiet --seed 5 --threads 1"), 0);
  EXPECT_EQ(run_exe("run --config " + cfg.string() + " --out " + (t.path() / "o").string()), 0);
  EXPECT_EQ(run_exe("list"), 0);
  EXPECT_EQ(run_exe("list nothing-matches-this"), 0);
  EXPECT_EQ(run_exe("--config " + (t.path() / "missing.yaml").string()), 2);
  EXPECT_EQ(run_exe("--bogus-flag"), 2);
  {
    std::ofstream o(cfg);
    o << "subcommand: estimate-norm\nunknown: 1\n";
  }
  EXPECT_EQ(run_exe("--config " + cfg.string() + " --out " + (t.path() / "o").string()), 2);
  // the seed override lands in the manifest
  int found = 0;
  for (const auto& e : fs::recursive_directory_iterator(t.path() / "o"))
    if (e.path().filename() == "manifest.json") {
      const auto j = nlohmann::json::parse(slurp(e.path()));
      if (j["seed"] == 5) ++found;
    }
  EXPECT_EQ(found, 1);
}

}  // namespace
