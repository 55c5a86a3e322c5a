#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "registry.hpp"

namespace tfio {

inline const std::vector<std::string> kSubcommands = {
    "apply",          "analyze-symbol",   "validate-phase",   "estimate-norm",
    "transference",   "truncation-sweep", "dispersive-sweep", "gaussian-limit"};

struct ApplyBlock {
  /// random | monomial | file
  std::string input = "random";
  std::vector<int> frequency;
  std::string path;
  /// cutoff of the random input; -1 uses the run cutoff
  int input_cutoff = -1;
};

struct SymbolClassBlock {
  std::optional<double> order;
  double rho = 1.0;
  double delta = 0.0;
  std::optional<int> max_alpha;
  std::optional<int> max_beta;
};

struct ValidationBlock {
  int samples = 1000;
  int spatial_ceiling = 3;
};

struct TruncationBlock {
  std::vector<int> cutoffs{4, 8, 16, 32};
  int oversampling = 4;
};

struct DispersiveBlock {
  std::vector<double> t_grid{1, 2, 4, 8};
  int ceiling = 2;
  double support_constant = 1.0;
  int samples = 256;
  bool waive = false;
  std::optional<double> constant;
};

struct PairingBlock {
  double alpha = 0.5;
  double beta = 0.5;
  int m = 1;
  int k = 1;
};

struct GaussianBlock {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double window = 6.0;
  /// one | monomial | one-plus-cosine
  std::string function = "one";
  int frequency = 1;
  std::optional<PairingBlock> pairing;
};

struct TransferenceBlock {
  double delta = 1e-2;
};

struct ExperimentConfig {
  std::string subcommand;
  int dimension = 1;
  int grid = 16;
  std::optional<int> cutoff;
  double p = 2.0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output = "tfio-runs";
  EntrySpec phase{"linear", {}, {}};
  EntrySpec symbol{"identity", {}, {}};
  int probes = 64;
  int steps = 20;

  ApplyBlock apply;
  SymbolClassBlock symbol_class;
  ValidationBlock validation;
  TruncationBlock truncation;
  DispersiveBlock dispersive;
  GaussianBlock gaussian;
  TransferenceBlock transference;
  std::map<std::string, TrigPolynomial> trig_polynomials;

  /// Parse YAML text; structural problems raise config errors.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// Registry lookups and value ranges; raises config errors.
  void validate(const Registry& reg) const;

  int effective_cutoff() const { return cutoff ? *cutoff : grid / 2 - 1; }

  /// Everything that affects results, in a fixed order. Output directory and
  /// thread count are excluded.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), hex
  std::string hash() const;
};

std::string fnv1a_hex(const std::string& s);

}  // namespace tfio
