#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "torusfio/phase_toolkit.hpp"
#include "torusfio/symbol_calculus.hpp"

namespace tfio {

using torusfio::ParamMap;

/// sum_r c_r cos(2 pi q_r.x) or sin(2 pi q_r.x)
struct TrigTerm {
  double coeff = 1.0;
  torusfio::Index q{1, 0, 0};
  bool sine = false;
};

struct TrigPolynomial {
  std::vector<TrigTerm> terms;

  double value(const torusfio::Coord& x, int dim) const;
  double derivative(const torusfio::Coord& x, const torusfio::Index& alpha, int dim) const;
  /// max over terms of sum |c| 2 pi |q|, a bound for |grad psi|
  double gradient_bound(int dim) const;
};

struct EntrySpec {
  std::string name;
  ParamMap params;
  /// string-valued parameters, e.g. the perturbation profile name
  std::map<std::string, std::string> labels;
};

class Registry;

struct PhaseEntry {
  std::string name;
  std::string summary;
  /// which hypotheses the entry is designed to satisfy or violate
  std::string hypotheses;
  std::vector<std::string> tags;
  ParamMap defaults;
  std::map<std::string, std::string> label_defaults;
  /// full phase on the torus; dispersive entries give x.xi + t phi(t, x, xi)
  std::function<torusfio::PhaseFunction(int dim, const ParamMap&, const std::map<std::string, std::string>&,
                                        const Registry&)>
      build;
  /// set for the time-dependent families
  std::function<torusfio::TimeDependentPhase(int dim, const ParamMap&)> family;
};

struct SymbolEntry {
  std::string name;
  std::string summary;
  std::string hypotheses;
  std::vector<std::string> tags;
  ParamMap defaults;
  bool x_independent = true;
  std::function<torusfio::LatticeSymbol(int dim, const ParamMap&)> lattice;
  std::function<torusfio::ContinuumSymbol(int dim, const ParamMap&)> continuum;
  std::function<torusfio::SymbolFamily(int dim, const ParamMap&)> family;
};

class Registry {
 public:
  static Registry builtin();

  void add_trig_polynomial(const std::string& name, TrigPolynomial p);
  const TrigPolynomial& trig_polynomial(const std::string& name) const;
  std::vector<std::string> trig_polynomial_names() const;

  const std::vector<PhaseEntry>& phases() const { return phases_; }
  const std::vector<SymbolEntry>& symbols() const { return symbols_; }
  const PhaseEntry* find_phase(const std::string& name) const;
  const SymbolEntry* find_symbol(const std::string& name) const;

  /// Defaults merged with the overrides; unknown keys raise a config error.
  ParamMap resolve(const PhaseEntry& e, const EntrySpec& s) const;
  ParamMap resolve(const SymbolEntry& e, const EntrySpec& s) const;
  std::map<std::string, std::string> resolve_labels(const PhaseEntry& e, const EntrySpec& s) const;

  torusfio::PhaseFunction phase(const EntrySpec& s, int dim) const;
  torusfio::TimeDependentPhase phase_family(const EntrySpec& s, int dim) const;
  torusfio::LatticeSymbol symbol(const EntrySpec& s, int dim) const;
  torusfio::ContinuumSymbol continuum_symbol(const EntrySpec& s, int dim) const;
  torusfio::SymbolFamily symbol_family(const EntrySpec& s, int dim) const;

  /// Entries whose name or tags contain `filter`; one line per entry.
  std::string listing(const std::string& filter) const;

 private:
  std::vector<PhaseEntry> phases_;
  std::vector<SymbolEntry> symbols_;
  std::map<std::string, TrigPolynomial> trig_;
};

}  // namespace tfio
