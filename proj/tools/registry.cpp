#include "registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "torusfio/error.hpp"

namespace tfio {

using namespace torusfio;

double TrigPolynomial::value(const Coord& x, int dim) const {
  double s = 0.0;
  for (const auto& t : terms) {
    bool active = true;
    for (int j = dim; j < kMaxDim; ++j) active = active && t.q[j] == 0;
    if (!active) continue;
    double th = 0.0;
    for (int j = 0; j < dim; ++j) th += t.q[j] * x[j];
    th = kTwoPi * std::fmod(th, 1.0);
    s += t.coeff * (t.sine ? std::sin(th) : std::cos(th));
  }
  return s;
}

double TrigPolynomial::derivative(const Coord& x, const Index& alpha, int dim) const {
  const int k = total_order(alpha, dim);
  double s = 0.0;
  for (const auto& t : terms) {
    bool active = true;
    for (int j = dim; j < kMaxDim; ++j) active = active && t.q[j] == 0;
    if (!active) continue;
    double f = t.coeff;
    for (int j = 0; j < dim; ++j) f *= std::pow(kTwoPi * t.q[j], alpha[j]);
    if (f == 0.0) continue;
    double th = 0.0;
    for (int j = 0; j < dim; ++j) th += t.q[j] * x[j];
    // d^k/dth^k cos th = cos(th + k pi/2), same for sin
    th = kTwoPi * std::fmod(th, 1.0) + 0.5 * kPi * k;
    s += f * (t.sine ? std::sin(th) : std::cos(th));
  }
  return s;
}

double TrigPolynomial::gradient_bound(int dim) const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.coeff) * kTwoPi * euclidean_norm(t.q, dim);
  return s;
}

namespace {

using Labels = std::map<std::string, std::string>;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Matrix identity_matrix() {
  Matrix m{};
  for (int i = 0; i < kMaxDim; ++i) m[i][i] = 1.0;
  return m;
}

Coord unit(const Coord& xi, int dim) {
  const double r = euclidean_norm(xi, dim);
  Coord u{0, 0, 0};
  if (r == 0.0) return u;
  for (int j = 0; j < dim; ++j) u[j] = xi[j] / r;
  return u;
}

int axis_of(const Index& a) {
  for (int j = 0; j < kMaxDim; ++j)
    if (a[j]) return j;
  return -1;
}

// x.xi + xi-only remainder r
PhaseFunction multiplier_phase(std::string name, int dim, std::function<double(const Coord&)> r,
                               std::function<Coord(const Coord&)> grad_r, bool homogeneous, ParamMap params) {
  PhaseFunction p;
  p.name = std::move(name);
  p.dim = dim;
  p.value = [dim, r](const Coord& x, const Coord& xi) { return dot(x, xi, dim) + r(xi); };
  p.grad_x = [](const Coord&, const Coord& xi) { return xi; };
  p.grad_xi = [dim, grad_r](const Coord& x, const Coord& xi) {
    Coord g = grad_r(xi);
    for (int j = 0; j < dim; ++j) g[j] += x[j];
    return g;
  };
  p.mixed_hessian = [](const Coord&, const Coord&) { return identity_matrix(); };
  p.x_deriv = [dim](const Coord&, const Coord& xi, const Index& a) {
    if (total_order(a, dim) != 1) return 0.0;
    return xi[axis_of(a)];
  };
  p.homogeneous = homogeneous;
  p.multiplier_remainder = r;
  p.params = std::move(params);
  return p;
}

double get(const ParamMap& p, const std::string& k) { return p.at(k); }

int decay_exponent(const ParamMap& p, int dim) {
  const double K = get(p, "K");
  return K < 0 ? 2 * dim + 2 : static_cast<int>(K);
}

TimeDependentPhase wave_family(int dim, const ParamMap& params) {
  TimeDependentPhase f;
  f.name = "dispersive-wave";
  f.dim = dim;
  f.t0 = 1.0;
  f.value = [dim](double, const Coord&, const Coord& xi) { return euclidean_norm(xi, dim); };
  f.mixed_hessian = [](double, const Coord&, const Coord&) { return Matrix{}; };
  f.homogeneous = true;
  f.x_independent = true;
  f.params = params;
  return f;
}

TimeDependentPhase cosine_wave_family(int dim, const ParamMap& params) {
  const double c = get(params, "c");
  const int K = decay_exponent(params, dim);
  TimeDependentPhase f;
  f.name = "dispersive-cosine-wave";
  f.dim = dim;
  f.t0 = 1.0;
  f.value = [dim, c, K](double t, const Coord& x, const Coord& xi) {
    return euclidean_norm(xi, dim) * (1.0 + c * std::pow(t, -K) * std::sin(kTwoPi * std::fmod(x[0], 1.0)));
  };
  f.mixed_hessian = [dim, c, K](double t, const Coord& x, const Coord& xi) {
    Matrix m{};
    const Coord u = unit(xi, dim);
    const double s = c * std::pow(t, -K) * kTwoPi * std::cos(kTwoPi * std::fmod(x[0], 1.0));
    for (int j = 0; j < dim; ++j) m[0][j] = s * u[j];
    return m;
  };
  f.homogeneous = true;
  f.x_independent = false;
  f.params = params;
  f.params["K"] = K;
  return f;
}

// one symbol written once on real frequencies, exposed both on the lattice and
// on R^n
struct SymbolForms {
  std::string name;
  double order = 0.0;
  bool x_independent = true;
  ContinuumFn eval;
  ContinuumDerivFn deriv;
  std::vector<std::pair<Index, std::function<Complex(const Coord&)>>> modes;
};

LatticeSymbol to_lattice(const SymbolForms& f, int dim, const ParamMap& params) {
  LatticeSymbol::HandleSpec s;
  s.name = f.name;
  s.dim = dim;
  s.order = f.order;
  s.params = params;
  s.x_independent = f.x_independent;
  auto e = f.eval;
  auto d = f.deriv;
  s.eval = [e](const Coord& x, const Index& xi) { return e(x, to_coord(xi)); };
  s.deriv = [d](const Coord& x, const Index& xi, const Index& b) { return d(x, to_coord(xi), b); };
  for (const auto& [q, c] : f.modes) {
    auto cc = c;
    s.x_modes.push_back({q, [cc](const Index& xi) { return cc(to_coord(xi)); }});
  }
  return LatticeSymbol::handle(std::move(s));
}

ContinuumSymbol to_continuum(const SymbolForms& f, int dim) {
  ContinuumSymbol c;
  c.name = f.name;
  c.dim = dim;
  c.order = f.order;
  c.eval = f.eval;
  c.deriv = f.deriv;
  c.x_independent = f.x_independent;
  return c;
}

// x-independent symbol sigma(xi)
SymbolForms multiplier_forms(std::string name, int dim, double order, std::function<Complex(const Coord&)> sigma) {
  SymbolForms f;
  f.name = std::move(name);
  f.order = order;
  f.x_independent = true;
  f.eval = [sigma](const Coord&, const Coord& xi) { return sigma(xi); };
  f.deriv = [sigma, dim](const Coord&, const Coord& xi, const Index& b) {
    return total_order(b, dim) == 0 ? sigma(xi) : Complex(0.0);
  };
  f.modes.push_back({Index{0, 0, 0}, sigma});
  return f;
}

SymbolForms bracket_forms(int dim, const ParamMap& p) {
  const double k = get(p, "kappa");
  return multiplier_forms("bracket-power", dim, k, [dim, k](const Coord& xi) {
    return Complex(std::pow(bracket(xi, dim), k));
  });
}

SymbolForms identity_forms(int dim, const ParamMap&) {
  return multiplier_forms("identity", dim, 0.0, [](const Coord&) { return Complex(1.0); });
}

SymbolForms sign_forms(int dim, const ParamMap&) {
  return multiplier_forms("smoothed-sign", dim, 0.0, [dim](const Coord& xi) {
    return Complex(xi[0] / bracket(xi, dim));
  });
}

SymbolForms modulation_forms(int dim, const ParamMap& p) {
  const double k = get(p, "kappa");
  Index q{static_cast<int>(get(p, "q1")), static_cast<int>(get(p, "q2")), static_cast<int>(get(p, "q3"))};
  for (int j = dim; j < kMaxDim; ++j) q[j] = 0;
  SymbolForms f;
  f.name = "modulation";
  f.order = k;
  f.x_independent = total_order(Index{std::abs(q[0]), std::abs(q[1]), std::abs(q[2])}, dim) == 0;
  auto sigma = [dim, k](const Coord& xi) { return std::pow(bracket(xi, dim), k); };
  f.eval = [dim, q, sigma](const Coord& x, const Coord& xi) { return unimodular(dot(x, q, dim)) * sigma(xi); };
  f.deriv = [dim, q, sigma](const Coord& x, const Coord& xi, const Index& b) {
    Complex fac(1.0);
    for (int j = 0; j < dim; ++j) fac *= std::pow(Complex(0.0, kTwoPi * q[j]), b[j]);
    return fac * unimodular(dot(x, q, dim)) * sigma(xi);
  };
  f.modes.push_back({q, [sigma](const Coord& xi) { return Complex(sigma(xi)); }});
  return f;
}

SymbolForms cosine_forms(int dim, const ParamMap& p) {
  const double k = get(p, "kappa");
  const double c = get(p, "c");
  SymbolForms f;
  f.name = "cosine-modulated";
  f.order = k;
  f.x_independent = c == 0.0;
  auto sigma = [dim, k](const Coord& xi) { return std::pow(bracket(xi, dim), k); };
  f.eval = [c, sigma](const Coord& x, const Coord& xi) {
    return Complex((1.0 + c * std::cos(kTwoPi * std::fmod(x[0], 1.0))) * sigma(xi));
  };
  f.deriv = [dim, c, sigma](const Coord& x, const Coord& xi, const Index& b) {
    const int n = total_order(b, dim);
    if (n == 0) return Complex((1.0 + c * std::cos(kTwoPi * std::fmod(x[0], 1.0))) * sigma(xi));
    if (b[0] != n) return Complex(0.0);
    return Complex(c * std::pow(kTwoPi, n) * std::cos(kTwoPi * std::fmod(x[0], 1.0) + 0.5 * kPi * n) * sigma(xi));
  };
  f.modes.push_back({Index{0, 0, 0}, [sigma](const Coord& xi) { return Complex(sigma(xi)); }});
  if (c != 0.0) {
    f.modes.push_back({Index{1, 0, 0}, [c, sigma](const Coord& xi) { return Complex(0.5 * c * sigma(xi)); }});
    f.modes.push_back({Index{-1, 0, 0}, [c, sigma](const Coord& xi) { return Complex(0.5 * c * sigma(xi)); }});
  }
  return f;
}

SymbolForms cutoff_forms(int dim, const ParamMap& p, double t) {
  const double C = get(p, "C");
  return multiplier_forms("dispersive-cutoff", dim, 0.0, [dim, C, t](const Coord& xi) {
    return Complex(t * euclidean_norm(xi, dim) >= C ? 1.0 : 0.0);
  });
}

SymbolForms dispersive_cosine_forms(int dim, const ParamMap& p, double t) {
  const double c = get(p, "c");
  const double C = get(p, "C");
  const int K = decay_exponent(p, dim);
  const double amp = c * std::pow(t, -K);
  auto chi = [dim, C, t](const Coord& xi) { return t * euclidean_norm(xi, dim) >= C ? 1.0 : 0.0; };
  SymbolForms f;
  f.name = "dispersive-cosine";
  f.order = 0.0;
  f.x_independent = amp == 0.0;
  f.eval = [amp, chi](const Coord& x, const Coord& xi) {
    return Complex((1.0 + amp * std::cos(kTwoPi * std::fmod(x[0], 1.0))) * chi(xi));
  };
  f.deriv = [dim, amp, chi](const Coord& x, const Coord& xi, const Index& b) {
    const int n = total_order(b, dim);
    if (n == 0) return Complex((1.0 + amp * std::cos(kTwoPi * std::fmod(x[0], 1.0))) * chi(xi));
    if (b[0] != n) return Complex(0.0);
    return Complex(amp * std::pow(kTwoPi, n) * std::cos(kTwoPi * std::fmod(x[0], 1.0) + 0.5 * kPi * n) * chi(xi));
  };
  f.modes.push_back({Index{0, 0, 0}, [chi](const Coord& xi) { return Complex(chi(xi)); }});
  if (amp != 0.0) {
    f.modes.push_back({Index{1, 0, 0}, [amp, chi](const Coord& xi) { return Complex(0.5 * amp * chi(xi)); }});
    f.modes.push_back({Index{-1, 0, 0}, [amp, chi](const Coord& xi) { return Complex(0.5 * amp * chi(xi)); }});
  }
  return f;
}

SymbolEntry plain_symbol(std::string name, std::string summary, std::string hyp, ParamMap defaults,
                         bool x_independent, std::function<SymbolForms(int, const ParamMap&)> forms) {
  SymbolEntry e;
  e.name = std::move(name);
  e.summary = std::move(summary);
  e.hypotheses = std::move(hyp);
  e.defaults = std::move(defaults);
  e.x_independent = x_independent;
  e.lattice = [forms](int dim, const ParamMap& p) { return to_lattice(forms(dim, p), dim, p); };
  e.continuum = [forms](int dim, const ParamMap& p) { return to_continuum(forms(dim, p), dim); };
  return e;
}

SymbolEntry dispersive_symbol(std::string name, std::string summary, std::string hyp, ParamMap defaults,
                              bool x_independent, std::function<SymbolForms(int, const ParamMap&, double)> forms) {
  SymbolEntry e;
  e.name = std::move(name);
  e.summary = std::move(summary);
  e.hypotheses = std::move(hyp);
  e.tags = {"dispersive"};
  e.defaults = std::move(defaults);
  e.defaults.emplace("t", 1.0);
  e.x_independent = x_independent;
  e.lattice = [forms](int dim, const ParamMap& p) { return to_lattice(forms(dim, p, p.at("t")), dim, p); };
  e.family = [forms](int dim, const ParamMap& p) -> SymbolFamily {
    return [forms, dim, p](double t) {
      ParamMap q = p;
      q["t"] = t;
      return to_lattice(forms(dim, q, t), dim, q);
    };
  };
  return e;
}

}  // namespace

Registry Registry::builtin() {
  Registry r;
  r.trig_["cos1"] = {{{1.0, {1, 0, 0}, false}}};
  r.trig_["sin1"] = {{{1.0, {1, 0, 0}, true}}};
  r.trig_["cos-sum"] = {{{1.0, {1, 0, 0}, false}, {1.0, {0, 1, 0}, false}, {1.0, {0, 0, 1}, false}}};
  r.trig_["cos2"] = {{{1.0, {2, 0, 0}, false}}};

  {
    PhaseEntry e;
    e.name = "linear";
    e.summary = "x.xi, the pseudo-differential case";
    e.hypotheses = "satisfies: torus compatibility, homogeneity, mixed Hessian I";
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      auto f = linear_phase(dim);
      f.params = p;
      return f;
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "half-wave";
    e.summary = "x.xi + t|xi|, the half-wave propagator at time t";
    e.hypotheses = "satisfies: torus compatibility, homogeneity, mixed Hessian I; multiplier with order threshold "
                   "-(n-1)|1/p-1/2|";
    e.defaults = {{"t", 1.0}};
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      const double t = get(p, "t");
      return multiplier_phase(
          "half-wave", dim, [dim, t](const Coord& xi) { return t * euclidean_norm(xi, dim); },
          [dim, t](const Coord& xi) {
            Coord u = unit(xi, dim);
            for (auto& v : u) v *= t;
            return u;
          },
          true, p);
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "translation";
    e.summary = "(x+v).xi, translation by v";
    e.hypotheses = "satisfies: torus compatibility, homogeneity, mixed Hessian I; L^p isometry";
    e.defaults = {{"v1", 0.25}, {"v2", 0.0}, {"v3", 0.0}};
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      const Coord v{get(p, "v1"), dim > 1 ? get(p, "v2") : 0.0, dim > 2 ? get(p, "v3") : 0.0};
      return multiplier_phase(
          "translation", dim, [dim, v](const Coord& xi) { return dot(v, xi, dim); },
          [v](const Coord&) { return v; }, true, p);
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "perturbed";
    e.summary = "x.xi + c psi(x)|xi|, psi a named trigonometric polynomial";
    e.hypotheses = "satisfies: torus compatibility, homogeneity; mixed Hessian non-degenerate when c|grad psi| < 1";
    e.defaults = {{"c", 0.1}};
    e.label_defaults = {{"psi", "cos1"}};
    e.build = [](int dim, const ParamMap& p, const Labels& l, const Registry& reg) {
      const double c = get(p, "c");
      const TrigPolynomial psi = reg.trig_polynomial(l.at("psi"));
      PhaseFunction f;
      f.name = "perturbed";
      f.dim = dim;
      f.value = [dim, c, psi](const Coord& x, const Coord& xi) {
        return dot(x, xi, dim) + c * psi.value(x, dim) * euclidean_norm(xi, dim);
      };
      f.grad_x = [dim, c, psi](const Coord& x, const Coord& xi) {
        Coord g = xi;
        const double r = euclidean_norm(xi, dim);
        for (int j = 0; j < dim; ++j) {
          Index a{0, 0, 0};
          a[j] = 1;
          g[j] += c * psi.derivative(x, a, dim) * r;
        }
        return g;
      };
      f.grad_xi = [dim, c, psi](const Coord& x, const Coord& xi) {
        Coord g = x;
        const Coord u = unit(xi, dim);
        const double s = c * psi.value(x, dim);
        for (int j = 0; j < dim; ++j) g[j] += s * u[j];
        return g;
      };
      f.mixed_hessian = [dim, c, psi](const Coord& x, const Coord& xi) {
        Matrix m = identity_matrix();
        const Coord u = unit(xi, dim);
        for (int i = 0; i < dim; ++i) {
          Index a{0, 0, 0};
          a[i] = 1;
          const double d = c * psi.derivative(x, a, dim);
          for (int j = 0; j < dim; ++j) m[i][j] += d * u[j];
        }
        return m;
      };
      f.x_deriv = [dim, c, psi](const Coord& x, const Coord& xi, const Index& a) {
        double v = c * psi.derivative(x, a, dim) * euclidean_norm(xi, dim);
        if (total_order(a, dim) == 1) v += xi[axis_of(a)];
        return v;
      };
      f.homogeneous = true;
      f.params = p;
      return f;
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "nonperiodic";
    e.summary = "x.xi + c x_1|xi|";
    e.hypotheses = "violates: torus compatibility (phi(x+e_1) - phi(x) is not an integer); satisfies homogeneity";
    e.defaults = {{"c", 0.5}};
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      const double c = get(p, "c");
      PhaseFunction f;
      f.name = "nonperiodic";
      f.dim = dim;
      f.value = [dim, c](const Coord& x, const Coord& xi) {
        return dot(x, xi, dim) + c * x[0] * euclidean_norm(xi, dim);
      };
      f.grad_x = [dim, c](const Coord&, const Coord& xi) {
        Coord g = xi;
        g[0] += c * euclidean_norm(xi, dim);
        return g;
      };
      f.grad_xi = [dim, c](const Coord& x, const Coord& xi) {
        Coord g = x;
        const Coord u = unit(xi, dim);
        for (int j = 0; j < dim; ++j) g[j] += c * x[0] * u[j];
        return g;
      };
      f.mixed_hessian = [dim, c](const Coord&, const Coord& xi) {
        Matrix m = identity_matrix();
        const Coord u = unit(xi, dim);
        for (int j = 0; j < dim; ++j) m[0][j] += c * u[j];
        return m;
      };
      f.x_deriv = [dim, c](const Coord&, const Coord& xi, const Index& a) {
        if (total_order(a, dim) != 1) return 0.0;
        const int j = axis_of(a);
        return xi[j] + (j == 0 ? c * euclidean_norm(xi, dim) : 0.0);
      };
      f.homogeneous = true;
      f.params = p;
      return f;
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "dispersive-wave";
    e.summary = "x.xi + t phi with phi(t, x, xi) = |xi|";
    e.hypotheses = "satisfies: dispersive phase bounds with any constant, det(I + t d_x d_xi phi) = 1";
    e.tags = {"dispersive"};
    e.defaults = {{"t", 1.0}};
    e.family = wave_family;
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      const double t = get(p, "t");
      PhaseFunction f = wave_family(dim, p).at(t);
      f.grad_x = [](const Coord&, const Coord& xi) { return xi; };
      f.grad_xi = [dim, t](const Coord& x, const Coord& xi) {
        Coord g = unit(xi, dim);
        for (int j = 0; j < dim; ++j) g[j] = x[j] + t * g[j];
        return g;
      };
      return f;
    };
    r.phases_.push_back(std::move(e));
  }
  {
    PhaseEntry e;
    e.name = "dispersive-cosine-wave";
    e.summary = "x.xi + t phi with phi(t, x, xi) = |xi|(1 + c t^-K sin 2 pi x_1); K=-1 selects 2n+2";
    e.hypotheses = "satisfies: dispersive phase bounds for |beta| <= K, det bounded below by 1 - 2 pi c";
    e.tags = {"dispersive"};
    e.defaults = {{"t", 1.0}, {"c", 0.05}, {"K", -1.0}};
    e.family = cosine_wave_family;
    e.build = [](int dim, const ParamMap& p, const Labels&, const Registry&) {
      const double t = get(p, "t");
      PhaseFunction f = cosine_wave_family(dim, p).at(t);
      const double ct = get(p, "c") * std::pow(t, -decay_exponent(p, dim));
      f.grad_x = [dim, t, ct](const Coord& x, const Coord& xi) {
        Coord g = xi;
        g[0] += t * euclidean_norm(xi, dim) * ct * kTwoPi * std::cos(kTwoPi * x[0]);
        return g;
      };
      f.grad_xi = [dim, t, ct](const Coord& x, const Coord& xi) {
        Coord g = unit(xi, dim);
        const double s = t * (1.0 + ct * std::sin(kTwoPi * x[0]));
        for (int j = 0; j < dim; ++j) g[j] = x[j] + s * g[j];
        return g;
      };
      return f;
    };
    r.phases_.push_back(std::move(e));
  }

  r.symbols_.push_back(plain_symbol("identity", "a = 1", "order 0, x-independent; identity under the linear phase",
                                    {}, true, identity_forms));
  r.symbols_.push_back(plain_symbol("bracket-power", "<xi>^kappa",
                                    "symbol class S^kappa_{1,0}; below the order threshold when kappa <= kappa_p",
                                    {{"kappa", 0.0}}, true, bracket_forms));
  r.symbols_.push_back(plain_symbol("smoothed-sign", "xi_1/<xi>", "order 0, x-independent, real, bounded by 1", {},
                                    true, sign_forms));
  r.symbols_.push_back(plain_symbol("modulation", "e^{2 pi i q.x} <xi>^kappa",
                                    "x-dependent, band-limited in x; isometric factor e^{2 pi i q.x}",
                                    {{"kappa", 0.0}, {"q1", 1.0}, {"q2", 0.0}, {"q3", 0.0}}, false, modulation_forms));
  r.symbols_.push_back(plain_symbol("cosine-modulated", "(1 + c cos 2 pi x_1) <xi>^kappa",
                                    "x-dependent, band-limited in x; frozen-symbol bound applies",
                                    {{"kappa", 0.0}, {"c", 0.5}}, false, cosine_forms));
  r.symbols_.push_back(dispersive_symbol("dispersive-cutoff", "chi(t|xi| >= C)",
                                         "dispersive symbol bounds with every constant; supported in t|xi| >= C",
                                         {{"C", 1.0}}, true, cutoff_forms));
  r.symbols_.push_back(dispersive_symbol(
      "dispersive-cosine", "(1 + c cos(2 pi x_1) t^-K) chi(t|xi| >= C); K=-1 selects 2n+2",
      "dispersive symbol bounds C t^-|beta| for |beta| <= K; supported in t|xi| >= C",
      {{"C", 1.0}, {"c", 0.5}, {"K", -1.0}}, false, dispersive_cosine_forms));
  return r;
}

void Registry::add_trig_polynomial(const std::string& name, TrigPolynomial p) {
  if (name.empty()) throw Error(ErrorKind::Config, "trigonometric polynomial needs a name");
  if (p.terms.empty()) throw Error(ErrorKind::Config, "trigonometric polynomial '" + name + "' has no terms");
  trig_[name] = std::move(p);
}

const TrigPolynomial& Registry::trig_polynomial(const std::string& name) const {
  auto it = trig_.find(name);
  if (it == trig_.end()) throw Error(ErrorKind::Config, "unknown trigonometric polynomial '" + name + "'");
  return it->second;
}

std::vector<std::string> Registry::trig_polynomial_names() const {
  std::vector<std::string> v;
  for (const auto& [k, _] : trig_) v.push_back(k);
  return v;
}

const PhaseEntry* Registry::find_phase(const std::string& name) const {
  for (const auto& e : phases_)
    if (e.name == name) return &e;
  return nullptr;
}

const SymbolEntry* Registry::find_symbol(const std::string& name) const {
  for (const auto& e : symbols_)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

ParamMap merge(const ParamMap& defaults, const ParamMap& given, const std::string& what) {
  ParamMap out = defaults;
  for (const auto& [k, v] : given) {
    if (!defaults.count(k)) throw Error(ErrorKind::Config, what + " has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw Error(ErrorKind::Config, what + " parameter '" + k + "' is not finite");
    out[k] = v;
  }
  return out;
}

}  // namespace

ParamMap Registry::resolve(const PhaseEntry& e, const EntrySpec& s) const {
  return merge(e.defaults, s.params, "phase " + e.name);
}

ParamMap Registry::resolve(const SymbolEntry& e, const EntrySpec& s) const {
  if (!s.labels.empty()) throw Error(ErrorKind::Config, "symbol " + e.name + " takes no string parameters");
  return merge(e.defaults, s.params, "symbol " + e.name);
}

Labels Registry::resolve_labels(const PhaseEntry& e, const EntrySpec& s) const {
  Labels out = e.label_defaults;
  for (const auto& [k, v] : s.labels) {
    if (!e.label_defaults.count(k)) throw Error(ErrorKind::Config, "phase " + e.name + " has no parameter '" + k + "'");
    out[k] = v;
  }
  if (out.count("psi")) trig_polynomial(out.at("psi"));
  return out;
}

namespace {

template <class E>
const E& require(const E* e, const std::string& what, const std::string& name) {
  if (!e) throw Error(ErrorKind::Config, "unknown " + what + " '" + name + "'");
  return *e;
}

}  // namespace

PhaseFunction Registry::phase(const EntrySpec& s, int dim) const {
  const auto& e = require(find_phase(s.name), "phase", s.name);
  return e.build(dim, resolve(e, s), resolve_labels(e, s), *this);
}

TimeDependentPhase Registry::phase_family(const EntrySpec& s, int dim) const {
  const auto& e = require(find_phase(s.name), "phase", s.name);
  if (!e.family) throw Error(ErrorKind::Config, "phase '" + s.name + "' is not a dispersive family");
  return e.family(dim, resolve(e, s));
}

LatticeSymbol Registry::symbol(const EntrySpec& s, int dim) const {
  const auto& e = require(find_symbol(s.name), "symbol", s.name);
  return e.lattice(dim, resolve(e, s));
}

ContinuumSymbol Registry::continuum_symbol(const EntrySpec& s, int dim) const {
  const auto& e = require(find_symbol(s.name), "symbol", s.name);
  if (!e.continuum) throw Error(ErrorKind::Config, "symbol '" + s.name + "' has no continuum form");
  return e.continuum(dim, resolve(e, s));
}

SymbolFamily Registry::symbol_family(const EntrySpec& s, int dim) const {
  const auto& e = require(find_symbol(s.name), "symbol", s.name);
  if (!e.family) throw Error(ErrorKind::Config, "symbol '" + s.name + "' is not a dispersive family");
  return e.family(dim, resolve(e, s));
}

namespace {

bool matches(const std::string& filter, const std::string& name, const std::vector<std::string>& tags) {
  if (filter.empty() || name.find(filter) != std::string::npos) return true;
  return std::any_of(tags.begin(), tags.end(), [&](const std::string& t) { return t.find(filter) != std::string::npos; });
}

std::string params_text(const ParamMap& p, const Labels& l) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : " ") + k + "=" + num(v);
  for (const auto& [k, v] : l) s += (s.empty() ? "" : " ") + k + "=" + v;
  return s.empty() ? "-" : s;
}

}  // namespace

std::string Registry::listing(const std::string& filter) const {
  std::ostringstream out;
  for (const auto& e : phases_)
    if (matches(filter, e.name, e.tags))
      out << "phase\t" << e.name << "\t" << params_text(e.defaults, e.label_defaults) << "\t" << e.summary << "\t"
          << e.hypotheses << "\n";
  for (const auto& e : symbols_)
    if (matches(filter, e.name, e.tags))
      out << "symbol\t" << e.name << "\t" << params_text(e.defaults, {}) << "\t" << e.summary << "\t" << e.hypotheses
          << "\n";
  return out.str();
}

}  // namespace tfio
