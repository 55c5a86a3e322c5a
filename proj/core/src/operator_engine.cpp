#include "torusfio/operator_engine.hpp"

#include <algorithm>
#include <cmath>

#include "torusfio/error.hpp"
#include "torusfio/random.hpp"

namespace torusfio {

struct FsoOperator::KernelSlot {
  std::once_flag once;
  std::unique_ptr<FsoKernel> kernel;
};

double periodicity_defect(const PhaseFunction& phi, const FrequencyCube& cube, int samples, std::uint64_t seed) {
  const int dim = phi.dim;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    Stream st(seed, static_cast<std::uint64_t>(i));
    Coord x{0, 0, 0};
    Coord xi{0, 0, 0};
    for (int j = 0; j < dim; ++j) x[j] = st.uniform();
    for (int j = 0; j < dim; ++j) xi[j] = st.uniform_int(-cube.cutoff(), cube.cutoff());
    const double v = phi.value(x, xi);
    for (int j = 0; j < dim; ++j) {
      Coord e = x;
      e[j] += 1.0;
      const double w = phi.value(e, xi) - v;
      worst = std::max(worst, std::abs(w - std::round(w)));
    }
  }
  return worst;
}

FsoOperator FsoOperator::create(PhaseFunction phase, LatticeSymbol symbol, const TorusGrid& grid,
                                const FrequencyCube& cube, bool waive_periodicity) {
  if (phase.dim != grid.dim() || symbol.dim() != grid.dim() || cube.dim() != grid.dim())
    throw Error(ErrorKind::Dimension, "phase, symbol, grid and cube must share a dimension");
  if (!cube.fits(grid))
    throw Error(ErrorKind::Aliasing, "cube side " + std::to_string(cube.side()) + " exceeds the grid", 0);
  if (!phase.value) throw Error(ErrorKind::Domain, "phase has no evaluator");
  FsoOperator A;
  A.periodicity_defect_seen = periodicity_defect(phase, cube, 256, 0x7e57ULL);
  A.periodicity_waived = waive_periodicity;
  if (!waive_periodicity && A.periodicity_defect_seen > 1e-9)
    throw Error(ErrorKind::Domain, "phase '" + phase.name + "' is not torus compatible (defect " +
                                       std::to_string(A.periodicity_defect_seen) + ")");
  A.phase = std::move(phase);
  A.symbol = std::move(symbol);
  A.grid = grid;
  A.cube = cube;
  A.slot_ = std::make_shared<KernelSlot>();
  return A;
}

const FsoKernel& FsoOperator::kernel() const {
  if (!slot_) throw Error(ErrorKind::Domain, "operator was not built through FsoOperator::create");
  std::call_once(slot_->once, [this] { slot_->kernel = std::make_unique<FsoKernel>(*this); });
  return *slot_->kernel;
}

// ------------------------------------------------------------------ kernel

namespace {

constexpr std::size_t kMaxKernelEntries = std::size_t(1) << 22;

void check_finite(const Complex& v, const Coord& x, const Index& xi, int dim) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorKind::Numeric,
                "non-finite FSO kernel at x=" + format_coord(x, dim) + " xi=" + format_index(xi, dim));
}

}  // namespace

FsoKernel::FsoKernel(const FsoOperator& op)
    : phase_(op.phase), symbol_(op.symbol), grid_(op.grid), cube_(op.cube) {
  const int dim = grid_.dim();
  const bool multiplier_phase = static_cast<bool>(phase_.multiplier_remainder);
  const bool x_trig = symbol_.x_independent() || (!symbol_.is_table() && !symbol_.x_modes().empty());

  if (multiplier_phase && x_trig) {
    path_ = Path::Modes;
    std::vector<Complex> rot(cube_.size());
    for (std::size_t i = 0; i < cube_.size(); ++i) {
      const Index xi = cube_.point(i);
      rot[i] = unimodular(phase_.multiplier_remainder(to_coord(xi)));
    }
    auto add_mode = [&](const Index& q, const std::function<Complex(const Index&)>& c) {
      Mode m;
      m.q = q;
      m.weight.resize(cube_.size());
      for (std::size_t i = 0; i < cube_.size(); ++i) {
        const Index xi = cube_.point(i);
        m.weight[i] = rot[i] * c(xi);
        check_finite(m.weight[i], Coord{0, 0, 0}, xi, dim);
      }
      m.x_factor.resize(grid_.size());
      for (std::size_t k = 0; k < grid_.size(); ++k) m.x_factor[k] = unimodular(dot(grid_.node(k), q, dim));
      modes_.push_back(std::move(m));
    };
    if (symbol_.x_independent()) {
      const LatticeSymbol& s = symbol_;
      const TorusGrid& g = grid_;
      add_mode(Index{0, 0, 0}, [&s, &g](const Index& xi) { return s.at_node(g, 0, xi); });
    } else {
      for (const auto& m : symbol_.x_modes()) add_mode(m.q, m.coeff);
    }
    return;
  }
  if (grid_.size() * cube_.size() <= kMaxKernelEntries) {
    path_ = Path::Matrix;
    k_.resize(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(cube_.size()));
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(grid_.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < rows; ++j) {
      try {
        for (std::size_t i = 0; i < cube_.size(); ++i) k_(j, static_cast<Eigen::Index>(i)) = entry(j, i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    return;
  }
  path_ = Path::Direct;
}

std::string FsoKernel::path_name() const {
  switch (path_) {
    case Path::Modes: return "fft-modes";
    case Path::Matrix: return "kernel-matrix";
    case Path::Direct: return "direct-sum";
  }
  return "unknown";
}

Complex FsoKernel::entry(std::size_t node, std::size_t freq) const {
  const Coord x = grid_.node(node);
  const Index xi = cube_.point(freq);
  const double ph = phase_.value(x, to_coord(xi));
  if (!std::isfinite(ph))
    throw Error(ErrorKind::Numeric,
                "non-finite phase at x=" + format_coord(x, grid_.dim()) + " xi=" + format_index(xi, grid_.dim()));
  const Complex v = unimodular(ph) * symbol_.at_node(grid_, node, xi);
  check_finite(v, x, xi, grid_.dim());
  return v;
}

std::vector<Complex> FsoKernel::synthesize(const std::vector<Complex>& on_cube) const {
  std::vector<Complex> buf(grid_.size(), Complex(0.0));
  for (std::size_t i = 0; i < cube_.size(); ++i) buf[dft_slot(cube_.point(i), grid_)] += on_cube[i];
  grid_dft(buf, grid_.dim(), grid_.points_per_axis(), +1);
  return buf;
}

std::vector<Complex> FsoKernel::apply_spectrum(const std::vector<Complex>& fhat) const {
  if (fhat.size() != cube_.size()) throw Error(ErrorKind::Dimension, "spectrum size does not match the cube");
  std::vector<Complex> out(grid_.size(), Complex(0.0));
  switch (path_) {
    case Path::Modes: {
      std::vector<Complex> c(cube_.size());
      for (const auto& m : modes_) {
        for (std::size_t i = 0; i < cube_.size(); ++i) c[i] = m.weight[i] * fhat[i];
        const auto v = synthesize(c);
        for (std::size_t k = 0; k < grid_.size(); ++k) out[k] += m.x_factor[k] * v[k];
      }
      break;
    }
    case Path::Matrix: {
      Eigen::Map<const Eigen::VectorXcd> in(fhat.data(), static_cast<Eigen::Index>(fhat.size()));
      Eigen::Map<Eigen::VectorXcd> res(out.data(), static_cast<Eigen::Index>(out.size()));
      res.noalias() = k_ * in;
      break;
    }
    case Path::Direct: {
      const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(grid_.size());
      std::exception_ptr failure;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t j = 0; j < rows; ++j) {
        try {
          Complex acc(0.0);
          for (std::size_t i = 0; i < cube_.size(); ++i)
            if (fhat[i] != Complex(0.0)) acc += entry(j, i) * fhat[i];
          out[j] = acc;
        } catch (...) {
#pragma omp critical
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      break;
    }
  }
  return out;
}

std::vector<Complex> FsoKernel::apply(const std::vector<Complex>& f) const {
  if (f.size() != grid_.size()) throw Error(ErrorKind::Dimension, "input does not match the operator grid");
  std::vector<Complex> buf = f;
  grid_dft(buf, grid_.dim(), grid_.points_per_axis(), -1);
  std::vector<Complex> fhat(cube_.size());
  for (std::size_t i = 0; i < cube_.size(); ++i) fhat[i] = grid_.weight() * buf[dft_slot(cube_.point(i), grid_)];
  return apply_spectrum(fhat);
}

std::vector<Complex> FsoKernel::apply_adjoint(const std::vector<Complex>& g) const {
  // A = K F with F = N^{-n} E^H, E[k, xi] = e^{2 pi i x_k.xi}. The weighted adjoint
  // equals the plain conjugate transpose: A^H g = N^{-n} E (K^H g).
  if (g.size() != grid_.size()) throw Error(ErrorKind::Dimension, "input does not match the operator grid");
  std::vector<Complex> u(cube_.size(), Complex(0.0));
  switch (path_) {
    case Path::Modes: {
      for (const auto& m : modes_) {
        std::vector<Complex> buf(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) buf[k] = std::conj(m.x_factor[k]) * g[k];
        grid_dft(buf, grid_.dim(), grid_.points_per_axis(), -1);
        for (std::size_t i = 0; i < cube_.size(); ++i)
          u[i] += std::conj(m.weight[i]) * buf[dft_slot(cube_.point(i), grid_)];
      }
      break;
    }
    case Path::Matrix: {
      Eigen::Map<const Eigen::VectorXcd> in(g.data(), static_cast<Eigen::Index>(g.size()));
      Eigen::Map<Eigen::VectorXcd> res(u.data(), static_cast<Eigen::Index>(u.size()));
      res.noalias() = k_.adjoint() * in;
      break;
    }
    case Path::Direct: {
      const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(cube_.size());
      std::exception_ptr failure;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < cols; ++i) {
        try {
          Complex acc(0.0);
          for (std::size_t k = 0; k < grid_.size(); ++k) acc += std::conj(entry(k, i)) * g[k];
          u[i] = acc;
        } catch (...) {
#pragma omp critical
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      break;
    }
  }
  for (auto& v : u) v *= grid_.weight();
  return synthesize(u);
}

Eigen::MatrixXcd FsoKernel::kernel_matrix() const {
  if (path_ == Path::Matrix) return k_;
  Eigen::MatrixXcd k(static_cast<Eigen::Index>(grid_.size()), static_cast<Eigen::Index>(cube_.size()));
  for (std::size_t j = 0; j < grid_.size(); ++j)
    for (std::size_t i = 0; i < cube_.size(); ++i) {
      if (path_ == Path::Modes) {
        const Coord x = grid_.node(j);
        const Complex e = unimodular(dot(x, cube_.point(i), grid_.dim()));
        Complex acc(0.0);
        for (const auto& m : modes_) acc += m.x_factor[j] * e * m.weight[i];
        k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = acc;
      } else {
        k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = entry(j, i);
      }
    }
  return k;
}

// -------------------------------------------------------------- wrappers

namespace {

void check_operand(const FsoOperator& A, const PeriodicFunction& f) {
  if (f.grid != A.grid)
    throw Error(ErrorKind::Dimension, "function grid differs from the operator grid",
                f.grid.dim() != A.grid.dim() ? std::min(f.grid.dim(), A.grid.dim()) : 0);
}

}  // namespace

PeriodicFunction apply_fso(const FsoOperator& A, const PeriodicFunction& f) {
  check_operand(A, f);
  PeriodicFunction out(A.grid);
  out.values = A.kernel().apply(f.values);
  return out;
}

PeriodicFunction apply_fso_adjoint(const FsoOperator& A, const PeriodicFunction& g) {
  check_operand(A, g);
  PeriodicFunction out(A.grid);
  out.values = A.kernel().apply_adjoint(g.values);
  return out;
}

PeriodicFunction apply_pseudo(const LatticeSymbol& a, const PeriodicFunction& f) {
  return apply_pseudo(a, f, FrequencyCube::for_grid(f.grid));
}

PeriodicFunction apply_pseudo(const LatticeSymbol& a, const PeriodicFunction& f, const FrequencyCube& cube) {
  const FsoOperator A = FsoOperator::create(linear_phase(f.grid.dim()), a, f.grid, cube);
  return apply_fso(A, f);
}

Complex evaluate_fso(const FsoOperator& A, const SpectralSequence& fhat, const Coord& x) {
  if (fhat.cube != A.cube) throw Error(ErrorKind::Dimension, "spectrum cube differs from the operator cube");
  Complex acc(0.0);
  for (std::size_t i = 0; i < A.cube.size(); ++i) {
    if (fhat.coeffs[i] == Complex(0.0)) continue;
    const Index xi = A.cube.point(i);
    acc += unimodular(A.phase.value(x, to_coord(xi))) * A.symbol(x, xi) * fhat.coeffs[i];
  }
  return acc;
}

PeriodicFunction apply_amplitude(const PhaseFunction& phi, const AmplitudeSymbol& amp, const PeriodicFunction& f) {
  return apply_amplitude(phi, amp, f, FrequencyCube::for_grid(f.grid));
}

PeriodicFunction apply_amplitude(const PhaseFunction& phi, const AmplitudeSymbol& amp, const PeriodicFunction& f,
                                 const FrequencyCube& cube) {
  const TorusGrid& g = f.grid;
  if (phi.dim != g.dim() || cube.dim() != g.dim() || amp.dim != g.dim())
    throw Error(ErrorKind::Dimension, "phase, amplitude, grid and cube must share a dimension");
  if (!cube.fits(g)) throw Error(ErrorKind::Aliasing, "cube exceeds the grid", 0);
  const int dim = g.dim();
  PeriodicFunction out(g);
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(g.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < rows; ++k) {
    try {
      const Coord x = g.node(k);
      Complex acc(0.0);
      for (std::size_t i = 0; i < cube.size(); ++i) {
        const Index xi = cube.point(i);
        const Coord xc = to_coord(xi);
        const double ph = phi.value(x, xc);
        if (!std::isfinite(ph))
          throw Error(ErrorKind::Numeric, "non-finite phase at x=" + format_coord(x, dim) +
                                              " xi=" + format_index(xi, dim));
        Complex inner(0.0);
        for (std::size_t y = 0; y < g.size(); ++y) {
          const Coord yc = g.node(y);
          inner += unimodular(-dot(yc, xi, dim)) * amp(x, yc, xi) * f.values[y];
        }
        acc += unimodular(ph) * inner * g.weight();
      }
      out.values[k] = acc;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ------------------------------------------------------------------ dense

std::vector<Complex> DenseOperator::apply(const std::vector<Complex>& f) const {
  if (f.size() != static_cast<std::size_t>(matrix.cols()))
    throw Error(ErrorKind::Dimension, "vector does not match the dense operator");
  std::vector<Complex> out(static_cast<std::size_t>(matrix.rows()));
  Eigen::Map<const Eigen::VectorXcd> in(f.data(), matrix.cols());
  Eigen::Map<Eigen::VectorXcd> res(out.data(), matrix.rows());
  res.noalias() = matrix * in;
  return out;
}

DenseOperator assemble_matrix(const FsoOperator& A) {
  const TorusGrid& g = A.grid;
  if (g.size() > kMaxDenseNodes)
    throw Error(ErrorKind::Resource,
                "dense assembly limited to " + std::to_string(kMaxDenseNodes) + " nodes, got " + std::to_string(g.size()));
  const FsoKernel& kern = A.kernel();
  const int dim = g.dim();
  const auto rows = static_cast<Eigen::Index>(g.size());
  const auto freqs = static_cast<Eigen::Index>(A.cube.size());

  // F[xi, k] = N^{-n} e^{-2 pi i x_k.xi}
  Eigen::MatrixXcd f(freqs, rows);
  for (Eigen::Index i = 0; i < freqs; ++i) {
    const Index xi = A.cube.point(static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k < rows; ++k)
      f(i, k) = g.weight() * unimodular(-dot(g.node(static_cast<std::size_t>(k)), xi, dim));
  }
  DenseOperator M;
  M.grid = g;
  M.matrix = kern.kernel_matrix() * f;
  M.provenance = "phase=" + A.phase.name + ";symbol=" + A.symbol.name() + ";N=" +
                 std::to_string(g.points_per_axis()) + ";n=" + std::to_string(dim) +
                 ";cutoff=" + std::to_string(A.cube.cutoff()) + ";path=" + kern.path_name();

  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    Stream st(0x5eedULL, static_cast<std::uint64_t>(t));
    std::vector<Complex> v(g.size());
    for (auto& c : v) c = st.complex_normal();
    const auto direct = kern.apply(v);
    const auto dense = M.apply(v);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      num = std::max(num, std::abs(direct[k] - dense[k]));
      den = std::max(den, std::abs(direct[k]));
    }
    worst = std::max(worst, den > 0.0 ? num / den : num);
  }
  M.consistency_error = worst;
  if (worst > 1e-9)
    throw Error(ErrorKind::Numeric, "dense assembly disagrees with direct application (relative error " +
                                        std::to_string(worst) + ")");
  return M;
}

DenseOperator adjoint(const DenseOperator& M) {
  DenseOperator out;
  out.grid = M.grid;
  out.matrix = M.matrix.adjoint();
  out.provenance = "adjoint(" + M.provenance + ")";
  out.consistency_error = M.consistency_error;
  return out;
}

Complex inner_product(const std::vector<Complex>& f, const std::vector<Complex>& g, const TorusGrid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size())
    throw Error(ErrorKind::Dimension, "inner product operands do not match the grid");
  Complex acc(0.0);
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * std::conj(g[k]);
  return acc * grid.weight();
}

}  // namespace torusfio
