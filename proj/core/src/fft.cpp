#include <fftw3.h>
#include <omp.h>

#include <map>
#include <mutex>
#include <tuple>

#include "torusfio/error.hpp"
#include "torusfio/torus_fourier.hpp"

namespace torusfio {

namespace {

// The FFTW planner is not reentrant; execution of an existing plan on fresh
// arrays is. Plans are built once per shape and kept for the process lifetime.
class PlanCache {
 public:
  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    int dims[kMaxDim] = {n, n, n};
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!plan) throw Error(ErrorKind::Resource, "FFTW could not build a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void grid_dft(std::vector<Complex>& data, int dim, int points_per_axis, int sign) {
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(points_per_axis);
  if (data.size() != total)
    throw Error(ErrorKind::Dimension, "DFT buffer does not match the grid size");
  fftw_plan plan = cache().get(dim, points_per_axis, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::string fft_backend_version() { return fftw_version; }

}  // namespace torusfio
