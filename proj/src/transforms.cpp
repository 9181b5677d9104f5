#include "hmlab/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace hmlab {
namespace {

std::mutex plan_mutex;

// Plans live for the process; destroyed on shutdown so the FFTW internals do
// not show up as leaks under the sanitizers.
struct PlanCache {
  std::map<std::pair<int, bool>, fftw_plan> dft;
  std::map<int, fftw_plan> dst;
  ~PlanCache() {
    for (auto& [k, p] : dft) fftw_destroy_plan(p);
    for (auto& [k, p] : dst) fftw_destroy_plan(p);
    fftw_cleanup();
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan dft_plan(int n, bool forward) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& slot = cache().dft;
  auto it = slot.find({n, forward});
  if (it != slot.end()) return it->second;
  std::vector<fftw_complex> dummy(static_cast<std::size_t>(n) * n);
  fftw_plan p = fftw_plan_dft_2d(n, n, dummy.data(), dummy.data(),
                                 forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  slot[{n, forward}] = p;
  return p;
}

fftw_plan dst_plan(int m) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& slot = cache().dst;
  auto it = slot.find(m);
  if (it != slot.end()) return it->second;
  std::vector<double> dummy(static_cast<std::size_t>(m) * m);
  fftw_plan p = fftw_plan_r2r_2d(m, m, dummy.data(), dummy.data(), FFTW_RODFT00, FFTW_RODFT00,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  slot[m] = p;
  return p;
}

}  // namespace

void fft2(int n, const cplx* in, cplx* out, bool forward) {
  fftw_plan p = dft_plan(n, forward);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void dst2(int m, const double* in, double* out) {
  fftw_plan p = dst_plan(m);
  fftw_execute_r2r(p, const_cast<double*>(in), out);
}

}  // namespace hmlab
