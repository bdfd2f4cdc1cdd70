#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>

namespace fracvortex::detail {

/// The FFTW planner is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    if (p == nullptr) return;
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

/// Plans an in-place 2D real-to-real transform on an x-fastest nx-by-ny array.
/// FFTW_ESTIMATE keeps plan selection (and hence round-off) reproducible.
inline Plan plan_r2r_2d(int nx, int ny, double* data, fftw_r2r_kind kind) {
  std::lock_guard lock(fftw_planner_mutex());
  return Plan(fftw_plan_r2r_2d(ny, nx, data, data, kind, kind, FFTW_ESTIMATE));
}

}  // namespace fracvortex::detail
