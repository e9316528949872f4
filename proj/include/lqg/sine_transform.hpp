#pragma once

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "error.hpp"

namespace lqg::detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline void r2r_2d_inplace(std::vector<double>& data, int n, fftw_r2r_kind kind) {
  require(n >= 1 && data.size() == static_cast<std::size_t>(n) * n, ErrorCode::DimensionMismatch,
          "transform buffer must be n*n");
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_2d(n, n, data.data(), data.data(), kind, kind,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

/// In place: Y[a][b] = sum_{p,q} X[p][q] w_p w_q sin(pi(2a+1)(p+1)/2n) sin(pi(2b+1)(q+1)/2n)
/// with w = 2 except w = 1 at the last index (FFTW RODFT01, unnormalized).
inline void dst3_2d(std::vector<double>& data, int n) { r2r_2d_inplace(data, n, FFTW_RODFT01); }

/// In place: Y[a][b] = 4 sum_{p,q} X[p][q] sin(pi(p+1)(a+1)/(n+1)) sin(pi(q+1)(b+1)/(n+1))
/// (FFTW RODFT00, unnormalized).
inline void dst1_2d(std::vector<double>& data, int n) { r2r_2d_inplace(data, n, FFTW_RODFT00); }

}  // namespace lqg::detail
