#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace wdl {

using cplx = std::complex<double>;

enum class FftDirection { kForward, kBackward };

/// Unnormalized in-place complex DFT (FFTW, FFTW_ESTIMATE so that plans and
/// therefore results do not depend on timing).  A plan may be executed on any
/// buffer of the planned size from any thread.
class FftPlan {
 public:
  /// Full transform over a row-major array of the given shape.
  FftPlan(std::vector<int> shape, FftDirection dir);
  /// `howmany` 1-d transforms of length n, element stride `stride`, batch distance `dist`.
  FftPlan(int n, int howmany, int stride, int dist, FftDirection dir);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  void execute(cplx* data) const;
  void execute(std::vector<cplx>& data) const { execute(data.data()); }
  std::size_t size() const { return size_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_ = 0;
};

/// Per-thread plan cache keyed by shape and direction.
const FftPlan& cached_plan(const std::vector<int>& shape, FftDirection dir);

}  // namespace wdl
