#include "wdl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

#include "wdl/errors.hpp"

namespace wdl {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int sign_of(FftDirection dir) { return dir == FftDirection::kForward ? FFTW_FORWARD : FFTW_BACKWARD; }

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

struct FftPlan::Impl {
  fftw_plan plan = nullptr;
  ~Impl() {
    if (plan) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FftPlan::FftPlan(std::vector<int> shape, FftDirection dir) : impl_(std::make_unique<Impl>()) {
  size_ = 1;
  for (int s : shape) size_ *= static_cast<std::size_t>(s);
  std::vector<cplx> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf,
                              sign_of(dir), kFlags);
  if (!impl_->plan) throw NumericalError("FFTW planning failed");
}

FftPlan::FftPlan(int n, int howmany, int stride, int dist, FftDirection dir)
    : impl_(std::make_unique<Impl>()) {
  size_ = static_cast<std::size_t>((howmany - 1) * dist + (n - 1) * stride + 1);
  std::vector<cplx> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->plan = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr,
                                   stride, dist, sign_of(dir), kFlags);
  if (!impl_->plan) throw NumericalError("FFTW planning failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

const FftPlan& cached_plan(const std::vector<int>& shape, FftDirection dir) {
  thread_local std::map<std::pair<std::vector<int>, int>, std::unique_ptr<FftPlan>> cache;
  auto key = std::make_pair(shape, static_cast<int>(dir));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(shape, dir)).first;
  return *it->second;
}

void FftPlan::execute(cplx* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->plan, buf, buf);
}

}  // namespace wdl
