#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>

namespace kdvcurve::detail {

// FFTW plans for one transform length. Planning is serialized through the
// cache mutex; execution uses the new-array interface and is reentrant.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // out_k = sum_j in_j exp(-2 pi i jk/n), unnormalized.
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(forward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(backward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }
  std::size_t size() const noexcept { return n_; }

 private:
  static fftw_complex* as_fftw(std::span<const std::complex<double>> s) {
    // FFTW never writes through the input pointer of an out-of-place plan.
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(s.data()));
  }

  std::size_t n_;
  fftw_plan forward_;
  fftw_plan backward_;
};

inline const FftPlan& plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace kdvcurve::detail
