#include "shg/fft.hpp"

#include <fftw3.h>

#include <cstring>

namespace shg {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct Fft3::Impl {
  fftw_plan fwd = nullptr, inv = nullptr;
  fftw_complex* buf = nullptr;
};

Fft3::Fft3(std::array<int, 3> n) : impl_(std::make_unique<Impl>()) {
  size_ = std::size_t(n[0]) * n[1] * n[2];
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  impl_->buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
  impl_->fwd = fftw_plan_dft_3d(n[2], n[1], n[0], impl_->buf, impl_->buf, FFTW_FORWARD,
                                FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_3d(n[2], n[1], n[0], impl_->buf, impl_->buf, FFTW_BACKWARD,
                                FFTW_ESTIMATE);
}

Fft3::~Fft3() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->buf);
}

// std::complex<double> is layout compatible with fftw_complex; the plans were
// made for an aligned buffer, so copy through it.
void Fft3::forward(std::vector<cplx>& data) const {
  std::memcpy(impl_->buf, data.data(), sizeof(fftw_complex) * size_);
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(data.data()), impl_->buf, sizeof(fftw_complex) * size_);
}

void Fft3::inverse(std::vector<cplx>& data) const {
  std::memcpy(impl_->buf, data.data(), sizeof(fftw_complex) * size_);
  fftw_execute(impl_->inv);
  double s = 1.0 / double(size_);
  auto* b = reinterpret_cast<cplx*>(impl_->buf);
  for (std::size_t i = 0; i < size_; ++i) data[i] = b[i] * s;
}

}  // namespace shg
