#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <vector>

#include "shg/core.hpp"

namespace shg {

// FFTW planning is not thread safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex();

// Unnormalized complex 3D transform on an x-fastest array.
class Fft3 {
 public:
  explicit Fft3(std::array<int, 3> n);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::size_t size() const { return size_; }
  void forward(std::vector<cplx>& data) const;
  // includes the 1/N normalization
  void inverse(std::vector<cplx>& data) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t size_;
};

}  // namespace shg
