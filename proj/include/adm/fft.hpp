#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "adm/error.hpp"

namespace adm {

using Complex = std::complex<double>;

namespace detail {

// FFTW's planner is not thread safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// In-place 3D complex transform of an n^3 cube with the series normalisation
/// u(x) = sum_k u_k exp(i k.x): forward divides by n^3, backward does not.
///
/// One instance owns a scratch buffer, so it must not be shared between threads.
/// Use fft_for(n) to get the calling thread's instance.
class Fft3 {
 public:
  explicit Fft3(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
    buf_ = fftw_alloc_complex(size_);
    if (buf_ == nullptr) throw Error("fftw allocation failed");
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;
  ~Fft3() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buf_);
  }

  int n() const noexcept { return n_; }

  /// Real samples to normalised coefficients.
  void forward(std::span<const double> in, std::span<Complex> out) {
    for (std::size_t i = 0; i < size_; ++i) {
      buf_[i][0] = in[i];
      buf_[i][1] = 0.0;
    }
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = Complex(buf_[i][0] * scale, buf_[i][1] * scale);
  }

  /// Coefficients to real samples; the imaginary residue of a Hermitian input is dropped.
  void backward(std::span<const Complex> in, std::span<double> out) {
    for (std::size_t i = 0; i < size_; ++i) {
      buf_[i][0] = in[i].real();
      buf_[i][1] = in[i].imag();
    }
    fftw_execute(backward_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = buf_[i][0];
  }

 private:
  int n_;
  std::size_t size_;
  fftw_complex* buf_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Thread-local transform for cubes of side n.
inline Fft3& fft_for(int n) {
  thread_local std::map<int, std::unique_ptr<Fft3>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft3>(n);
  return *slot;
}

}  // namespace adm
