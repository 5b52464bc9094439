#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <string>

#include "adm/error.hpp"

namespace adm {

/// Truncated set of Fourier modes on the cube [0, L)^3 sampled by n points per axis.
///
/// Storage follows the FFT convention: along each axis index i holds the integer mode
/// i for i < n/2 and i - n otherwise, and the flat index is (i*n + j)*n + l, with the
/// first axis varying slowest. The physical wavevector of mode m is (2*pi/L) * m.
class WaveLattice {
 public:
  explicit WaveLattice(int n, double box = 2.0 * std::numbers::pi) : n_(n), box_(box) {
    if (n < 4 || n % 2 != 0) throw DomainError("lattice size must be even and >= 4, got " + std::to_string(n));
    if (!(box > 0.0) || !std::isfinite(box)) throw DomainError("box size must be positive");
  }

  int n() const noexcept { return n_; }
  double box() const noexcept { return box_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_ * n_; }
  double k_unit() const noexcept { return 2.0 * std::numbers::pi / box_; }
  double dx() const noexcept { return box_ / n_; }

  int mode(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
  int slot(int m) const noexcept { return m >= 0 ? m : m + n_; }

  std::size_t index(int i, int j, int l) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
  }
  std::size_t index_of_mode(int m1, int m2, int m3) const noexcept {
    return index(slot(m1), slot(m2), slot(m3));
  }

  /// True when any component sits at -n/2. Those modes have no partner and are kept at zero.
  bool nyquist(int m1, int m2, int m3) const noexcept {
    const int h = -n_ / 2;
    return m1 == h || m2 == h || m3 == h;
  }

  /// Modes retained by the 2/3 rule: 3|m| < n on every axis.
  bool dealiased(int m1, int m2, int m3) const noexcept {
    return 3 * std::abs(m1) < n_ && 3 * std::abs(m2) < n_ && 3 * std::abs(m3) < n_;
  }

  friend bool operator==(const WaveLattice& a, const WaveLattice& b) noexcept {
    return a.n_ == b.n_ && a.box_ == b.box_;
  }

 private:
  int n_;
  double box_;
};

/// Mode coordinates handed to per-mode visitors.
struct Mode {
  std::size_t idx;
  int m1, m2, m3;
  double kx, ky, kz;
  double k2;
};

/// Visits every lattice slot in storage order.
template <class F>
void for_each_mode(const WaveLattice& lat, F&& f) {
  const int n = lat.n();
  const double ku = lat.k_unit();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const int m1 = lat.mode(i);
    const double kx = ku * m1;
    for (int j = 0; j < n; ++j) {
      const int m2 = lat.mode(j);
      const double ky = ku * m2;
      for (int l = 0; l < n; ++l, ++idx) {
        const int m3 = lat.mode(l);
        const double kz = ku * m3;
        f(Mode{idx, m1, m2, m3, kx, ky, kz, kx * kx + ky * ky + kz * kz});
      }
    }
  }
}

}  // namespace adm
