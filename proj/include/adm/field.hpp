#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "adm/error.hpp"
#include "adm/fft.hpp"
#include "adm/lattice.hpp"

namespace adm {

/// Fourier coefficients of a real vector field on the torus, one complex array per
/// component in lattice storage order.
///
/// Invariants expected of a valid field: zero mean, Hermitian pairing u_{-k} = conj(u_k),
/// Nyquist slots at zero, and k.u_k = 0 when the field is flagged solenoidal. Arithmetic
/// helpers keep these whenever their inputs do; check_invariants() measures them.
class SpectralField {
 public:
  explicit SpectralField(const WaveLattice& lat, bool solenoidal = true) : lat_(lat), solenoidal_(solenoidal) {
    for (auto& c : coeffs_) c.assign(lat.size(), Complex{});
  }

  const WaveLattice& lattice() const noexcept { return lat_; }
  bool solenoidal() const noexcept { return solenoidal_; }
  void set_solenoidal(bool s) noexcept { solenoidal_ = s; }

  std::span<Complex> component(int c) noexcept { return coeffs_[c]; }
  std::span<const Complex> component(int c) const noexcept { return coeffs_[c]; }
  Complex& at(int c, std::size_t idx) noexcept { return coeffs_[c][idx]; }
  const Complex& at(int c, std::size_t idx) const noexcept { return coeffs_[c][idx]; }

  SpectralField& operator+=(const SpectralField& o) {
    require_same(o);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < coeffs_[c].size(); ++i) coeffs_[c][i] += o.coeffs_[c][i];
    solenoidal_ = solenoidal_ && o.solenoidal_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same(o);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < coeffs_[c].size(); ++i) coeffs_[c][i] -= o.coeffs_[c][i];
    solenoidal_ = solenoidal_ && o.solenoidal_;
    return *this;
  }
  SpectralField& operator*=(double s) noexcept {
    for (auto& c : coeffs_)
      for (auto& v : c) v *= s;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  void require_same(const SpectralField& o) const {
    if (!(lat_ == o.lat_)) throw LatticeMismatch();
  }

 private:
  WaveLattice lat_;
  std::array<std::vector<Complex>, 3> coeffs_;
  bool solenoidal_;
};

/// Velocity samples on the n^3 collocation grid x = (i, j, l) * L / n.
struct PhysicalField {
  explicit PhysicalField(const WaveLattice& lat) : lattice(lat) {
    for (auto& c : samples) c.assign(lat.size(), 0.0);
  }
  WaveLattice lattice;
  std::array<std::vector<double>, 3> samples;
};

inline PhysicalField to_physical(const SpectralField& f) {
  PhysicalField out(f.lattice());
  auto& fft = fft_for(f.lattice().n());
  for (int c = 0; c < 3; ++c) fft.backward(f.component(c), out.samples[c]);
  return out;
}

/// Forward transform. Nyquist slots are cleared; the mean is kept as computed.
inline SpectralField to_spectral(const PhysicalField& p, bool solenoidal = false) {
  SpectralField out(p.lattice, solenoidal);
  auto& fft = fft_for(p.lattice.n());
  for (int c = 0; c < 3; ++c) fft.forward(p.samples[c], out.component(c));
  for_each_mode(p.lattice, [&](const Mode& m) {
    if (p.lattice.nyquist(m.m1, m.m2, m.m3))
      for (int c = 0; c < 3; ++c) out.at(c, m.idx) = 0.0;
  });
  return out;
}

/// Multiplies every mode by symbol(k2).
template <class Symbol>
SpectralField scale_modes(const SpectralField& f, Symbol&& symbol) {
  SpectralField out(f.lattice(), f.solenoidal());
  for_each_mode(f.lattice(), [&](const Mode& m) {
    const double s = symbol(m.k2);
    for (int c = 0; c < 3; ++c) out.at(c, m.idx) = s * f.at(c, m.idx);
  });
  return out;
}

/// ( sum_{k != 0} |k|^{2s} |u_k|^2 )^{1/2}
inline double sobolev_norm(const SpectralField& f, double s) {
  double sum = 0.0;
  for_each_mode(f.lattice(), [&](const Mode& m) {
    if (m.k2 == 0.0) return;
    const double w = s == 0.0 ? 1.0 : std::pow(m.k2, s);
    double a = 0.0;
    for (int c = 0; c < 3; ++c) a += std::norm(f.at(c, m.idx));
    sum += w * a;
  });
  return std::sqrt(sum);
}

/// Orthogonal projection onto divergence-free fields: u_k - k (k.u_k) / |k|^2.
inline SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  for_each_mode(f.lattice(), [&](const Mode& m) {
    if (m.k2 == 0.0) return;
    const Complex div = m.kx * f.at(0, m.idx) + m.ky * f.at(1, m.idx) + m.kz * f.at(2, m.idx);
    const Complex r = div / m.k2;
    out.at(0, m.idx) -= m.kx * r;
    out.at(1, m.idx) -= m.ky * r;
    out.at(2, m.idx) -= m.kz * r;
  });
  out.set_solenoidal(true);
  return out;
}

/// Zeroes every mode outside the 2/3-rule band and every Nyquist slot.
inline void dealias(SpectralField& f) {
  const auto& lat = f.lattice();
  for_each_mode(lat, [&](const Mode& m) {
    if (!lat.dealiased(m.m1, m.m2, m.m3) || lat.nyquist(m.m1, m.m2, m.m3))
      for (int c = 0; c < 3; ++c) f.at(c, m.idx) = 0.0;
  });
}

/// Coefficients of div(u (x) v), i.e. component i is sum_j d_j (u_i v_j), formed from
/// pointwise products on the collocation grid and dealiased by the 2/3 rule.
inline SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v) {
  u.require_same(v);
  const auto& lat = u.lattice();
  const PhysicalField pu = to_physical(u);
  const PhysicalField pv = (&u == &v) ? pu : to_physical(v);
  auto& fft = fft_for(lat.n());

  SpectralField out(lat, false);
  std::vector<double> prod(lat.size());
  std::vector<Complex> hat(lat.size());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto& a = pu.samples[i];
      const auto& b = pv.samples[j];
      for (std::size_t x = 0; x < prod.size(); ++x) prod[x] = a[x] * b[x];
      fft.forward(prod, hat);
      auto dst = out.component(i);
      for_each_mode(lat, [&](const Mode& m) {
        const double kj = j == 0 ? m.kx : (j == 1 ? m.ky : m.kz);
        dst[m.idx] += Complex(0.0, kj) * hat[m.idx];
      });
    }
  }
  dealias(out);
  return out;
}

/// Measured departures from the SpectralField invariants.
struct InvariantReport {
  double max_abs = 0.0;       ///< max |u_k| over components and modes
  double mean_abs = 0.0;      ///< |u_0|
  double hermitian_rel = 0.0; ///< max |u_{-k} - conj(u_k)| / max_abs
  double nyquist_abs = 0.0;   ///< max |u_k| on Nyquist slots
  double divergence_rel = 0.0;///< max |k.u_k| / (|k| max_abs)
};

inline InvariantReport check_invariants(const SpectralField& f) {
  InvariantReport r;
  const auto& lat = f.lattice();
  for (int c = 0; c < 3; ++c)
    for (const auto& v : f.component(c)) r.max_abs = std::max(r.max_abs, std::abs(v));
  if (r.max_abs == 0.0) return r;
  double herm = 0.0, div = 0.0;
  for_each_mode(lat, [&](const Mode& m) {
    double a = 0.0;
    for (int c = 0; c < 3; ++c) a = std::max(a, std::abs(f.at(c, m.idx)));
    if (m.k2 == 0.0) {
      r.mean_abs = a;
      return;
    }
    if (lat.nyquist(m.m1, m.m2, m.m3)) {
      r.nyquist_abs = std::max(r.nyquist_abs, a);
      return;
    }
    const std::size_t mirror = lat.index_of_mode(-m.m1, -m.m2, -m.m3);
    for (int c = 0; c < 3; ++c) herm = std::max(herm, std::abs(f.at(c, mirror) - std::conj(f.at(c, m.idx))));
    const Complex d = m.kx * f.at(0, m.idx) + m.ky * f.at(1, m.idx) + m.kz * f.at(2, m.idx);
    div = std::max(div, std::abs(d) / std::sqrt(m.k2));
  });
  r.hermitian_rel = herm / r.max_abs;
  r.divergence_rel = div / r.max_abs;
  return r;
}

inline double divergence_defect(const SpectralField& f) { return check_invariants(f).divergence_rel; }

inline bool all_finite(const SpectralField& f) {
  for (int c = 0; c < 3; ++c)
    for (const auto& v : f.component(c))
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

/// Largest pointwise speed on the collocation grid.
inline double max_speed(const SpectralField& f) {
  const PhysicalField p = to_physical(f);
  double m = 0.0;
  for (std::size_t i = 0; i < p.samples[0].size(); ++i) {
    const double s = p.samples[0][i] * p.samples[0][i] + p.samples[1][i] * p.samples[1][i] +
                     p.samples[2][i] * p.samples[2][i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

/// amplitude * (sin(kx) cos(ky) cos(kz), -cos(kx) sin(ky) cos(kz), 0) with k = 2*pi/L,
/// the three-dimensional Taylor-Green vortex.
inline SpectralField taylor_green(const WaveLattice& lat, double amplitude = 1.0) {
  SpectralField f(lat, true);
  const Complex q = Complex(0.0, -0.125 * amplitude);  // 1/(8i)
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) {
        const std::size_t idx = lat.index_of_mode(s1, s2, s3);
        f.at(0, idx) = q * static_cast<double>(s1);
        f.at(1, idx) = -q * static_cast<double>(s2);
      }
  return f;
}

/// amplitude * (sin(kx) cos(ky), -cos(kx) sin(ky), 0), the planar Taylor-Green cell.
inline SpectralField taylor_green_2d(const WaveLattice& lat, double amplitude = 1.0) {
  SpectralField f(lat, true);
  const Complex q = Complex(0.0, -0.25 * amplitude);  // 1/(4i)
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1}) {
      const std::size_t idx = lat.index_of_mode(s1, s2, 0);
      f.at(0, idx) = q * static_cast<double>(s1);
      f.at(1, idx) = -q * static_cast<double>(s2);
    }
  return f;
}

/// Random solenoidal field with |u_k| ~ |k|^{-decay} and Gaussian phases, Hermitian by
/// construction. Only 2/3-band modes are populated when band_limited is set.
inline SpectralField random_field(const WaveLattice& lat, double decay, std::uint64_t seed,
                                  bool band_limited = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField f(lat, true);
  for_each_mode(lat, [&](const Mode& m) {
    if (m.k2 == 0.0 || lat.nyquist(m.m1, m.m2, m.m3)) return;
    if (band_limited && !lat.dealiased(m.m1, m.m2, m.m3)) return;
    const std::size_t mirror = lat.index_of_mode(-m.m1, -m.m2, -m.m3);
    if (mirror < m.idx) return;  // partner already set
    const double amp = std::pow(m.k2, -0.5 * decay);
    for (int c = 0; c < 3; ++c) {
      const double re = gauss(rng), im = gauss(rng);
      f.at(c, m.idx) = amp * Complex(re, im);
      f.at(c, mirror) = std::conj(f.at(c, m.idx));
    }
  });
  return leray_project(f);
}

}  // namespace adm
