#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "adm/deconvolution.hpp"
#include "adm/error.hpp"
#include "adm/field.hpp"
#include "adm/filters.hpp"

namespace adm {

/// ||tau_N||_0 for tau_N = u (x) u - D_N G u (x) D_N G u.
///
/// The six distinct tensor entries are formed on the collocation grid, transformed and
/// restricted to the 2/3 band; the norm is the Frobenius sum over all kept modes, mean
/// included, i.e. the L^2 norm divided by the box volume.
inline double residual_stress_norm(const SpectralField& u, const FilterSpec& spec, int order) {
  validate(DeconvOp{spec, order}, /*allow_identity=*/true);
  const DeconvOp op{spec, order};
  const SpectralField approx = scale_modes(u, [&](double k2) { return deconv_symbol(op, k2) * filter_symbol(spec, k2); });
  const auto& lat = u.lattice();
  const PhysicalField pu = to_physical(u);
  const PhysicalField pa = to_physical(approx);
  auto& fft = fft_for(lat.n());

  std::vector<double> tau(lat.size());
  std::vector<Complex> hat(lat.size());
  double sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      for (std::size_t x = 0; x < tau.size(); ++x)
        tau[x] = pu.samples[i][x] * pu.samples[j][x] - pa.samples[i][x] * pa.samples[j][x];
      fft.forward(tau, hat);
      double s = 0.0;
      for_each_mode(lat, [&](const Mode& m) {
        if (lat.dealiased(m.m1, m.m2, m.m3) && !lat.nyquist(m.m1, m.m2, m.m3)) s += std::norm(hat[m.idx]);
      });
      sum += (i == j ? 1.0 : 2.0) * s;
    }
  return std::sqrt(sum);
}

/// ||u - D_N G u||_{1/2} from the exact mode sum
/// sum_k (x/(1+x))^{2(N+1)} |k| |u_k|^2 with x = alpha^{2p}|k|^{2p}.
inline double half_norm_defect(const SpectralField& u, const FilterSpec& spec, int order) {
  if (!std::holds_alternative<Helmholtz>(spec)) throw DomainError("half_norm_defect needs a Helmholtz filter");
  if (order < 0) throw DomainError("deconvolution order must be >= 0");
  validate(spec, /*allow_identity=*/true);
  const double e = 2.0 * (order + 1.0);
  double sum = 0.0;
  for_each_mode(u.lattice(), [&](const Mode& m) {
    if (m.k2 == 0.0) return;
    const SymbolPair sp = symbol_pair(spec, m.k2);
    if (sp.one_minus_g == 0.0) return;
    double a = 0.0;
    for (int c = 0; c < 3; ++c) a += std::norm(u.at(c, m.idx));
    sum += std::exp(e * detail::log_complement(sp)) * std::sqrt(m.k2) * a;
  });
  return std::sqrt(sum);
}

/// alpha (2p(N+1))^{-1/(2p)} ||u||_1^2, the bound on half_norm_defect^2.
inline double bound_defect(double u_h1, double alpha, double p, int order) {
  return alpha * std::pow(2.0 * p * (order + 1.0), -1.0 / (2.0 * p)) * u_h1 * u_h1;
}

/// 2 C alpha (2p(N+1))^{-1/(2p)} ||u||_1^4, the bound on ||tau_N||_0^2.
inline double bound_residual(double u_h1, double sobolev_c, double alpha, double p, int order) {
  if (!(sobolev_c > 0.0)) throw DomainError("C must be > 0");
  return 2.0 * sobolev_c * alpha * std::pow(2.0 * p * (order + 1.0), -1.0 / (2.0 * p)) * std::pow(u_h1, 4);
}

/// A bound that may not fit in a double: natural log plus the value when representable
/// (+inf otherwise).
struct LogValue {
  double value;
  double log_value;
};

namespace detail {

inline LogValue from_log(double log_value) {
  return {std::exp(log_value), log_value};  // exp overflows to +inf, underflows to 0
}

// log( u^4 exp(u^4 / nu^3) ); -inf when u = 0
inline double log_gronwall(double u_l4h1, double nu) {
  if (u_l4h1 == 0.0) return -std::numeric_limits<double>::infinity();
  const double u4 = std::pow(u_l4h1, 4);
  return 4.0 * std::log(u_l4h1) + u4 / (nu * nu * nu);
}

}  // namespace detail

/// 16 C alpha / (nu (2p(N+1))^{1/(2p)}) * U^4 exp(U^4 / nu^3), U = ||u||_{L^4(H^1)}.
inline LogValue bound_main(double u_l4h1, double nu, double sobolev_c, double alpha, double p, int order) {
  if (!(nu > 0.0)) throw DomainError("nu must be > 0");
  const double lg = std::log(16.0 * sobolev_c * alpha / nu) - std::log(2.0 * p * (order + 1.0)) / (2.0 * p) +
                    detail::log_gronwall(u_l4h1, nu);
  return detail::from_log(lg);
}

struct PowerBound {
  LogValue bound;  ///< 14 C mu sqrt(m) / (nu (4(N+1))^{1/(2m)}) U^4 exp(U^4/nu^3)
  LogValue limit;  ///< same with mu sqrt(m) <= 5 alpha, alpha^2 = 24 m mu^2
};

inline PowerBound bound_main_hm(double u_l4h1, double nu, double sobolev_c, double mu, int m, int order) {
  if (!(nu > 0.0)) throw DomainError("nu must be > 0");
  if (m < 1) throw DomainError("m must be >= 1");
  const double rate = std::log(4.0 * (order + 1.0)) / (2.0 * m);
  const double g = detail::log_gronwall(u_l4h1, nu);
  const double alpha = mu * std::sqrt(24.0 * m);
  return {detail::from_log(std::log(14.0 * sobolev_c * mu * std::sqrt(static_cast<double>(m)) / nu) - rate + g),
          detail::from_log(std::log(70.0 * sobolev_c * alpha / nu) - rate + g)};
}

/// log10 of kappa = U^4 exp(U^4 / nu^3) / nu, evaluated in log space; -inf for U = 0.
inline double kappa_log10(double u_l4h1, double nu) {
  if (!(nu > 0.0)) throw DomainError("nu must be > 0");
  if (u_l4h1 == 0.0) return -std::numeric_limits<double>::infinity();
  const double u4 = std::pow(u_l4h1, 4);
  return std::log10(u4 / nu) + u4 / (nu * nu * nu * std::numbers::ln10);
}

/// A shear layer of given thickness inside a box, with uniform velocity gradient, held
/// for a duration. Defaults describe an atmospheric boundary layer in SI units.
struct ShearLayer {
  double gradient = 3e4;   // 1/s
  double thickness = 0.1;  // m
  double width = 1.0;      // m
  double length = 1.0;     // m
  double duration = 1.0;   // s
  double nu = 2e-5;        // m^2/s
};

/// ||u||_{L^4(H^1)} = ( duration * (gradient^2 * layer volume)^2 )^{1/4}.
inline double l4h1_norm(const ShearLayer& s) {
  const double h1_sq = s.gradient * s.gradient * s.thickness * s.width * s.length;
  return std::pow(s.duration * h1_sq * h1_sq, 0.25);
}

struct RateFit {
  double beta;  ///< minus the slope of ln e against ln(N+1)
  double r2;
};

/// Least-squares power law e ~ (N+1)^{-beta}.
inline RateFit fit_rate(std::span<const std::pair<int, double>> series) {
  if (series.size() < 4) throw DomainError("fit_rate needs at least 4 points");
  const double n = static_cast<double>(series.size());
  double sx = 0, sy = 0;
  for (const auto& [N, e] : series) {
    if (!(e > 0.0) || N < 0) throw DomainError("fit_rate needs N >= 0 and e > 0");
    sx += std::log(N + 1.0);
    sy += std::log(e);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [N, e] : series) {
    const double dx = std::log(N + 1.0) - mx, dy = std::log(e) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("fit_rate needs at least two distinct N");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {-slope, r2};
}

/// Smallest C with ||tau_N||^2 <= 2 C ||u||_1^2 ||u - D_N G u||_{1/2}^2 over the given
/// fields and orders. Pairs with a vanishing defect are skipped.
inline double calibrate_sobolev_constant(std::span<const SpectralField> fields, const FilterSpec& spec,
                                         std::span<const int> orders) {
  double best = 0.0;
  for (const auto& u : fields) {
    const double h1 = sobolev_norm(u, 1.0);
    for (const int N : orders) {
      const double half = half_norm_defect(u, spec, N);
      if (half == 0.0 || h1 == 0.0) continue;
      const double tau = residual_stress_norm(u, spec, N);
      best = std::max(best, tau * tau / (2.0 * h1 * h1 * half * half));
    }
  }
  return best;
}

}  // namespace adm
