#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "adm/error.hpp"
#include "adm/field.hpp"

namespace adm {

/// Generalised Helmholtz filter (I + alpha^{2p} (-Delta)^p)^{-1}.
struct Helmholtz {
  double alpha = 1.0;
  double p = 1.0;
};

/// Gaussian filter with symbol exp(-alpha^2 |k|^2 / 24).
struct Gaussian {
  double alpha = 1.0;
};

/// m-th approximant of the Gaussian: (1 + alpha^2 |k|^2 / (24 m))^{-m}.
struct GaussianApprox {
  double alpha = 1.0;
  int m = 1;
};

/// m-th power of the second order Helmholtz operator: (1 + mu^2 |k|^2)^{-m}.
struct HelmholtzPower {
  double mu = 1.0;
  int m = 1;
};

using FilterSpec = std::variant<Helmholtz, Gaussian, GaussianApprox, HelmholtzPower>;

/// mu^2 = alpha^2 / (24 m), the width shared by GaussianApprox(alpha, m) and HelmholtzPower(mu, m).
inline double approx_mu2(double alpha, int m) { return alpha * alpha / (24.0 * m); }

/// Throws DomainError unless the spec is admissible. A zero width is accepted only when
/// allow_identity is set; the filter is then the identity.
inline void validate(const FilterSpec& spec, bool allow_identity = false) {
  auto width_ok = [&](double w) { return std::isfinite(w) && (w > 0.0 || (allow_identity && w == 0.0)); };
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Helmholtz>) {
          if (!width_ok(f.alpha)) throw DomainError("Helmholtz filter needs alpha > 0");
          if (!(f.p >= 0.75) || !std::isfinite(f.p)) throw DomainError("Helmholtz filter needs p >= 3/4");
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          if (!width_ok(f.alpha)) throw DomainError("Gaussian filter needs alpha > 0");
        } else if constexpr (std::is_same_v<T, GaussianApprox>) {
          if (!width_ok(f.alpha)) throw DomainError("Gaussian approximant needs alpha > 0");
          if (f.m < 1) throw DomainError("Gaussian approximant needs m >= 1");
        } else {
          if (!width_ok(f.mu)) throw DomainError("Helmholtz power needs mu > 0");
          if (f.m < 1) throw DomainError("Helmholtz power needs m >= 1");
        }
      },
      spec);
}

inline std::string describe(const FilterSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Helmholtz>)
          os << "helmholtz(alpha=" << f.alpha << ",p=" << f.p << ")";
        else if constexpr (std::is_same_v<T, Gaussian>)
          os << "gaussian(alpha=" << f.alpha << ")";
        else if constexpr (std::is_same_v<T, GaussianApprox>)
          os << "gaussian_approx(alpha=" << f.alpha << ",m=" << f.m << ")";
        else
          os << "helmholtz_power(mu=" << f.mu << ",m=" << f.m << ")";
      },
      spec);
  return os.str();
}

/// Filter symbol together with its complement 1 - G, each evaluated without cancellation.
struct SymbolPair {
  double g;
  double one_minus_g;
};

inline SymbolPair symbol_pair(const FilterSpec& spec, double k2) {
  if (k2 == 0.0) return {1.0, 0.0};
  return std::visit(
      [&](const auto& f) -> SymbolPair {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Helmholtz>) {
          const double x = std::pow(f.alpha * f.alpha * k2, f.p);  // alpha^{2p} |k|^{2p}
          if (std::isinf(x)) return {0.0, 1.0};
          return {1.0 / (1.0 + x), x / (1.0 + x)};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double z = f.alpha * f.alpha * k2 / 24.0;
          return {std::exp(-z), -std::expm1(-z)};
        } else {
          double mu2;
          int m;
          if constexpr (std::is_same_v<T, GaussianApprox>) {
            mu2 = approx_mu2(f.alpha, f.m);
            m = f.m;
          } else {
            mu2 = f.mu * f.mu;
            m = f.m;
          }
          const double e = -m * std::log1p(mu2 * k2);
          return {std::exp(e), -std::expm1(e)};
        }
      },
      spec);
}

/// G_k as a function of |k|^2; equals 1 exactly at k2 = 0.
inline double filter_symbol(const FilterSpec& spec, double k2) { return symbol_pair(spec, k2).g; }

inline bool invertible(const FilterSpec& spec) { return !std::holds_alternative<Gaussian>(spec); }

/// A_k = 1 / G_k, or nothing for the Gaussian.
inline std::optional<double> inverse_symbol(const FilterSpec& spec, double k2) {
  if (!invertible(spec)) return std::nullopt;
  if (k2 == 0.0) return 1.0;
  if (const auto* h = std::get_if<Helmholtz>(&spec)) return 1.0 + std::pow(h->alpha * h->alpha * k2, h->p);
  double mu2;
  int m;
  if (const auto* g = std::get_if<GaussianApprox>(&spec)) {
    mu2 = approx_mu2(g->alpha, g->m);
    m = g->m;
  } else {
    const auto& hp = std::get<HelmholtzPower>(spec);
    mu2 = hp.mu * hp.mu;
    m = hp.m;
  }
  return std::exp(m * std::log1p(mu2 * k2));
}

inline SpectralField apply_filter(const FilterSpec& spec, const SpectralField& f) {
  return scale_modes(f, [&](double k2) { return filter_symbol(spec, k2); });
}

inline SpectralField apply_inverse(const FilterSpec& spec, const SpectralField& f) {
  if (!invertible(spec)) throw NonInvertibleFilter();
  return scale_modes(f, [&](double k2) { return *inverse_symbol(spec, k2); });
}

/// |exp(-x) - (1 + x/m)^{-m}| at x = alpha^2 k2 / 24; never exceeds 2/m.
inline double gaussian_approx_error(double alpha, int m, double k2) {
  if (m < 1) throw DomainError("m must be >= 1");
  const double x = alpha * alpha * k2 / 24.0;
  const double exact = std::exp(-x);
  const double approx = std::exp(-m * std::log1p(x / m));
  return std::abs(exact - approx);
}

struct Sandwich {
  double lo;
  double mid;
  double hi;
};

/// Two-sided bound 1/(2^{m-1}(1 + y^m)) <= (1 + y)^{-m} <= 1/(1 + y^m) with y = mu^2 |k|^2.
inline Sandwich helmholtz_power_sandwich(double mu, int m, double k2) {
  if (m < 1) throw DomainError("m must be >= 1");
  const double y = mu * mu * k2;
  const double ym = std::pow(y, m);
  const double mid_den = std::pow(1.0 + y, m);
  double hi, mid;
  if (std::isfinite(ym) && std::isfinite(mid_den)) {
    hi = 1.0 / (1.0 + ym);
    mid = 1.0 / mid_den;
  } else {
    // log-space: -log(1 + y^m) = -(t + log1p(exp(-t))) with t = m log y > 0 here
    const double t = m * std::log(y);
    hi = std::exp(-(t + std::log1p(std::exp(-t))));
    mid = std::exp(-m * std::log1p(y));
  }
  const double lo = std::ldexp(hi, 1 - m);
  return {lo, mid, hi};
}

}  // namespace adm
