#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "adm/error.hpp"
#include "adm/filters.hpp"

namespace adm {

/// Van Cittert deconvolution D_N = sum_{n=0}^{N} (I - G)^n bound to a filter.
struct DeconvOp {
  FilterSpec spec;
  int order = 0;  ///< N
};

inline void validate(const DeconvOp& op, bool allow_identity = false) {
  if (op.order < 0) throw DomainError("deconvolution order must be >= 0");
  validate(op.spec, allow_identity);
}

namespace detail {

// log(1 - G) from whichever of G and 1 - G carries full relative precision
inline double log_complement(const SymbolPair& s) { return s.g < 0.5 ? std::log1p(-s.g) : std::log(s.one_minus_g); }

}  // namespace detail

/// Below this filter value the closed form is replaced by its expansion in powers of G.
inline constexpr double kDeconvSeriesThreshold = 1e-8;

/// D_{N,k} = (1 - (1 - G_k)^{N+1}) / G_k; exactly 1 at k2 = 0 and for N = 0.
inline double deconv_symbol(const DeconvOp& op, double k2) {
  if (k2 == 0.0 || op.order == 0) return 1.0;
  const SymbolPair sp = symbol_pair(op.spec, k2);
  const double g = sp.g;
  const double np1 = op.order + 1.0;
  if (g < kDeconvSeriesThreshold) {
    // (1 - (1-G)^{N+1}) / G = sum_{j>=0} (-1)^j C(N+1, j+1) G^j
    double term = np1;
    double sum = term;
    for (int j = 1; j <= op.order; ++j) {
      term *= -g * (np1 - j) / (j + 1.0);
      sum += term;
      if (std::abs(term) < 1e-18 * sum) break;
    }
    return sum;
  }
  return -std::expm1(np1 * detail::log_complement(sp)) / g;
}

/// Symbol of D_N G: 1 - (alpha^{2p}|k|^{2p} / (1 + alpha^{2p}|k|^{2p}))^{N+1}. Helmholtz only.
inline double rho(const DeconvOp& op, double k2) {
  if (!std::holds_alternative<Helmholtz>(op.spec)) throw DomainError("rho is defined for Helmholtz filters only");
  if (k2 == 0.0) return 1.0;
  return -std::expm1((op.order + 1.0) * detail::log_complement(symbol_pair(op.spec, k2)));
}

inline SpectralField apply_deconv(const DeconvOp& op, const SpectralField& f) {
  return scale_modes(f, [&](double k2) { return deconv_symbol(op, k2); });
}

struct PropertyRow {
  std::string property;
  double k2;
  double lhs;
  double rhs;
  bool pass;
};

struct PropertyReport {
  std::vector<PropertyRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
  const PropertyRow* first_failure() const {
    for (const auto& r : rows)
      if (!r.pass) return &r;
    return nullptr;
  }
};

/// Relative slack allowed on the symbol bounds for rounding in the closed form.
inline constexpr double kPropertySlack = 1e-12;

/// Evaluates the structural properties of D_N on a grid of |k|^2 values.
///
/// Asserted per point: 1 <= D <= N+1 and D <= A. At the last grid point, when it exceeds
/// 1e12, |D - (N+1)| <= 1e-6 (N+1) is asserted. The large-|k| equivalence
/// D ~ (N+1)(1+x)/x is reported as a ratio and never fails.
inline PropertyReport check_properties(const DeconvOp& op, std::span<const double> k2_grid) {
  const auto* h = std::get_if<Helmholtz>(&op.spec);
  if (h == nullptr) throw DomainError("property check needs a Helmholtz filter");
  if (k2_grid.empty()) throw DomainError("empty k2 grid");
  validate(op);

  PropertyReport report;
  const double np1 = op.order + 1.0;
  for (const double k2 : k2_grid) {
    const double d = deconv_symbol(op, k2);
    const double a = *inverse_symbol(op.spec, k2);
    report.rows.push_back({"lower_bound", k2, 1.0, d, 1.0 <= d * (1.0 + kPropertySlack)});
    report.rows.push_back({"upper_bound", k2, d, np1, d <= np1 * (1.0 + kPropertySlack)});
    report.rows.push_back({"below_inverse", k2, d, a, d <= a * (1.0 + kPropertySlack)});
    const double x = a - 1.0;
    if (x > 0.0) {
      const double ratio = d / (np1 * (1.0 + x) / x);
      report.rows.push_back({"asymptotic_ratio", k2, ratio, 1.0, true});
    }
  }
  const double last = k2_grid.back();
  if (last > 1e12) {
    const double d = deconv_symbol(op, last);
    const double dev = std::abs(d - np1);
    report.rows.push_back({"high_k_limit", last, dev, 1e-6 * np1, dev <= 1e-6 * np1});
  }
  return report;
}

}  // namespace adm
