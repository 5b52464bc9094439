#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adm/error.hpp"

namespace adm {

/// One evaluated instance of a scalar inequality lhs <= rhs.
struct IneqCase {
  std::string_view name;
  double x = 0.0;
  double a = 0.0;  ///< exponent a (0 when unused)
  double m = 0.0;  ///< exponent m (0 when unused)
  long n = 0;      ///< integer order n (0 when unused)
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;                ///< rhs - lhs
  std::optional<double> side_value{};  ///< secondary quantity checked alongside (see each check)
  bool pass = false;
};

inline constexpr double kIneqSlack = 1e-12;

inline bool within_slack(double lhs, double rhs) {
  return rhs - lhs >= -kIneqSlack * std::max(1.0, rhs);
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

// 1 - (1 + z)^{-m}, accurate for small z
inline double one_minus_inverse_power(double z, double m) { return -std::expm1(-m * std::log1p(z)); }

// b^a for b in [0, 1]
inline double pow01(double b, double a) { return b == 0.0 ? 0.0 : std::exp(a * std::log(b)); }

// y - log(1 + y) for y >= 0, without cancellation near 0
inline double y_minus_log1p(double y) {
  if (y < 1e-3) {
    const double y2 = y * y;
    return y2 * (0.5 - y / 3.0 + y2 / 4.0 - y2 * y / 5.0 + y2 * y2 / 6.0);
  }
  return y - std::log1p(y);
}

}  // namespace detail

/// (1 - (1+x)^{-m})^a <= m x / a^{1/m}, for x >= 0 and a, m >= 1.
inline IneqCase check_inq_tech2(double x, double a, double m) {
  detail::require(x >= 0.0 && std::isfinite(x), "inq_tech2 needs x >= 0");
  detail::require(a >= 1.0 && std::isfinite(a), "inq_tech2 needs a >= 1");
  detail::require(m >= 1.0 && std::isfinite(m), "inq_tech2 needs m >= 1");
  IneqCase c{.name = "inq_tech2", .x = x, .a = a, .m = m};
  c.lhs = detail::pow01(detail::one_minus_inverse_power(x, m), a);
  c.rhs = m * x / std::pow(a, 1.0 / m);
  c.margin = c.rhs - c.lhs;
  c.pass = within_slack(c.lhs, c.rhs);
  return c;
}

/// (1 - (1+x^2)^{-m})^a <= sqrt(m) x / (2a)^{1/(2m)}, for x >= 0 and a, m >= 1.
inline IneqCase check_inq_tech3(double x, double a, double m) {
  detail::require(x >= 0.0 && std::isfinite(x), "inq_tech3 needs x >= 0");
  detail::require(a >= 1.0 && std::isfinite(a), "inq_tech3 needs a >= 1");
  detail::require(m >= 1.0 && std::isfinite(m), "inq_tech3 needs m >= 1");
  IneqCase c{.name = "inq_tech3", .x = x, .a = a, .m = m};
  c.lhs = detail::pow01(detail::one_minus_inverse_power(x * x, m), a);
  c.rhs = std::sqrt(m) * x / std::pow(2.0 * a, 1.0 / (2.0 * m));
  c.margin = c.rhs - c.lhs;
  c.pass = within_slack(c.lhs, c.rhs);
  return c;
}

/// (x^2/(1+x^2))^a <= x / sqrt(2a) <= x / sqrt(a), for x >= 0 and a >= 1.
/// side_value holds the weaker right-hand side x / sqrt(a).
inline IneqCase check_inq_tech1(double x, double a) {
  detail::require(x >= 0.0 && std::isfinite(x), "inq_tech1 needs x >= 0");
  detail::require(a >= 1.0 && std::isfinite(a), "inq_tech1 needs a >= 1");
  IneqCase c{.name = "inq_tech1", .x = x, .a = a};
  c.lhs = x == 0.0 ? 0.0 : std::exp(-a * std::log1p(1.0 / (x * x)));
  c.rhs = x / std::sqrt(2.0 * a);
  c.side_value = x / std::sqrt(a);
  c.margin = c.rhs - c.lhs;
  c.pass = within_slack(c.lhs, c.rhs) && c.rhs <= *c.side_value;
  return c;
}

/// |(1 + x/n)^{-n} - e^{-x}| <= 2/n, for x >= 0 and integer n >= 1.
/// side_value holds the signed difference (1 + x/n)^{-n} - e^{-x}, which must be >= 0.
inline IneqCase check_transf_est(double x, long n) {
  detail::require(x >= 0.0 && std::isfinite(x), "transf_est needs x >= 0");
  detail::require(n >= 1, "transf_est needs n >= 1");
  IneqCase c{.name = "transf_est", .x = x, .n = n};
  const double nd = static_cast<double>(n);
  // (1+x/n)^{-n} = e^{-x} exp(n (x/n - log(1 + x/n)))
  const double y = x / nd;
  const double z = nd * detail::y_minus_log1p(y);
  const double signed_diff = z < 0.5 ? std::exp(-x) * std::expm1(z) : std::exp(-nd * std::log1p(y)) - std::exp(-x);
  c.side_value = signed_diff;
  c.lhs = std::abs(signed_diff);
  c.rhs = 2.0 / nd;
  c.margin = c.rhs - c.lhs;
  c.pass = within_slack(c.lhs, c.rhs) && signed_diff >= 0.0;
  return c;
}

/// Evaluation grid for sweep(): x in {0} u logspace(x_min, x_max), exponents a and m drawn
/// from `exponents`, orders n from `orders`.
struct SweepGrid {
  double x_min = 1e-6;
  double x_max = 1e6;
  int x_per_decade = 700;
  bool include_zero = true;
  std::vector<double> exponents{1, 1.5, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::vector<long> orders{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 32, 64, 128, 256, 512, 1024};

  static SweepGrid dense() {
    SweepGrid g;
    g.x_per_decade *= 10;
    return g;
  }

  std::vector<double> x_values() const {
    std::vector<double> xs;
    if (include_zero) xs.push_back(0.0);
    if (x_per_decade > 0 && x_max >= x_min && x_min > 0.0) {
      const double lo = std::log10(x_min), hi = std::log10(x_max);
      const long count = static_cast<long>(std::llround((hi - lo) * x_per_decade));
      for (long i = 0; i <= count; ++i)
        xs.push_back(count == 0 ? x_min : std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / count));
    }
    return xs;
  }
};

struct SweepSummary {
  std::string name;
  long count = 0;
  long failures = 0;
  std::vector<IneqCase> first_failures;  ///< up to 16 offending tuples
  IneqCase tightest;                     ///< case with the smallest relative margin

  bool pass() const { return failures == 0 && count > 0; }
};

inline constexpr std::string_view kInequalityNames[] = {"inq_tech2", "inq_tech3", "inq_tech1", "transf_est"};

/// Evaluates one inequality over every tuple of the grid. Each case is also handed to
/// `sink` when given.
inline SweepSummary sweep(std::string_view name, const SweepGrid& grid,
                          const std::function<void(const IneqCase&)>& sink = {}) {
  const auto xs = grid.x_values();
  if (xs.empty()) throw DomainError("empty x grid");
  SweepSummary s;
  s.name = std::string(name);
  double tightest_rel = std::numeric_limits<double>::infinity();
  auto record = [&](const IneqCase& c) {
    ++s.count;
    if (!c.pass) {
      ++s.failures;
      if (s.first_failures.size() < 16) s.first_failures.push_back(c);
    }
    const double rel = c.margin / std::max(1.0, c.rhs);
    if (rel < tightest_rel) {
      tightest_rel = rel;
      s.tightest = c;
    }
    if (sink) sink(c);
  };

  if (name == "inq_tech2" || name == "inq_tech3") {
    if (grid.exponents.empty()) throw DomainError("empty exponent grid");
    const bool two = name == "inq_tech2";
    for (double a : grid.exponents)
      for (double m : grid.exponents)
        for (double x : xs) record(two ? check_inq_tech2(x, a, m) : check_inq_tech3(x, a, m));
  } else if (name == "inq_tech1") {
    if (grid.exponents.empty()) throw DomainError("empty exponent grid");
    for (double a : grid.exponents)
      for (double x : xs) record(check_inq_tech1(x, a));
  } else if (name == "transf_est") {
    if (grid.orders.empty()) throw DomainError("empty order grid");
    for (long n : grid.orders)
      for (double x : xs) record(check_transf_est(x, n));
  } else {
    throw DomainError("unknown inequality '" + std::string(name) + "'");
  }
  return s;
}

}  // namespace adm
