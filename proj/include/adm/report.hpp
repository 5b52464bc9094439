#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adm/config.hpp"
#include "adm/csv.hpp"
#include "adm/diagnostics.hpp"
#include "adm/experiment.hpp"
#include "adm/filters.hpp"

namespace adm {

/// Per-(N, t) row of the error report. Bounds that may overflow are kept as natural logs.
struct ReportRow {
  int order = 0;
  double t = 0.0;
  double eps_l2 = 0.0;
  double eps_hp = 0.0;
  double grad_integral = 0.0;  ///< int_0^t ||grad e||_0^2 + w ||grad e||_s^2, trapezoid rule
  double lhs = 0.0;            ///< ||e||_0^2 + w ||e||_s^2 + nu * grad_integral
  double tau_l2 = 0.0;
  double tau_integral = 0.0;   ///< int_0^t ||tau_N||_0^2
  double half_norm = 0.0;
  double bound_fin = 0.0;      ///< bound on half_norm^2 from ||u(t)||_1
  double bound_tau = 0.0;      ///< bound on tau_l2^2 with C_used
  double u_l4h1 = 0.0;         ///< ||u||_{L^4(0,t; H^1)}
  double log_bound_main = 0.0; ///< ln of the closed-form bound on lhs (nan for the Gaussian)
  double log_bound_cor = 0.0;  ///< ln of (8/nu) exp(U^4/nu^3) tau_integral
  double log_bound_cor_alt = 0.0;  ///< ln of (4/nu) exp(27 U^4/nu^3) tau_integral
  bool holds = false;          ///< lhs <= bound_main (true when no closed form exists)
  bool holds_cor = false;      ///< lhs <= (8/nu) exp(U^4/nu^3) tau_integral
};

struct ReportSummary {
  int order = 0;
  double eps_l2_final = 0.0;
  double lhs_final = 0.0;
  double log_bound_main_final = 0.0;
  double tau_l2_final = 0.0;
  double half_norm_final = 0.0;
  bool holds_all = true;
  bool holds_cor_all = true;
};

struct ReportConstants {
  double c_config = 0.0;
  double c_empirical = 0.0;  ///< max tau^2 / (2 ||u||_1^2 half_norm^2) over samples; 0 if unavailable
  double c_used = 0.0;
  double nu = 0.0;
  double alpha = 0.0;  ///< alpha, or mu for HelmholtzPower
  double p = 0.0;      ///< p, or m for the power filters
  double u_l4h1 = 0.0;
  double kappa_log10 = 0.0;
};

struct ErrorReport {
  std::vector<ReportRow> rows;
  std::vector<ReportSummary> summary;
  std::optional<RateFit> beta_eps;   ///< fit of ||e_N(T)||_0 against N
  std::optional<RateFit> beta_half;  ///< fit of half_norm(T)^2 against N
  std::optional<RateFit> beta_tau;   ///< fit of ||tau_N(T)||_0 against N
  ReportConstants constants;
  std::string config_hash;

  bool all_hold() const {
    return std::all_of(summary.begin(), summary.end(), [](const ReportSummary& s) { return s.holds_all; });
  }
};

namespace detail {

inline bool log_le(double lhs, double log_rhs) {
  if (lhs <= 0.0) return true;
  return std::log(lhs) <= log_rhs + 1e-12;
}

inline std::optional<RateFit> try_fit(std::vector<std::pair<int, double>> series) {
  std::erase_if(series, [](const auto& e) { return !(e.second > 0.0) || !std::isfinite(e.second); });
  if (series.size() < 4) return std::nullopt;
  try {
    return fit_rate(series);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

// ln of the closed-form bound for the configured filter; nan for the Gaussian.
inline double log_bound_for(const FilterSpec& spec, double u, double nu, double c, int order) {
  if (const auto* h = std::get_if<Helmholtz>(&spec)) return bound_main(u, nu, c, h->alpha, h->p, order).log_value;
  if (const auto* hp = std::get_if<HelmholtzPower>(&spec)) return bound_main_hm(u, nu, c, hp->mu, hp->m, order).bound.log_value;
  if (const auto* g = std::get_if<GaussianApprox>(&spec))
    return bound_main_hm(u, nu, c, std::sqrt(approx_mu2(g->alpha, g->m)), g->m, order).bound.log_value;
  return std::nan("");
}

}  // namespace detail

/// Assembles the error report from sampled run data. Samples of one order must be in
/// time order; orders may be interleaved.
inline ErrorReport build_report(const SimConfig& cfg, const std::vector<Sample>& samples) {
  ErrorReport rep;
  rep.config_hash = config_hash(cfg);
  const double nu = cfg.nu;
  const auto smooth = smoothing_norm(cfg.filter);
  const double weight = smooth ? smooth->weight : 0.0;

  ReportConstants& k = rep.constants;
  k.nu = nu;
  k.c_config = cfg.sobolev_constant;
  if (const auto* h = std::get_if<Helmholtz>(&cfg.filter)) {
    k.alpha = h->alpha;
    k.p = h->p;
  } else if (const auto* hp = std::get_if<HelmholtzPower>(&cfg.filter)) {
    k.alpha = hp->mu;
    k.p = hp->m;
  } else if (const auto* g = std::get_if<GaussianApprox>(&cfg.filter)) {
    k.alpha = g->alpha;
    k.p = g->m;
  } else {
    k.alpha = std::get<Gaussian>(cfg.filter).alpha;
  }

  std::map<int, std::vector<Sample>> by_order;
  for (const auto& s : samples) by_order[s.order].push_back(s);
  for (const auto& [N, series] : by_order) {
    (void)N;
    for (const auto& s : series) {
      if (s.half_norm > 0.0 && s.u_h1 > 0.0 && std::isfinite(s.half_norm))
        k.c_empirical = std::max(k.c_empirical, s.tau_l2 * s.tau_l2 / (2.0 * s.u_h1 * s.u_h1 * s.half_norm * s.half_norm));
    }
  }
  k.c_used = std::max(k.c_config, k.c_empirical);

  std::vector<std::pair<int, double>> fit_eps, fit_half, fit_tau;
  for (const auto& [N, series] : by_order) {
    ReportSummary sum;
    sum.order = N;
    double grad_int = 0.0, tau_int = 0.0, u4_int = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const Sample& s = series[i];
      if (i > 0) {
        const Sample& prev = series[i - 1];
        const double h = s.t - prev.t;
        grad_int += 0.5 * h * (prev.grad_sq + s.grad_sq);
        tau_int += 0.5 * h * (prev.tau_l2 * prev.tau_l2 + s.tau_l2 * s.tau_l2);
        u4_int += 0.5 * h * (std::pow(prev.u_h1, 4) + std::pow(s.u_h1, 4));
      }
      ReportRow r;
      r.order = N;
      r.t = s.t;
      r.eps_l2 = s.eps_l2;
      r.eps_hp = s.eps_hp;
      r.grad_integral = grad_int;
      r.lhs = s.eps_l2 * s.eps_l2 + (smooth ? weight * s.eps_hp * s.eps_hp : 0.0) + nu * grad_int;
      r.tau_l2 = s.tau_l2;
      r.tau_integral = tau_int;
      r.half_norm = s.half_norm;
      r.u_l4h1 = std::pow(u4_int, 0.25);
      if (std::holds_alternative<Helmholtz>(cfg.filter)) {
        r.bound_fin = bound_defect(s.u_h1, k.alpha, k.p, N);
        r.bound_tau = bound_residual(s.u_h1, k.c_used, k.alpha, k.p, N);
      } else {
        r.bound_fin = r.bound_tau = std::nan("");
      }
      r.log_bound_main = detail::log_bound_for(cfg.filter, r.u_l4h1, nu, k.c_used, N);
      const double u4 = u4_int;
      const double log_tau = tau_int > 0.0 ? std::log(tau_int) : -std::numeric_limits<double>::infinity();
      r.log_bound_cor = std::log(8.0 / nu) + u4 / (nu * nu * nu) + log_tau;
      r.log_bound_cor_alt = std::log(4.0 / nu) + 27.0 * u4 / (nu * nu * nu) + log_tau;
      r.holds = std::isnan(r.log_bound_main) || detail::log_le(r.lhs, r.log_bound_main);
      r.holds_cor = detail::log_le(r.lhs, r.log_bound_cor);
      sum.holds_all = sum.holds_all && r.holds;
      sum.holds_cor_all = sum.holds_cor_all && r.holds_cor;
      rep.rows.push_back(r);
    }
    if (!series.empty()) {
      const ReportRow& last = rep.rows.back();
      sum.eps_l2_final = last.eps_l2;
      sum.lhs_final = last.lhs;
      sum.log_bound_main_final = last.log_bound_main;
      sum.tau_l2_final = last.tau_l2;
      sum.half_norm_final = last.half_norm;
      k.u_l4h1 = std::max(k.u_l4h1, last.u_l4h1);
      fit_eps.emplace_back(N, last.eps_l2);
      fit_half.emplace_back(N, last.half_norm * last.half_norm);
      fit_tau.emplace_back(N, last.tau_l2);
    }
    rep.summary.push_back(sum);
  }
  rep.beta_eps = detail::try_fit(fit_eps);
  rep.beta_half = detail::try_fit(fit_half);
  rep.beta_tau = detail::try_fit(fit_tau);
  k.kappa_log10 = kappa_log10(k.u_l4h1, nu);
  return rep;
}

inline CsvTable detail_table(const ErrorReport& rep) {
  CsvTable t("config_hash=" + rep.config_hash,
             {"N", "t", "eps_l2", "eps_hp", "grad_integral", "lhs", "tau_l2", "tau_integral", "half_norm", "bound_fin",
              "bound_tau", "u_l4h1", "log_bound_main", "log_bound_cor", "log_bound_cor_alt", "holds", "holds_cor"});
  for (const auto& r : rep.rows)
    t.row() << r.order << r.t << r.eps_l2 << r.eps_hp << r.grad_integral << r.lhs << r.tau_l2 << r.tau_integral
            << r.half_norm << r.bound_fin << r.bound_tau << r.u_l4h1 << r.log_bound_main << r.log_bound_cor
            << r.log_bound_cor_alt << r.holds << r.holds_cor;
  return t;
}

inline CsvTable summary_table(const ErrorReport& rep) {
  CsvTable t("config_hash=" + rep.config_hash,
             {"N", "eps_l2_T", "lhs_T", "log_bound_main_T", "tau_l2_T", "half_norm_T", "holds_all", "holds_cor_all",
              "beta_eps", "r2_eps", "beta_half_sq", "r2_half_sq", "beta_tau", "r2_tau", "C_config", "C_empirical",
              "C_used", "nu", "alpha", "p", "u_l4h1", "log10_kappa"});
  const auto b = [](const std::optional<RateFit>& f) { return f ? f->beta : std::nan(""); };
  const auto r2 = [](const std::optional<RateFit>& f) { return f ? f->r2 : std::nan(""); };
  const auto& k = rep.constants;
  for (const auto& s : rep.summary)
    t.row() << s.order << s.eps_l2_final << s.lhs_final << s.log_bound_main_final << s.tau_l2_final
            << s.half_norm_final << s.holds_all << s.holds_cor_all << b(rep.beta_eps) << r2(rep.beta_eps)
            << b(rep.beta_half) << r2(rep.beta_half) << b(rep.beta_tau) << r2(rep.beta_tau) << k.c_config
            << k.c_empirical << k.c_used << k.nu << k.alpha << k.p << k.u_l4h1 << k.kappa_log10;
  return t;
}

}  // namespace adm
