#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "adm/config.hpp"
#include "adm/csv.hpp"
#include "adm/deconvolution.hpp"
#include "adm/diagnostics.hpp"
#include "adm/filters.hpp"
#include "adm/snapshot.hpp"
#include "adm/solvers.hpp"

namespace adm {

/// Weight w and order s of the smoothing term w ||e||_s^2 that accompanies ||e||_0^2 in
/// the modeling-error energy, i.e. A = 1 + w |k|^{2s}. None for the Gaussian.
struct SmoothingNorm {
  double weight;
  double order;
};

inline std::optional<SmoothingNorm> smoothing_norm(const FilterSpec& spec) {
  if (const auto* h = std::get_if<Helmholtz>(&spec)) return SmoothingNorm{std::pow(h->alpha, 2.0 * h->p), h->p};
  if (const auto* hp = std::get_if<HelmholtzPower>(&spec))
    return SmoothingNorm{std::pow(hp->mu * hp->mu, hp->m), static_cast<double>(hp->m)};
  if (const auto* g = std::get_if<GaussianApprox>(&spec))
    return SmoothingNorm{std::pow(approx_mu2(g->alpha, g->m), g->m), static_cast<double>(g->m)};
  return std::nullopt;
}

/// One (N, t) sample of an ADM run compared against the filtered DNS.
struct Sample {
  int order = 0;
  long step = 0;
  double t = 0.0;
  double eps_l2 = 0.0;        ///< ||e||_0, e = G u - w_N
  double eps_hp = 0.0;        ///< ||e||_s for the smoothing order s (nan for the Gaussian)
  double grad_sq = 0.0;       ///< ||e||_1^2 + w ||e||_{s+1}^2
  double tau_l2 = 0.0;        ///< ||tau_N(u(t))||_0
  double half_norm = 0.0;     ///< ||u - D_N G u||_{1/2} (nan unless Helmholtz)
  double u_h1 = 0.0;          ///< ||u(t)||_1
  double model_energy = 0.0;  ///< ||A^{1/2} D_N^{1/2} w_N||_0^2 (nan for the Gaussian)
  double div_defect = 0.0;    ///< max relative divergence of w_N since the previous sample
};

struct ExperimentOutput {
  SimConfig config;
  long steps = 0;
  double dt = 0.0;
  std::vector<double> times;  ///< sample times, shared by every run
  std::vector<double> u_h1;   ///< ||u(t)||_1 of the DNS at the sample times
  std::vector<Sample> samples;
  double max_div_defect = 0.0;  ///< over the DNS and every ADM state at every step
  std::vector<std::string> files;
};

struct RunOptions {
  int threads = 1;
  std::ostream* progress = nullptr;  ///< receives "step=... t=... E=..." lines
  bool write_files = true;
};

inline const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols{"N",      "step",      "t",    "eps_l2",       "eps_hp",    "grad_sq",
                                             "tau_l2", "half_norm", "u_h1", "model_energy", "div_defect"};
  return cols;
}

inline CsvTable timeseries_table(const ExperimentOutput& out) {
  CsvTable table("config_hash=" + config_hash(out.config), timeseries_columns());
  for (const auto& s : out.samples)
    table.row() << s.order << s.step << s.t << s.eps_l2 << s.eps_hp << s.grad_sq << s.tau_l2 << s.half_norm
                << s.u_h1 << s.model_energy << s.div_defect;
  return table;
}

inline std::vector<Sample> read_timeseries(const std::string& path) {
  const CsvData d = read_csv(path);
  std::vector<Sample> out;
  const auto col = [&](const char* n) { return d.column(n); };
  const std::size_t cN = col("N"), cs = col("step"), ct = col("t"), ce = col("eps_l2"), ch = col("eps_hp"),
                    cg = col("grad_sq"), cta = col("tau_l2"), chn = col("half_norm"), cu = col("u_h1"),
                    cm = col("model_energy"), cd = col("div_defect");
  for (const auto& r : d.rows) {
    if (r.size() != d.header.size()) throw IoError("ragged row in " + path);
    Sample s;
    s.order = std::stoi(r[cN]);
    s.step = std::stol(r[cs]);
    s.t = parse_double(r[ct]);
    s.eps_l2 = parse_double(r[ce]);
    s.eps_hp = parse_double(r[ch]);
    s.grad_sq = parse_double(r[cg]);
    s.tau_l2 = parse_double(r[cta]);
    s.half_norm = parse_double(r[chn]);
    s.u_h1 = parse_double(r[cu]);
    s.model_energy = parse_double(r[cm]);
    s.div_defect = parse_double(r[cd]);
    out.push_back(s);
  }
  return out;
}

namespace detail {

inline double half_energy(const SpectralField& f) {
  const double n0 = sobolev_norm(f, 0.0);
  return 0.5 * n0 * n0;
}

// sum_k A_k D_k |w_k|^2
inline double model_energy(const SpectralField& w, const DeconvOp& op) {
  if (!invertible(op.spec)) return std::nan("");
  double sum = 0.0;
  for_each_mode(w.lattice(), [&](const Mode& m) {
    if (m.k2 == 0.0) return;
    double a = 0.0;
    for (int c = 0; c < 3; ++c) a += std::norm(w.at(c, m.idx));
    sum += *inverse_symbol(op.spec, m.k2) * deconv_symbol(op, m.k2) * a;
  });
  return sum;
}

class ProgressSink {
 public:
  ProgressSink(std::ostream* os, long steps) : os_(os), every_(std::max(1L, steps / 10)) {}
  void report(long step, long steps, double t, double energy, const std::string& tag) {
    if (os_ == nullptr || (step % every_ != 0 && step != steps)) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, "step=%ld t=%.6f E=%.12e run=%s\n", step, t, energy, tag.c_str());
    std::lock_guard lock(mu_);
    *os_ << buf << std::flush;
  }

 private:
  std::ostream* os_;
  long every_;
  std::mutex mu_;
};

inline bool sample_step(long step, long steps, int every) { return step == 0 || step == steps || step % every == 0; }

inline bool snapshot_step(long step, long steps, int every) {
  return step == 0 || step == steps || (every > 0 && step % every == 0);
}

inline std::string step_tag(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06ld", step);
  return buf;
}

}  // namespace detail

/// Runs the reference DNS once and one ADM simulation per requested order, sampling the
/// modeling error e_N = G u - w_N and the residual stress at common sample times.
///
/// Every ADM run starts from G u0 and uses the DNS step size. With write_files set, the
/// configuration, the time-series CSV and ADMF snapshots go to cfg.output_dir.
inline ExperimentOutput run_experiment(const SimConfig& cfg, const RunOptions& opts = {}) {
  validate(cfg);
  const WaveLattice lat(cfg.n, cfg.box);
  const SpectralField u0 = make_initial(cfg);
  check_cfl(cfg, u0);
  const std::optional<SpectralField> forcing = load_forcing(cfg);

  ExperimentOutput out;
  out.config = cfg;
  out.steps = step_count(cfg.t_final, cfg.dt);
  out.dt = cfg.t_final / static_cast<double>(out.steps);

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  if (opts.write_files) fs::create_directories(dir);
  std::vector<std::string> files;
  std::mutex files_mu;
  auto save = [&](const std::string& name, const SpectralField& f) {
    if (!opts.write_files) return;
    const std::string path = (dir / name).string();
    save_snapshot(path, f);
    std::lock_guard lock(files_mu);
    files.push_back(path);
  };

  detail::ProgressSink progress(opts.progress, out.steps);

  // Reference run; u(t) is kept at every sample time.
  std::vector<SpectralField> u_samples;
  std::vector<long> sample_steps;
  {
    Stepper dns(lat, Closure::navier_stokes(), cfg.nu, out.dt, forcing);
    SolverState s{0.0, u0, 0};
    for (long k = 0;; ++k) {
      s.t = static_cast<double>(k) * out.dt;
      out.max_div_defect = std::max(out.max_div_defect, divergence_defect(s.u));
      if (detail::sample_step(k, out.steps, cfg.sample_every)) {
        u_samples.push_back(s.u);
        sample_steps.push_back(k);
        out.times.push_back(s.t);
        out.u_h1.push_back(sobolev_norm(s.u, 1.0));
      }
      if (detail::snapshot_step(k, out.steps, cfg.snapshot_every)) save("dns_step" + detail::step_tag(k) + ".admf", s.u);
      progress.report(k, out.steps, s.t, detail::half_energy(s.u), "dns");
      if (k == out.steps) break;
      s = dns.advance(s);
    }
  }

  const auto smooth = smoothing_norm(cfg.filter);
  const bool helmholtz = std::holds_alternative<Helmholtz>(cfg.filter);

  struct RunResult {
    std::vector<Sample> samples;
    double max_div = 0.0;
    std::exception_ptr error;
  };
  std::vector<RunResult> results(cfg.orders.size());

  auto run_one = [&](std::size_t job) {
    RunResult& res = results[job];
    try {
      const int N = cfg.orders[job];
      const DeconvOp op{cfg.filter, N};
      Stepper adm(lat, Closure::deconvolution(cfg.filter, N), cfg.nu, out.dt, forcing);
      SolverState s{0.0, apply_filter(cfg.filter, u0), 0};
      const std::string tag = "adm_N" + std::to_string(N);
      std::size_t next = 0;
      double div_since = 0.0;
      for (long k = 0;; ++k) {
        s.t = static_cast<double>(k) * out.dt;
        const double div = divergence_defect(s.u);
        div_since = std::max(div_since, div);
        res.max_div = std::max(res.max_div, div);
        if (next < sample_steps.size() && sample_steps[next] == k) {
          const SpectralField& u = u_samples[next];
          const SpectralField err = apply_filter(cfg.filter, u) - s.u;
          Sample smp;
          smp.order = N;
          smp.step = k;
          smp.t = s.t;
          smp.eps_l2 = sobolev_norm(err, 0.0);
          const double h1 = sobolev_norm(err, 1.0);
          if (smooth) {
            smp.eps_hp = sobolev_norm(err, smooth->order);
            const double g = sobolev_norm(err, smooth->order + 1.0);
            smp.grad_sq = h1 * h1 + smooth->weight * g * g;
          } else {
            smp.eps_hp = std::nan("");
            smp.grad_sq = h1 * h1;
          }
          smp.tau_l2 = residual_stress_norm(u, cfg.filter, N);
          smp.half_norm = helmholtz ? half_norm_defect(u, cfg.filter, N) : std::nan("");
          smp.u_h1 = out.u_h1[next];
          smp.model_energy = detail::model_energy(s.u, op);
          smp.div_defect = div_since;
          div_since = 0.0;
          res.samples.push_back(smp);
          ++next;
        }
        if (detail::snapshot_step(k, out.steps, cfg.snapshot_every)) save(tag + "_step" + detail::step_tag(k) + ".admf", s.u);
        progress.report(k, out.steps, s.t, detail::half_energy(s.u), tag);
        if (k == out.steps) break;
        s = adm.advance(s);
      }
    } catch (...) {
      res.error = std::current_exception();
    }
  };

  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(cfg.orders.size())));
  if (threads == 1) {
    for (std::size_t j = 0; j < cfg.orders.size(); ++j) run_one(j);
  } else {
    std::atomic<std::size_t> next_job{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t j = next_job++; j < cfg.orders.size(); j = next_job++) run_one(j);
      });
  }

  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    out.max_div_defect = std::max(out.max_div_defect, r.max_div);
    out.samples.insert(out.samples.end(), r.samples.begin(), r.samples.end());
  }

  if (opts.write_files) {
    const std::string cfg_path = (dir / "config.json").string();
    std::ofstream os(cfg_path);
    if (!os) throw IoError("cannot write " + cfg_path);
    os << to_json(cfg).dump(2) << "\n";
    const std::string ts = (dir / "timeseries.csv").string();
    timeseries_table(out).save(ts);
    std::sort(files.begin(), files.end());
    files.push_back(cfg_path);
    files.push_back(ts);
  }
  out.files = std::move(files);
  return out;
}

}  // namespace adm
