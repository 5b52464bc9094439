// adm_cli: filter symbols, inequality sweeps, ADM experiments and rate reports.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "adm/adm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::string out;
  bool deterministic = false;
  int threads = 0;
  std::string ineq = "all";
  bool dense = false;
  std::string csv;
  double alpha = 1.0;
  double p = 1.0;
  std::vector<int> orders{0, 1, 2, 4, 8, 16, 32};
  double kmax = 1e7;
  double approx_kmax = 64.0;
  int m_max = 64;
};

// Bad configuration, missing files and other problems with the invocation itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int resolve_threads(const Options& o, std::size_t jobs) {
  if (o.deterministic) return 1;
  int t = o.threads;
  if (t <= 0) {
    if (const char* env = std::getenv("ADM_THREADS")) {
      try {
        t = std::stoi(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("bad ADM_THREADS value '") + env + "'");
      }
    }
  }
  if (t <= 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min<int>(t, static_cast<int>(jobs)));
}

adm::SimConfig load(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  try {
    adm::SimConfig cfg = adm::load_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    return cfg;
  } catch (const adm::IoError& e) {
    throw UsageError(e.what());
  } catch (const adm::DomainError& e) {
    throw UsageError(e.what());
  }
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw adm::IoError("cannot open " + path + " for writing");
  return file;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double a = std::log10(lo), b = std::log10(hi);
  const int count = static_cast<int>(std::lround((b - a) * per_decade));
  for (int i = 0; i <= count; ++i) g.push_back(std::pow(10.0, a + (b - a) * i / std::max(1, count)));
  return g;
}

void print_case(std::ostream& os, const adm::IneqCase& c) {
  os << "first failure: " << c.name << " x=" << adm::format_double(c.x) << " a=" << adm::format_double(c.a)
     << " m=" << adm::format_double(c.m) << " n=" << c.n << " lhs=" << adm::format_double(c.lhs)
     << " rhs=" << adm::format_double(c.rhs) << "\n";
}

// --- verify -----------------------------------------------------------------

int run_verify(const Options& o) {
  bool ok = true;
  std::optional<adm::IneqCase> first_bad_case;
  std::optional<adm::PropertyRow> first_bad_row;
  std::string first_bad_other;

  std::vector<std::string_view> names;
  if (o.ineq == "all") {
    names.assign(std::begin(adm::kInequalityNames), std::end(adm::kInequalityNames));
  } else {
    bool known = false;
    for (auto n : adm::kInequalityNames) known = known || n == o.ineq;
    if (!known) throw UsageError("unknown inequality '" + o.ineq + "'");
    names.push_back(o.ineq);
  }

  std::ofstream csv_file;
  std::ostream* csv = nullptr;
  if (!o.csv.empty()) {
    csv = &open_output(o.csv, csv_file);
    *csv << "# grid=" << (o.dense ? "dense" : "default") << "\n";
    *csv << "name,x,a,m,n,lhs,rhs,margin,pass\n";
  }
  const adm::SweepGrid grid = o.dense ? adm::SweepGrid::dense() : adm::SweepGrid{};

  std::vector<adm::SweepSummary> sweeps;
  for (auto name : names) {
    auto sink = [&](const adm::IneqCase& c) {
      *csv << c.name << ',' << adm::format_double(c.x) << ',' << adm::format_double(c.a) << ','
           << adm::format_double(c.m) << ',' << c.n << ',' << adm::format_double(c.lhs) << ','
           << adm::format_double(c.rhs) << ',' << adm::format_double(c.margin) << ',' << (c.pass ? 1 : 0) << '\n';
    };
    sweeps.push_back(csv ? adm::sweep(name, grid, sink) : adm::sweep(name, grid));
    const auto& s = sweeps.back();
    if (!s.pass()) {
      ok = false;
      if (!first_bad_case && !s.first_failures.empty()) first_bad_case = s.first_failures.front();
    }
  }

  // Deconvolution properties, printed as CSV on stdout.
  const adm::FilterSpec spec = adm::Helmholtz{o.alpha, o.p};
  adm::validate(spec);
  std::vector<double> k2 = log_grid(1e-2, std::max(o.kmax * o.kmax, 1e-1), 10);
  std::cout << "# filter=" << adm::describe(spec) << "\n";
  std::cout << "N,property,k2,lhs,rhs,pass\n";
  for (int N : o.orders) {
    if (N < 0) throw UsageError("--N values must be >= 0");
    const auto rep = adm::check_properties(adm::DeconvOp{spec, N}, k2);
    for (const auto& r : rep.rows)
      std::cout << N << ',' << r.property << ',' << adm::format_double(r.k2) << ',' << adm::format_double(r.lhs) << ','
                << adm::format_double(r.rhs) << ',' << (r.pass ? 1 : 0) << '\n';
    if (!rep.all_pass()) {
      ok = false;
      if (!first_bad_row) first_bad_row = *rep.first_failure();
    }
  }

  // Gaussian approximants and the Helmholtz-power sandwich on the same k2 grid.
  for (int m = 1; m <= o.m_max; ++m)
    for (double x : k2) {
      const double e = adm::gaussian_approx_error(o.alpha, m, x);
      if (e > 2.0 / m && first_bad_other.empty()) {
        ok = false;
        first_bad_other = "gaussian-approx m=" + std::to_string(m) + " k2=" + adm::format_double(x) +
                          " error=" + adm::format_double(e);
      }
      const auto s = adm::helmholtz_power_sandwich(o.alpha, m, x);
      const bool fine = s.lo <= s.mid * (1 + 1e-12) && s.mid <= s.hi * (1 + 1e-12);
      if (!fine && first_bad_other.empty()) {
        ok = false;
        first_bad_other = "sandwich m=" + std::to_string(m) + " k2=" + adm::format_double(x);
      }
    }

  for (const auto& s : sweeps)
    std::cerr << s.name << ": " << s.count << " tuples, " << s.failures << " failures, tightest margin "
              << adm::format_double(s.tightest.margin) << "\n";
  if (first_bad_case) print_case(std::cerr, *first_bad_case);
  if (first_bad_row)
    std::cerr << "first failure: " << first_bad_row->property << " k2=" << adm::format_double(first_bad_row->k2)
              << " lhs=" << adm::format_double(first_bad_row->lhs) << " rhs=" << adm::format_double(first_bad_row->rhs)
              << "\n";
  if (!first_bad_other.empty()) std::cerr << "first failure: " << first_bad_other << "\n";
  std::cerr << (ok ? "verify: all checks pass\n" : "verify: FAILED\n");
  return ok ? kExitOk : kExitCheckFailed;
}

// --- symbols ----------------------------------------------------------------

int run_symbols(const Options& o) {
  adm::FilterSpec spec = adm::Helmholtz{o.alpha, o.p};
  if (!o.config.empty()) spec = load(o).filter;
  adm::validate(spec);
  std::ofstream file;
  std::ostream& os = open_output(o.csv, file);
  os << "# filter=" << adm::describe(spec) << "\n";
  os << "k2,G_hat,A_hat";
  for (int N : o.orders) {
    if (N < 0) throw UsageError("--N values must be >= 0");
    os << ",D_" << N << "_hat";
  }
  os << "\n";
  std::vector<double> k2{0.0};
  for (double v : log_grid(1e-2, std::max(o.kmax * o.kmax, 1e-1), 10)) k2.push_back(v);
  for (double x : k2) {
    os << adm::format_double(x) << ',' << adm::format_double(adm::filter_symbol(spec, x)) << ',';
    if (auto a = adm::inverse_symbol(spec, x)) os << adm::format_double(*a);
    for (int N : o.orders) os << ',' << adm::format_double(adm::deconv_symbol(adm::DeconvOp{spec, N}, x));
    os << '\n';
  }
  return kExitOk;
}

// --- simulate / rates -------------------------------------------------------

int run_simulate(const Options& o) {
  const adm::SimConfig cfg = load(o);
  adm::RunOptions ro;
  ro.threads = resolve_threads(o, cfg.orders.size());
  ro.progress = &std::cerr;
  const auto out = adm::run_experiment(cfg, ro);
  for (const auto& f : out.files) std::cout << f << "\n";
  std::cerr << "max divergence defect " << adm::format_double(out.max_div_defect) << "\n";
  return kExitOk;
}

int run_rates(const Options& o) {
  const adm::SimConfig cfg = load(o);
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  const fs::path ts = dir / "timeseries.csv";
  if (!fs::exists(ts)) throw UsageError("missing " + ts.string() + "; run simulate first");
  const auto samples = adm::read_timeseries(ts.string());
  const adm::ErrorReport rep = adm::build_report(cfg, samples);
  adm::detail_table(rep).save((dir / "rates_detail.csv").string());
  adm::summary_table(rep).save((dir / "rates_summary.csv").string());
  std::cout << (dir / "rates_detail.csv").string() << "\n" << (dir / "rates_summary.csv").string() << "\n";
  for (const auto& s : rep.summary)
    std::cerr << "N=" << s.order << " eps_l2(T)=" << adm::format_double(s.eps_l2_final)
              << " lhs(T)=" << adm::format_double(s.lhs_final)
              << " ln bound(T)=" << adm::format_double(s.log_bound_main_final) << (s.holds_all ? "" : " VIOLATED")
              << "\n";
  if (rep.beta_eps) std::cerr << "beta(eps_l2) = " << adm::format_double(rep.beta_eps->beta) << "\n";
  if (!rep.all_hold()) {
    for (const auto& r : rep.rows)
      if (!r.holds) {
        std::cerr << "first failure: N=" << r.order << " t=" << adm::format_double(r.t)
                  << " lhs=" << adm::format_double(r.lhs) << " ln bound=" << adm::format_double(r.log_bound_main)
                  << "\n";
        break;
      }
    return kExitCheckFailed;
  }
  return kExitOk;
}

// --- gaussian-approx --------------------------------------------------------

int run_gaussian_approx(const Options& o) {
  if (o.m_max < 1) throw UsageError("--m-max must be >= 1");
  if (!(o.alpha > 0.0)) throw UsageError("--alpha must be > 0");
  // every |k|^2 of an integer lattice up to kmax, plus a dense log grid in between
  std::vector<double> k2;
  const double kmax = o.approx_kmax;
  const long kk = static_cast<long>(std::ceil(kmax * kmax));
  for (long i = 0; i <= std::min(kk, 1000000L); ++i) k2.push_back(static_cast<double>(i));
  for (double v : log_grid(1e-4, std::max(kmax * kmax, 1e-3), 200)) k2.push_back(v);

  std::ofstream file;
  std::ostream& os = open_output(o.csv, file);
  os << "# alpha=" << adm::format_double(o.alpha) << " kmax=" << adm::format_double(kmax) << "\n";
  os << "m,sup_error,argmax_k2,bound,pass\n";
  bool ok = true;
  std::string first;
  for (int m = 1; m <= o.m_max; ++m) {
    double sup = 0.0, arg = 0.0;
    for (double x : k2) {
      const double e = adm::gaussian_approx_error(o.alpha, m, x);
      if (e > sup) {
        sup = e;
        arg = x;
      }
    }
    const bool pass = sup <= 2.0 / m;
    if (!pass && ok) first = "m=" + std::to_string(m) + " sup_error=" + adm::format_double(sup);
    ok = ok && pass;
    os << m << ',' << adm::format_double(sup) << ',' << adm::format_double(arg) << ','
       << adm::format_double(2.0 / m) << ',' << (pass ? 1 : 0) << '\n';
  }
  if (!ok) std::cerr << "first failure: " << first << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate deconvolution models on the periodic box"};
  app.require_subcommand(1, 1);
  Options o;

  auto* verify = app.add_subcommand("verify", "Scalar inequality sweeps, deconvolution and filter checks");
  verify->add_option("--ineq", o.ineq, "Inequality to sweep: inq_tech2, inq_tech3, inq_tech1, transf_est or all");
  verify->add_flag("--dense", o.dense, "Ten times denser x grid");
  verify->add_option("--csv", o.csv, "Write every inequality case to this CSV");
  verify->add_option("--alpha", o.alpha, "Filter width for the deconvolution checks");
  verify->add_option("--p", o.p, "Helmholtz order for the deconvolution checks");
  verify->add_option("--N", o.orders, "Deconvolution orders")->delimiter(',');
  verify->add_option("--kmax", o.kmax, "Largest |k| of the symbol grid");
  verify->add_option("--m-max", o.m_max, "Largest m for the approximant and sandwich checks");

  auto* symbols = app.add_subcommand("symbols", "Tabulate filter, inverse and deconvolution symbols");
  symbols->add_option("--config", o.config, "Take the filter from this configuration");
  symbols->add_option("--alpha", o.alpha, "Helmholtz width");
  symbols->add_option("--p", o.p, "Helmholtz order");
  symbols->add_option("--N", o.orders, "Deconvolution orders")->delimiter(',');
  symbols->add_option("--kmax", o.kmax, "Largest |k|");
  symbols->add_option("--csv", o.csv, "Output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run the DNS reference and one ADM run per N");
  simulate->add_option("--config", o.config, "JSON configuration")->required();
  simulate->add_option("--out", o.out, "Output directory (overrides the configuration)");
  simulate->add_flag("--deterministic", o.deterministic, "Single worker, fixed reduction order");
  simulate->add_option("--threads", o.threads, "Parallel ADM runs (default: ADM_THREADS or all cores)");

  auto* rates = app.add_subcommand("rates", "Error report and fitted rates from a simulate output");
  rates->add_option("--config", o.config, "JSON configuration used for simulate")->required();
  rates->add_option("--out", o.out, "Experiment directory (overrides the configuration)");
  rates->add_flag("--deterministic", o.deterministic, "Accepted for symmetry with simulate");
  rates->add_option("--threads", o.threads, "Unused; accepted for symmetry with simulate");

  auto* gauss = app.add_subcommand("gaussian-approx", "sup_k |G - G_m| against 2/m");
  gauss->add_option("--alpha", o.alpha, "Gaussian width");
  gauss->add_option("--m-max", o.m_max, "Largest m");
  gauss->add_option("--kmax", o.approx_kmax, "Largest |k| sampled");
  gauss->add_option("--csv", o.csv, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(o);
    if (symbols->parsed()) return run_symbols(o);
    if (simulate->parsed()) return run_simulate(o);
    if (rates->parsed()) return run_rates(o);
    if (gauss->parsed()) return run_gaussian_approx(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const adm::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
