#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "adm/experiment.hpp"
#include "adm/solvers.hpp"
#include "oracles.hpp"

using namespace adm;
using Catch::Matchers::WithinRel;

namespace {

double energy(const SpectralField& u) {
  const double n0 = sobolev_norm(u, 0.0);
  return 0.5 * n0 * n0;
}

SimConfig small_config() {
  SimConfig c;
  c.n = 8;
  c.nu = 0.1;
  c.dt = 0.01;
  c.t_final = 0.1;
  c.orders = {0, 2};
  return c;
}

}  // namespace

TEST_CASE("zero state stays zero") {
  const SimConfig cfg = small_config();
  const WaveLattice lat(cfg.n);
  SolverState s{0.0, SpectralField(lat), 0};
  for (int k = 0; k < 3; ++k) s = dns_step(s, cfg);
  CHECK(oracle::max_abs(s.u) == 0.0);
  CHECK(s.step == 3);
  SolverState w{0.0, SpectralField(lat), 0};
  w = adm_step(w, cfg, 4);
  CHECK(oracle::max_abs(w.u) == 0.0);
}

TEST_CASE("Stokes limit decays at the viscous rate") {
  SimConfig cfg = small_config();
  cfg.n = 16;
  cfg.nu = 0.3;
  cfg.dt = 0.02;
  const WaveLattice lat(cfg.n);
  SpectralField u(lat);
  const auto a = lat.index_of_mode(1, 2, 0), b = lat.index_of_mode(-1, -2, 0);
  // (2, -1, 0) is orthogonal to k = (1, 2, 0)
  u.at(0, a) = Complex(2e-8, 1e-8);
  u.at(1, a) = Complex(-1e-8, -0.5e-8);
  u.at(0, b) = std::conj(u.at(0, a));
  u.at(1, b) = std::conj(u.at(1, a));
  SolverState s{0.0, u, 0};
  for (int k = 0; k < 10; ++k) s = dns_step(s, cfg);
  const double decay = std::exp(-cfg.nu * 5.0 * cfg.dt * 10);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(s.u.at(c, a) - decay * u.at(c, a)) <= 1e-9 * decay * std::abs(u.at(c, a)));
  }
}

TEST_CASE("Taylor-Green energy is non-increasing without forcing") {
  SimConfig cfg;
  cfg.nu = 0.1;
  const WaveLattice lat(16);
  SolverState s{0.0, taylor_green(lat), 0};
  SolverState w{0.0, apply_filter(cfg.filter, s.u), 0};
  double e = energy(s.u), ew = energy(w.u);
  for (int k = 0; k < 10; ++k) {
    s = dns_step(s, cfg);
    w = adm_step(w, cfg, 4);
    CHECK(energy(s.u) <= e);
    CHECK(energy(w.u) <= ew);
    e = energy(s.u);
    ew = energy(w.u);
  }
}

TEST_CASE("one step matches the straight-line oracle") {
  SimConfig cfg;  // 16^3, alpha = 0.5, p = 1, nu = 0.05, dt = 0.005
  const WaveLattice lat(cfg.n);
  const SpectralField u0 = taylor_green(lat);
  const SpectralField w0 = apply_filter(cfg.filter, u0);

  for (int N : {0, 3}) {
    const auto fast = adm_step(SolverState{0.0, w0, 0}, cfg, N).u;
    const auto slow = oracle::adm_step(w0, 0.5, 1.0, N, cfg.nu, cfg.dt);
    CHECK(oracle::max_abs_diff(fast, slow) <= 1e-12);
  }
  const auto fast = dns_step(SolverState{0.0, u0, 0}, cfg).u;
  const auto slow = oracle::adm_step(u0, 0.0, 1.0, -1, cfg.nu, cfg.dt);
  CHECK(oracle::max_abs_diff(fast, slow) <= 1e-12);
}

TEST_CASE("identity filter with N = 0 reproduces the Navier-Stokes step exactly") {
  SimConfig cfg;
  cfg.n = 8;
  const WaveLattice lat(cfg.n);
  const auto u0 = random_field(lat, 2.0, 3);
  Stepper dns(lat, Closure::navier_stokes(), cfg.nu, cfg.dt);
  Stepper adm(lat, Closure::deconvolution(Helmholtz{0.0, 1.0}, 0), cfg.nu, cfg.dt);
  const auto a = dns.advance({0.0, u0, 0}).u;
  const auto b = adm.advance({0.0, u0, 0}).u;
  CHECK(oracle::max_abs_diff(a, b) == 0.0);
}

TEST_CASE("discrete energy budget of the ADM system") {
  SimConfig cfg;
  cfg.n = 16;
  const WaveLattice lat(cfg.n);
  for (int N : {0, 2, 8}) {
    const DeconvOp op{cfg.filter, N};
    Stepper st(lat, Closure::deconvolution(cfg.filter, N), cfg.nu, cfg.dt);
    SolverState s{0.0, apply_filter(cfg.filter, random_field(lat, 2.0, 13)), 0};
    double prev = detail::model_energy(s.u, op);
    for (int k = 0; k < 40; ++k) {
      s = st.advance(s);
      const double e = detail::model_energy(s.u, op);
      CHECK(e <= prev * (1.0 + 1e-12));
      prev = e;
    }
  }
}

TEST_CASE("divergence stays at roundoff over 1000 steps") {
  SimConfig cfg;
  const WaveLattice lat(cfg.n);
  Stepper st(lat, Closure::deconvolution(cfg.filter, 2), cfg.nu, cfg.dt);
  SolverState s{0.0, apply_filter(cfg.filter, random_field(lat, 2.0, 5)), 0};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    s = st.advance(s);
    worst = std::max(worst, divergence_defect(s.u));
  }
  CHECK(worst <= 1e-11);
  CHECK(s.step == 1000);
}

TEST_CASE("configuration checks") {
  SimConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.nu = 0.0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = SimConfig{};
  cfg.dt = 2.0;
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = SimConfig{};
  cfg.orders = {};
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg = SimConfig{};
  cfg.orders = {1, -1};
  CHECK_THROWS_AS(validate(cfg), DomainError);

  cfg = SimConfig{};
  cfg.dt = 0.5;  // dt * max|u0| > dx / 2 for Taylor-Green at 16^3
  CHECK_THROWS_AS(check_cfl(cfg, make_initial(cfg)), DomainError);
  CHECK_NOTHROW(check_cfl(SimConfig{}, make_initial(SimConfig{})));

  CHECK(step_count(1.0, 0.005) == 200);
  CHECK(step_count(1.0, 0.3) == 4);
  CHECK(step_count(0.1, 0.1) == 1);
}

TEST_CASE("non-finite states raise a blow-up error with the step index") {
  const WaveLattice lat(8);
  SpectralField u = random_field(lat, 2.0, 1);
  u.at(0, lat.index_of_mode(1, 0, 0)) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  Stepper st(lat, Closure::navier_stokes(), 0.1, 0.01);
  try {
    st.advance({0.0, u, 6});
    FAIL("no exception");
  } catch (const BlowUp& e) {
    CHECK(e.step() == 7);
  }
}

TEST_CASE("run_experiment bookkeeping") {
  SimConfig cfg = small_config();
  cfg.t_final = cfg.dt;
  cfg.orders = {0};
  RunOptions opt;
  opt.write_files = false;
  const auto out = run_experiment(cfg, opt);
  CHECK(out.steps == 1);
  CHECK(out.times.size() == 2);
  CHECK(out.samples.size() == 2);
  CHECK(out.samples.front().eps_l2 == 0.0);
  CHECK(out.max_div_defect <= 1e-11);
}

TEST_CASE("run_experiment is deterministic across thread counts") {
  SimConfig cfg = small_config();
  cfg.orders = {0, 1, 2, 4};
  cfg.init.kind = InitialCondition::Kind::RandomSpectrum;
  RunOptions one, many;
  one.write_files = many.write_files = false;
  many.threads = 4;
  const auto a = timeseries_table(run_experiment(cfg, one)).str();
  const auto b = timeseries_table(run_experiment(cfg, many)).str();
  const auto c = timeseries_table(run_experiment(cfg, one)).str();
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("ADM error at T shrinks with N on a short Taylor-Green run") {
  SimConfig cfg;
  cfg.t_final = 0.25;
  cfg.orders = {0, 8};
  RunOptions opt;
  opt.write_files = false;
  opt.threads = 2;
  const auto out = run_experiment(cfg, opt);
  double e0 = 0.0, e8 = 0.0;
  for (const auto& s : out.samples)
    if (s.step == out.steps) (s.order == 0 ? e0 : e8) = s.eps_l2;
  CHECK(e0 > 0.0);
  CHECK(e8 < e0);
}
