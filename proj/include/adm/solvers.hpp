#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "adm/deconvolution.hpp"
#include "adm/error.hpp"
#include "adm/field.hpp"
#include "adm/filters.hpp"
#include "adm/snapshot.hpp"

namespace adm {

struct InitialCondition {
  enum class Kind { TaylorGreen, RandomSpectrum, Snapshot };
  Kind kind = Kind::TaylorGreen;
  double amplitude = 1.0;     ///< TaylorGreen
  double decay = 2.5;         ///< RandomSpectrum: |u_k| ~ |k|^{-decay}
  std::uint64_t seed = 1;     ///< RandomSpectrum
  std::string path;           ///< Snapshot
};

struct Forcing {
  enum class Kind { None, Snapshot };
  Kind kind = Kind::None;
  std::string path;
};

struct SimConfig {
  int n = 16;
  double box = 2.0 * std::numbers::pi;
  double nu = 0.05;
  FilterSpec filter = Helmholtz{0.5, 1.0};
  std::vector<int> orders{0, 1, 2, 4, 8};  ///< deconvolution orders N to run
  double t_final = 1.0;
  double dt = 0.005;
  InitialCondition init;
  Forcing forcing;
  std::string output_dir = "adm_out";
  double sobolev_constant = 2.0;  ///< C = S_1 S_{1/2}
  int sample_every = 1;           ///< steps between stored samples
  int snapshot_every = 0;         ///< steps between ADMF dumps; 0 writes t=0 and t=T only
};

/// Rejects configurations outside the solver's contract. The CFL check needs u0 and is
/// done separately by check_cfl().
inline void validate(const SimConfig& cfg) {
  WaveLattice(cfg.n, cfg.box);
  if (!(cfg.nu > 0.0)) throw DomainError("nu must be > 0");
  if (!(cfg.t_final > 0.0)) throw DomainError("T must be > 0");
  if (!(cfg.dt > 0.0) || cfg.dt > cfg.t_final) throw DomainError("dt must satisfy 0 < dt <= T");
  if (cfg.orders.empty()) throw DomainError("N list is empty");
  for (int N : cfg.orders)
    if (N < 0) throw DomainError("deconvolution orders must be >= 0");
  if (cfg.sample_every < 1) throw DomainError("sample_every must be >= 1");
  if (cfg.snapshot_every < 0) throw DomainError("snapshot_every must be >= 0");
  validate(cfg.filter);
}

inline void check_cfl(const SimConfig& cfg, const SpectralField& u0) {
  const double umax = max_speed(u0);
  const double limit = 0.5 * WaveLattice(cfg.n, cfg.box).dx();
  if (umax > 0.0 && cfg.dt * umax > limit)
    throw DomainError("CFL violated: dt*max|u0| = " + std::to_string(cfg.dt * umax) + " > 0.5*dx = " +
                      std::to_string(limit));
}

/// Number of fixed steps covering [0, T]; T/dt is rounded to the nearest integer when it
/// is within 1e-9 of one, otherwise rounded up.
inline long step_count(double t_final, double dt) {
  const double r = t_final / dt;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return std::max(1L, static_cast<long>(nearest));
  return static_cast<long>(std::ceil(r));
}

struct SolverState {
  double t = 0.0;
  SpectralField u;
  long step = 0;
};

/// Pre/post operators wrapped around the quadratic term:
///   du/dt = P[ -post( div(pre(u) (x) pre(u)) ) + post(f) ] + nu Laplace(u).
/// Identity/identity is the Navier-Stokes equations; D_N / G is the ADM system.
class Closure {
 public:
  static Closure navier_stokes() { return Closure{}; }
  static Closure deconvolution(const FilterSpec& spec, int order) {
    Closure c;
    c.op_ = DeconvOp{spec, order};
    return c;
  }

  bool identity() const noexcept { return !op_.has_value(); }
  const std::optional<DeconvOp>& op() const noexcept { return op_; }

  /// Per-slot symbols of the pre and post operators, or empty when identity.
  std::vector<double> pre_symbols(const WaveLattice& lat) const { return symbols(lat, true); }
  std::vector<double> post_symbols(const WaveLattice& lat) const { return symbols(lat, false); }

 private:
  std::vector<double> symbols(const WaveLattice& lat, bool pre) const {
    if (!op_) return {};
    std::vector<double> s(lat.size());
    for_each_mode(lat, [&](const Mode& m) {
      s[m.idx] = pre ? deconv_symbol(*op_, m.k2) : filter_symbol(op_->spec, m.k2);
    });
    return s;
  }
  std::optional<DeconvOp> op_;
};

/// Fixed-step integrator: three-stage SSP Runge-Kutta on the projected transport and
/// forcing terms, with the viscous term integrated exactly by exp(-nu |k|^2 t).
///
/// Stages, with E = exp(-nu |k|^2 dt) and H = exp(-nu |k|^2 dt / 2):
///   u1 = E (u0 + dt F(u0))
///   u2 = 3/4 H u0 + 1/4 H^{-1} (u1 + dt F(u1))
///   u3 = 1/3 E u0 + 2/3 H (u2 + dt F(u2))
class Stepper {
 public:
  Stepper(const WaveLattice& lat, Closure closure, double nu, double dt,
          std::optional<SpectralField> forcing = std::nullopt)
      : lat_(lat), closure_(std::move(closure)), nu_(nu), dt_(dt) {
    if (!(nu > 0.0)) throw DomainError("nu must be > 0");
    if (!(dt > 0.0)) throw DomainError("dt must be > 0");
    pre_ = closure_.pre_symbols(lat);
    post_ = closure_.post_symbols(lat);
    full_.resize(lat.size());
    half_.resize(lat.size());
    for_each_mode(lat, [&](const Mode& m) {
      full_[m.idx] = std::exp(-nu * m.k2 * dt);
      half_[m.idx] = std::exp(-0.5 * nu * m.k2 * dt);
    });
    if (forcing) {
      if (!(forcing->lattice() == lat)) throw LatticeMismatch();
      SpectralField f = leray_project(*forcing);
      if (!post_.empty()) f = multiply(f, post_);
      forcing_ = std::move(f);
    }
  }

  const WaveLattice& lattice() const noexcept { return lat_; }
  double dt() const noexcept { return dt_; }
  const Closure& closure() const noexcept { return closure_; }

  /// Projected right-hand side without the viscous term.
  SpectralField tendency(const SpectralField& u) const {
    SpectralField a = pre_.empty() ? u : multiply(u, pre_);
    SpectralField nl = nonlinear_term(a, a);
    nl *= -1.0;
    if (!post_.empty()) nl = multiply(nl, post_);
    if (forcing_) nl += *forcing_;
    return leray_project(nl);
  }

  SolverState advance(const SolverState& s) const {
    const auto& u0 = s.u;
    if (!(u0.lattice() == lat_)) throw LatticeMismatch();
    const std::size_t size = lat_.size();

    SpectralField f0 = tendency(u0);
    SpectralField u1(lat_);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < size; ++i)
        u1.at(c, i) = full_[i] * (u0.at(c, i) + dt_ * f0.at(c, i));

    SpectralField f1 = tendency(u1);
    SpectralField u2(lat_);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < size; ++i)
        u2.at(c, i) = 0.75 * half_[i] * u0.at(c, i) + 0.25 / half_[i] * (u1.at(c, i) + dt_ * f1.at(c, i));

    SpectralField f2 = tendency(u2);
    SpectralField u3(lat_);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < size; ++i)
        u3.at(c, i) = (1.0 / 3.0) * full_[i] * u0.at(c, i) +
                      (2.0 / 3.0) * half_[i] * (u2.at(c, i) + dt_ * f2.at(c, i));

    const long step = s.step + 1;
    if (!all_finite(u3)) throw BlowUp(step, "non-finite coefficient");
    return SolverState{s.t + dt_, std::move(u3), step};
  }

 private:
  static SpectralField multiply(const SpectralField& f, const std::vector<double>& sym) {
    SpectralField out(f.lattice(), f.solenoidal());
    for (int c = 0; c < 3; ++c) {
      auto src = f.component(c);
      auto dst = out.component(c);
      for (std::size_t i = 0; i < sym.size(); ++i) dst[i] = sym[i] * src[i];
    }
    return out;
  }

  WaveLattice lat_;
  Closure closure_;
  double nu_;
  double dt_;
  std::vector<double> pre_, post_, full_, half_;
  std::optional<SpectralField> forcing_;
};

inline std::optional<SpectralField> load_forcing(const SimConfig& cfg) {
  if (cfg.forcing.kind == Forcing::Kind::None) return std::nullopt;
  SpectralField f = load_snapshot(cfg.forcing.path);
  if (!(f.lattice() == WaveLattice(cfg.n, cfg.box))) throw LatticeMismatch();
  return f;
}

/// One step of the projected Navier-Stokes equations.
inline SolverState dns_step(const SolverState& state, const SimConfig& cfg) {
  Stepper st(state.u.lattice(), Closure::navier_stokes(), cfg.nu, cfg.dt, load_forcing(cfg));
  return st.advance(state);
}

/// One step of the ADM system with deconvolution order N; the state holds the filtered field.
inline SolverState adm_step(const SolverState& state, const SimConfig& cfg, int order) {
  if (order < 0) throw DomainError("deconvolution order must be >= 0");
  Stepper st(state.u.lattice(), Closure::deconvolution(cfg.filter, order), cfg.nu, cfg.dt, load_forcing(cfg));
  return st.advance(state);
}

inline SpectralField make_initial(const SimConfig& cfg) {
  const WaveLattice lat(cfg.n, cfg.box);
  switch (cfg.init.kind) {
    case InitialCondition::Kind::TaylorGreen:
      return taylor_green(lat, cfg.init.amplitude);
    case InitialCondition::Kind::RandomSpectrum:
      return random_field(lat, cfg.init.decay, cfg.init.seed);
    case InitialCondition::Kind::Snapshot: {
      SpectralField f = load_snapshot(cfg.init.path);
      if (!(f.lattice() == lat)) throw LatticeMismatch();
      return leray_project(f);
    }
  }
  throw DomainError("unknown initial condition");
}

}  // namespace adm
