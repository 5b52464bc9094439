#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "adm/field.hpp"
#include "adm/filters.hpp"
#include "oracles.hpp"

using namespace adm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> log_k2_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const int count = static_cast<int>(std::lround((std::log10(hi) - std::log10(lo)) * per_decade));
  for (int i = 0; i <= count; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / count));
  return g;
}

const std::vector<FilterSpec> kSpecs{Helmholtz{1.0, 1.0}, Helmholtz{0.3, 0.75}, Helmholtz{2.0, 4.0},
                                     Gaussian{0.5},       Gaussian{2.0},        GaussianApprox{1.0, 1},
                                     GaussianApprox{1.0, 17}, HelmholtzPower{0.2, 3}, HelmholtzPower{1.0, 64}};

}  // namespace

TEST_CASE("filter symbols at hand-computed points") {
  CHECK(filter_symbol(Helmholtz{1.0, 1.0}, 1.0) == 0.5);
  for (const auto& s : kSpecs) CHECK(filter_symbol(s, 0.0) == 1.0);
  // alpha^2 |k|^2 = 24
  CHECK_THAT(filter_symbol(Gaussian{1.0}, 24.0), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THAT(filter_symbol(Gaussian{1.0}, 24.0), WithinAbs(0.367879, 1e-6));
  CHECK_THAT(filter_symbol(GaussianApprox{2.0, 3}, 5.0), WithinRel(std::pow(1.0 + 4.0 * 5.0 / 72.0, -3.0), 1e-14));
  CHECK_THAT(filter_symbol(HelmholtzPower{0.5, 2}, 3.0), WithinRel(1.0 / (1.75 * 1.75), 1e-14));
  CHECK_THAT(filter_symbol(Helmholtz{0.5, 1.5}, 2.0), WithinRel(1.0 / (1.0 + std::pow(0.5, 3.0) * std::pow(2.0, 1.5)), 1e-14));
}

TEST_CASE("filter symbols lie in (0, 1] and decrease strictly") {
  const auto grid = log_k2_grid(1e-3, 1e6, 40);
  for (const auto& s : kSpecs) {
    double prev = 1.0;
    for (double k2 : grid) {
      const auto sp = symbol_pair(s, k2);
      if (sp.g == 0.0) break;  // underflow of the Gaussian far in the tail
      CHECK(sp.g > 0.0);
      CHECK(sp.g < 1.0);
      CHECK(sp.g < prev);
      CHECK_THAT(sp.g + sp.one_minus_g, WithinRel(1.0, 1e-15));
      prev = sp.g;
    }
  }
}

TEST_CASE("validation of filter parameters") {
  CHECK_THROWS_AS(validate(FilterSpec{Helmholtz{1.0, 0.5}}), DomainError);
  CHECK_THROWS_AS(validate(FilterSpec{Helmholtz{-1.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(validate(FilterSpec{Helmholtz{0.0, 1.0}}), DomainError);
  CHECK_NOTHROW(validate(FilterSpec{Helmholtz{0.0, 1.0}}, true));
  CHECK_THROWS_AS(validate(FilterSpec{GaussianApprox{1.0, 0}}), DomainError);
  CHECK_THROWS_AS(validate(FilterSpec{HelmholtzPower{1.0, 0}}), DomainError);
  CHECK_NOTHROW(validate(FilterSpec{Helmholtz{0.1, 0.75}}));
}

TEST_CASE("apply_filter and apply_inverse") {
  const WaveLattice lat(16);
  const auto u = random_field(lat, 1.0, 8);

  SECTION("single mode at |k| = 1 is halved and doubled back") {
    SpectralField f(lat);
    const auto a = lat.index_of_mode(0, 1, 0), b = lat.index_of_mode(0, -1, 0);
    f.at(0, a) = 1.0;
    f.at(0, b) = 1.0;
    const auto g = apply_filter(Helmholtz{1.0, 1.0}, f);
    CHECK(g.at(0, a) == Complex(0.5, 0.0));
    const auto h = apply_inverse(Helmholtz{1.0, 1.0}, f);
    CHECK(h.at(0, a) == Complex(2.0, 0.0));
  }

  SECTION("norms never increase and invariants are kept") {
    CHECK(oracle::max_abs(apply_filter(Gaussian{1.0}, SpectralField(lat))) == 0.0);
    for (const auto& s : kSpecs) {
      const auto g = apply_filter(s, u);
      for (double sv : {-1.0, 0.0, 0.5, 1.0, 2.0}) CHECK(sobolev_norm(g, sv) <= sobolev_norm(u, sv));
      const auto r = check_invariants(g);
      CHECK(r.hermitian_rel <= 1e-12);
      CHECK(r.divergence_rel <= 1e-12);
    }
  }

  SECTION("inverse undoes the filter") {
    for (const auto& s : kSpecs) {
      if (!invertible(s)) continue;
      const auto back = apply_inverse(s, apply_filter(s, u));
      CHECK(oracle::max_abs_diff(back, u) <= 1e-12 * oracle::max_abs(u));
    }
  }

  SECTION("the Gaussian has no inverse") {
    CHECK_FALSE(invertible(Gaussian{1.0}));
    CHECK_FALSE(inverse_symbol(Gaussian{1.0}, 1.0).has_value());
    CHECK_THROWS_AS(apply_inverse(Gaussian{1.0}, u), NonInvertibleFilter);
    CHECK_THROWS_WITH(apply_inverse(Gaussian{1.0}, u), "non-invertible filter");
  }
}

TEST_CASE("Gaussian approximants") {
  CHECK(gaussian_approx_error(1.0, 3, 0.0) == 0.0);
  CHECK_THAT(gaussian_approx_error(1.0, 1, 24.0), WithinAbs(std::abs(0.5 - std::exp(-1.0)), 1e-15));
  CHECK_THAT(gaussian_approx_error(1.0, 1, 24.0), WithinAbs(0.132121, 1e-6));

  const auto grid = log_k2_grid(1e-4, 1e8, 30);
  for (int m = 1; m <= 64; ++m)
    for (double alpha : {0.1, 1.0, 3.0})
      for (double k2 : grid) {
        CHECK(gaussian_approx_error(alpha, m, k2) <= 2.0 / m);
        // the approximant sits above the Gaussian and decreases toward it with m
        const double gm = filter_symbol(GaussianApprox{alpha, m}, k2);
        const double gm1 = filter_symbol(GaussianApprox{alpha, m + 1}, k2);
        CHECK(gm >= filter_symbol(Gaussian{alpha}, k2));
        CHECK(gm1 <= gm * (1.0 + 1e-15));
      }
}

TEST_CASE("HelmholtzPower equals the Gaussian approximant of matching width") {
  const auto grid = log_k2_grid(1e-3, 1e6, 20);
  for (int m : {1, 2, 5, 16, 64})
    for (double alpha : {0.25, 1.0, 4.0}) {
      const double mu = std::sqrt(alpha * alpha / (24.0 * m));
      for (double k2 : grid)
        CHECK_THAT(filter_symbol(HelmholtzPower{mu, m}, k2),
                   WithinRel(filter_symbol(GaussianApprox{alpha, m}, k2), 1e-13));
    }
}

TEST_CASE("Helmholtz-power sandwich") {
  const auto z = helmholtz_power_sandwich(0.7, 4, 0.0);
  CHECK(z.lo == std::ldexp(1.0, -3));
  CHECK(z.mid == 1.0);
  CHECK(z.hi == 1.0);

  const auto one = helmholtz_power_sandwich(0.7, 1, 3.3);
  CHECK_THAT(one.lo, WithinRel(one.mid, 1e-15));
  CHECK_THAT(one.hi, WithinRel(one.mid, 1e-15));

  const auto two = helmholtz_power_sandwich(1.0, 2, 1.0);
  CHECK_THAT(two.lo, WithinRel(0.25, 1e-15));
  CHECK_THAT(two.mid, WithinRel(0.25, 1e-15));
  CHECK_THAT(two.hi, WithinRel(0.5, 1e-15));

  for (int m = 1; m <= 8; ++m)
    for (double k2 : log_k2_grid(1e-3, 1e12, 20)) {
      const auto s = helmholtz_power_sandwich(0.3, m, k2);
      CHECK(s.lo <= s.mid * (1.0 + 1e-14));
      CHECK(s.mid <= s.hi * (1.0 + 1e-14));
    }
}
