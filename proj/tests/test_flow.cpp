#include "doctest.h"

#include <cmath>

#include "corpus.hpp"
#include "mdnf/flow.hpp"

using namespace mdnf;

TEST_CASE("density in the level chart") {
  const LevelChart one(corpus::normalize("x^2+y", "1"));
  CHECK(one.density_xz(0.2, 0.1) == doctest::Approx(1.0));
  const LevelChart lin(corpus::normalize("x^2+y", "1+y"));
  CHECK(lin.density_xz(0.2, 0.1) == doctest::Approx(1 + 0.1 - 0.04).epsilon(1e-14));
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  CHECK(ex.density_xz(0.3, 0.1) == doctest::Approx(std::exp(0.3)));
  CHECK(ex.density_xz(0.3, 0.15) == doctest::Approx(std::exp(0.3)));
}

TEST_CASE("transit time") {
  const LevelChart one(corpus::normalize("x^2+y", "1"));
  CHECK(one.transit_time(0.25) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(one.transit_time(0.0) == 0.0);
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  for (double e : {0.04, 0.09, 0.16}) {
    const double w = std::sqrt(e);
    CHECK(std::fabs(ex.transit_time(e) + (std::exp(w) - std::exp(-w))) <= 1e-13);
  }
  try {
    (void)one.transit_time(10.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegionOutsideDomain);
  }
}

TEST_CASE("bisector") {
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  CHECK(ex.bisector(0.0) == 0.0);
  for (double z : {0.01, 0.04, 0.09, 0.16}) {
    CHECK(std::fabs(ex.bisector(z) - std::log(std::cosh(std::sqrt(z)))) <= 1e-12);
    CHECK(std::fabs(ex.bisector(z) - ex.bisector_mirrored(z)) <= 1e-10);
  }
  for (const char* w : {"1", "8", "1+y"}) {
    for (const char* f : corpus::kF) {
      if (std::string(f) == "x^2+y+x^3") continue;  // the Morse chart itself is not even
      const LevelChart c(corpus::normalize(f, w));
      CAPTURE(corpus::label(f, w));
      for (double z : {0.01, 0.09, 0.16}) CHECK(std::fabs(c.bisector(z)) <= 1e-12);
    }
  }
}

TEST_CASE("bisector splits the level set into equal halves") {
  for (const char* f : corpus::kF) {
    for (const char* w : corpus::kOmega) {
      const LevelChart c(corpus::normalize(f, w));
      CAPTURE(corpus::label(f, w));
      const double zmax = std::min(0.16, c.problem().radius() * c.problem().radius());
      for (int k = 1; k <= 8; ++k) {
        const double z = zmax * k / 8.0;
        const double s = c.bisector(z);
        const double r = std::sqrt(z);
        CHECK(s >= -r);
        CHECK(s <= r);
        auto w_z = [&](double t) { return c.density_xz(t, z); };
        const double left = integrate_1d(w_z, -r, s, 1e-14).value;
        const double right = integrate_1d(w_z, s, r, 1e-14).value;
        CHECK(std::fabs(left - right) <= 1e-10);
      }
    }
  }
}

TEST_CASE("time from the bisector") {
  const LevelChart one(corpus::normalize("x^2+y", "1"));
  CHECK(one.time_from_bisector(0.2, 0.09) == doctest::Approx(-0.2).epsilon(1e-14));
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  for (double x : {-0.2, 0.0, 0.25}) {
    const double z = 0.09;
    CHECK(std::fabs(ex.time_from_bisector(x, z) - (std::cosh(0.3) - std::exp(x))) <= 1e-13);
  }
  CHECK(std::fabs(ex.time_from_bisector(ex.bisector(0.09), 0.09)) <= 1e-15);
}

TEST_CASE("time is additive along a level set and satisfies dT(X) = 1") {
  for (const char* f : corpus::kF) {
    for (const char* w : corpus::kOmega) {
      const LevelChart c(corpus::normalize(f, w));
      CAPTURE(corpus::label(f, w));
      const double zmax = std::min(0.16, c.problem().radius() * c.problem().radius());
      for (int k = 1; k <= 5; ++k) {
        const double z = zmax * k / 5.0;
        const double r = std::sqrt(z);
        for (double a : {-0.8 * r, -0.1 * r, 0.5 * r}) {
          const double b = 0.9 * r;
          const double chord =
              integrate_1d([&](double t) { return c.density_xz(t, z); }, a, b, 1e-14).value;
          CHECK(std::fabs(c.time_from_bisector(a, z) - chord - c.time_from_bisector(b, z)) <=
                1e-10);
          const double h = 1e-5;
          const double dTdx =
              (c.time_from_bisector(a + h, z) - c.time_from_bisector(a - h, z)) / (2 * h);
          const Vec2 X = c.hamiltonian_field_xz(a, z);
          CHECK(std::fabs(dTdx * X[0] - 1.0) <= 1e-6);
          CHECK(X[1] == 0.0);
        }
      }
    }
  }
}

TEST_CASE("Hamiltonian field") {
  const LevelChart one(corpus::normalize("x^2+y", "1"));
  CHECK(one.hamiltonian_field_xz(0.1, 0.05)[0] == doctest::Approx(-1.0));
  const LevelChart two(corpus::normalize("x^2+y", "2"));
  CHECK(two.hamiltonian_field_xz(0.1, 0.05)[0] == doctest::Approx(-0.5));
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)"));
  CHECK(ex.hamiltonian_field_xz(0.0, 0.05)[0] == doctest::Approx(-1.0));
}

TEST_CASE("ODE transit-time oracle") {
  const LevelChart one(corpus::normalize("x^2+y", "1"));
  CHECK(std::fabs(one.transit_time_oracle(0.25, 1e-4) + 1.0) <= 1e-6);
  const LevelChart two(corpus::normalize("x^2+y", "2"));
  CHECK(std::fabs(two.transit_time_oracle(0.25, 1e-4) + 2.0) <= 1e-6);
  const LevelChart ex(corpus::normalize("x^2+y", "exp(x)*(1+y)"));
  for (double e : {0.04, 0.16})
    CHECK(std::fabs(ex.transit_time_oracle(e, 1e-3) - ex.transit_time(e)) <= 1e-6);
  try {
    (void)one.transit_time_oracle(0.25, 1e-4, 100);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepLimitExceeded);
  }
}

TEST_CASE("level surrogate agrees with direct quadrature") {
  for (const char* f : corpus::kF) {
    for (const char* w : {"exp(x)", "exp(x)*(1+y)"}) {
      const auto prob = corpus::normalize(f, w);
      const LevelChart c(prob);
      const auto s = LevelSurrogate::build(prob, c.z_max());
      CAPTURE(corpus::label(f, w));
      CHECK(s.converged());
      for (double z : {0.003, 0.04, 0.1}) {
        if (z > c.z_max()) continue;
        CHECK(std::fabs(s.transit_time(z) - c.transit_time(z)) <= 1e-12);
        CHECK(std::fabs(s.bisector(z) - c.bisector(z)) <= 1e-12);
        const double x = 0.3 * std::sqrt(z);
        CHECK(std::fabs(s.time_from_bisector(x, z) - c.time_from_bisector(x, z)) <= 1e-12);
        CHECK(std::fabs(s.density(x, z) - c.density_xz(x, z)) <= 1e-12);
      }
    }
  }
}
