#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evomem/quadrature.hpp"

using namespace evomem;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Independent oracle for the weighted reference integrals.
double moment_oracle(int j, double a) {
  auto f = [&](double s) { return std::pow(s, j) * std::exp(-a * (s + 1.0)); };
  return adaptive_integrate_scalar(f, -1.0, 1.0, 1e-14);
}

}  // namespace

TEST_CASE("weighted moments: closed-form values") {
  CHECK(weighted_moments(0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(weighted_moments(1, 0.0)) < 1e-15);
  CHECK(weighted_moments(0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("weighted moments match the adaptive oracle") {
  for (double a : {0.0, 1e-8, 0.3, 1.0, 5.0, 11.9, 12.1, 20.0, 64.0}) {
    for (int j = 0; j <= 12; ++j) {
      const double want = moment_oracle(j, a);
      const double got = weighted_moments(j, a);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("Radau rule: unweighted endpoint cases") {
  const RadauRule& r0 = build_radau(0, 0.0);
  REQUIRE(r0.nodes.size() == 1);
  CHECK(r0.nodes[0] == 1.0);
  CHECK(r0.weights[0] == doctest::Approx(2.0).epsilon(1e-14));

  const RadauRule& r1 = build_radau(1, 0.0);
  REQUIRE(r1.nodes.size() == 2);
  CHECK(r1.nodes[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(r1.nodes[1] == 1.0);
  CHECK(r1.weights[0] == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(r1.weights[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("Radau rule (2, 0.7) reproduces the moments") {
  const RadauRule& r = build_radau(2, 0.7);
  for (int j = 0; j <= 4; ++j) {
    double q = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i)
      q += r.weights[i] * std::pow(r.nodes[i], j);
    CHECK(rel_err(q, weighted_moments(j, 0.7)) < 1e-12);
  }
}

TEST_CASE("Radau exactness, positivity and containment over random (q, a)") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> qd(0, 4);
  std::uniform_real_distribution<double> ad(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int q = qd(rng);
    const double a = ad(rng);
    const RadauRule& r = build_radau(q, a);
    REQUIRE(static_cast<int>(r.nodes.size()) == q + 1);
    CHECK(r.nodes.back() == 1.0);
    for (int i = 0; i <= q; ++i) {
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] > -1.0);
      CHECK(r.nodes[i] <= 1.0);
      if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    for (int j = 0; j <= 2 * q; ++j) {
      double quad = 0.0;
      for (int i = 0; i <= q; ++i) quad += r.weights[i] * std::pow(r.nodes[i], j);
      const double want = weighted_moments(j, a);
      CHECK(std::abs(quad - want) <= 1e-11 * std::max(std::abs(want), 1e-3));
    }
  }
}

TEST_CASE("Radau rule survives large weight decay and rejects the absurd") {
  const RadauRule& r = build_radau(3, 64.0);  // rho=256 on tau=1/4 meshes
  for (int j = 0; j <= 6; ++j) {
    double quad = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i)
      quad += r.weights[i] * std::pow(r.nodes[i], j);
    CHECK(rel_err(quad, weighted_moments(j, 64.0)) < 1e-10);
  }
  CHECK_THROWS_AS(build_radau(3, 1e6), std::domain_error);
  CHECK_THROWS_AS(build_radau(40, 0.0), std::domain_error);
}

TEST_CASE("mapped rule: hand examples") {
  MappedRule m0 = make_mapped_rule(0, 0.0, 1.0, 0.0);
  REQUIRE(m0.nodes.size() == 1);
  CHECK(m0.nodes[0] == 1.0);
  CHECK(m0.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

  MappedRule m1 = make_mapped_rule(1, 0.0, 2.0, 0.0);
  CHECK(m1.nodes[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(m1.nodes[1] == 2.0);
  CHECK(m1.weights[0] == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(m1.weights[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("mapped rule integrates the weighted interval integral") {
  // (q=1, rho=1, I=(0,0.5]): e^{-2t} t^j for j <= 2, against the adaptive oracle
  MappedRule m = make_mapped_rule(1, 0.0, 0.5, 1.0);
  for (int j = 0; j <= 2; ++j) {
    double quad = 0.0;
    for (size_t i = 0; i < m.nodes.size(); ++i)
      quad += m.weights[i] * std::pow(m.nodes[i], j);
    auto f = [&](double t) { return std::exp(-2.0 * t) * std::pow(t, j); };
    const double want = adaptive_integrate_scalar(f, 0.0, 0.5, 1e-14);
    CHECK(rel_err(quad, want) < 1e-12);
  }
}

TEST_CASE("mapped rule exactness on random intervals vs adaptive oracle") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> qd(0, 4);
  std::uniform_real_distribution<double> rd(0.0, 4.0), td(0.05, 1.5), t0d(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int q = qd(rng);
    const double rho = rd(rng), t0 = t0d(rng), tau = td(rng);
    MappedRule m = make_mapped_rule(q, t0, t0 + tau, rho);
    CHECK(m.nodes.back() == t0 + tau);
    for (int j = 0; j <= 2 * q; ++j) {
      double quad = 0.0, quad_plain = 0.0;
      for (int i = 0; i <= q; ++i) {
        quad += m.weights[i] * std::pow(m.nodes[i] - t0, j);
        quad_plain += m.plain_weights[i] * std::exp(-2.0 * rho * (m.nodes[i] - t0)) *
                      std::pow(m.nodes[i] - t0, j);
      }
      auto f = [&](double t) {
        return std::exp(-2.0 * rho * (t - t0)) * std::pow(t - t0, j);
      };
      const double want = adaptive_integrate_scalar(f, t0, t0 + tau, 1e-14);
      CHECK(std::abs(quad - want) <= 1e-10 * std::max(std::abs(want), 1e-6));
      // plain weights are the same rule with the exponential divided out
      CHECK(std::abs(quad_plain - quad) <= 1e-11 * std::max(std::abs(quad), 1e-6));
    }
  }
}

TEST_CASE("map_rule rejects a mismatched reference rule") {
  const RadauRule& r = build_radau(1, 0.5);
  CHECK_THROWS_AS(map_rule(r, 0.0, 1.0, 3.0), std::logic_error);
}

TEST_CASE("adaptive quadrature: smooth and endpoint-singular integrands") {
  CHECK(adaptive_integrate_scalar([](double) { return 1.0; }, 0.0, 2.0, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-13));

  // (1-s)^{-alpha} integrands are formed from the supplied endpoint distance.
  bool ok = false;
  const double v1 = adaptive_integrate_scalar_w(
      [](double, double w) { return std::pow(w, -0.5); }, 0.0, 1.0, 1e-12,
      SingularityHint::power(0.5), &ok);
  CHECK(ok);
  CHECK(std::abs(v1 - 2.0) < 1e-12);

  const double v2 = adaptive_integrate_scalar_w(
      [](double, double w) { return std::pow(w, -0.75); }, 0.0, 1.0, 1e-12,
      SingularityHint::power(0.75), &ok);
  CHECK(ok);
  CHECK(std::abs(v2 - 4.0) < 1e-12);
}

TEST_CASE("adaptive quadrature: singular powers at several tolerances") {
  for (double alpha : {0.5, 0.75}) {
    for (double tol : {1e-6, 1e-9, 1e-12}) {
      for (double c : {0.3, 2.0}) {
        const double b = 1.3, d = 0.4;
        auto f = [&](double s, double w) { return c * (d + s) * std::pow(w, -alpha); };
        // int_0^b (d+s)(b-s)^{-alpha} ds = (d+b) b^{1-a}/(1-a) - b^{2-a}/(2-a)
        const double want = c * ((d + b) * std::pow(b, 1.0 - alpha) / (1.0 - alpha) -
                                 std::pow(b, 2.0 - alpha) / (2.0 - alpha));
        bool ok = false;
        const double got = adaptive_integrate_scalar_w(f, 0.0, b, tol,
                                                       SingularityHint::power(alpha), &ok);
        CHECK(ok);
        CHECK(std::abs(got - want) <= tol);
      }
    }
  }
}

TEST_CASE("adaptive quadrature: vector integrand and oscillatory smooth case") {
  auto f = [](double s, double, double* out) {
    out[0] = std::sin(7.0 * s);
    out[1] = std::exp(s);
  };
  IntegrationResult res = adaptive_integrate(f, 2, 0.0, 3.0, 1e-12);
  CHECK(res.converged);
  CHECK(std::abs(res.value(0) - (1.0 - std::cos(21.0)) / 7.0) < 1e-12);
  CHECK(std::abs(res.value(1) - (std::exp(3.0) - 1.0)) < 2e-11);
}

TEST_CASE("adaptive quadrature flags an unreachable tolerance") {
  // A genuinely rough integrand: |sin(1/s)|-style oscillation near 0 cannot
  // reach 1e-14 within the segment budget.
  auto f = [](double s) { return std::sin(1.0 / (s + 1e-14)); };
  bool ok = true;
  (void)adaptive_integrate_scalar(f, 0.0, 1.0, 1e-14, SingularityHint::none(), &ok);
  CHECK_FALSE(ok);
}

TEST_CASE("gauss_legendre: exactness up to degree 2n-1") {
  for (int n : {1, 2, 5, 8}) {
    const GaussRule& g = gauss_legendre(n);
    for (int j = 0; j <= 2 * n - 1; ++j) {
      double quad = 0.0;
      for (int i = 0; i < n; ++i) quad += g.weights[i] * std::pow(g.nodes[i], j);
      const double want = (j % 2 == 0) ? 2.0 / (j + 1) : 0.0;
      CHECK(std::abs(quad - want) < 1e-12);
    }
  }
}
