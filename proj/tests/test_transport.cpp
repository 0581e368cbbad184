#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace bratteli;
using namespace testsupport;

namespace {

std::vector<Rat> delta(std::size_t n, std::size_t at) {
  std::vector<Rat> v(n, Rat(0));
  v[at] = 1;
  return v;
}

void check_plan_feasible(const TransportPlan<Rat>& plan, const std::vector<Rat>& mu,
                         const std::vector<Rat>& nu) {
  std::vector<Rat> row(mu.size(), Rat(0)), col(nu.size(), Rat(0));
  for (const auto& e : plan.entries) {
    REQUIRE(e.mass > 0);
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  CHECK(row == mu);
  CHECK(col == nu);
}

}  // namespace

TEST_CASE("kantorovich on deltas returns the ground distance") {
  Rng rng(501);
  auto rho = random_metric(rng, 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      CHECK(kantorovich(delta(4, a), delta(4, b), rho).value == rho(a, b));
}

TEST_CASE("kantorovich of a measure with itself is zero") {
  Rng rng(502);
  auto rho = random_metric(rng, 5);
  auto mu = random_probability(rng, 5);
  auto res = kantorovich(mu, mu, rho);
  CHECK(res.value == 0);
  check_plan_feasible(res.plan, mu, mu);
}

TEST_CASE("3x3 discrete-metric instance: cost 1/2") {
  std::vector<Rat> mu{Rat(1, 2), Rat(1, 2), Rat(0)}, nu{Rat(0), Rat(1, 2), Rat(1, 2)};
  auto rho = GroundMetric<Rat>::discrete(3);
  // frozen from brute_force_oracle's basic-plan enumeration
  CHECK(brute_force_oracle(mu, nu, rho) == Rat(1, 2));
  auto res = kantorovich(mu, nu, rho);
  CHECK(res.value == Rat(1, 2));
  check_plan_feasible(res.plan, mu, nu);
}

TEST_CASE("2x2 oracle: minimum of the direct and crossed plans") {
  Rng rng(503);
  for (int trial = 0; trial < 50; ++trial) {
    auto rho = random_metric(rng, 2);
    auto mu = random_probability(rng, 2), nu = random_probability(rng, 2);
    // two basic structures only: keep mass in place as far as possible, or cross
    Rat direct = 0;
    {
      // optimal among plans: move the surplus across
      Rat surplus = mu[0] > nu[0] ? mu[0] - nu[0] : nu[0] - mu[0];
      direct = surplus * rho(0, 1);
    }
    CHECK(brute_force_oracle(mu, nu, rho) == direct);
    CHECK(kantorovich(mu, nu, rho).value == direct);
  }
}

TEST_CASE("kantorovich_to_delta equals a direct expectation and the solver") {
  Rng rng(504);
  SECTION("delta to itself is zero") {
    auto rho = random_metric(rng, 3);
    CHECK(kantorovich_to_delta(delta(3, 1), 1, rho) == 0);
  }
  SECTION("uniform on a pair at distance 1 is 1/2") {
    auto rho = GroundMetric<Rat>::discrete(2);
    std::vector<Rat> mu{Rat(1, 2), Rat(1, 2)};
    CHECK(kantorovich_to_delta(mu, 0, rho) == Rat(1, 2));
  }
  SECTION("random 5-point instances agree with the full solver") {
    for (int trial = 0; trial < 100; ++trial) {
      auto rho = random_metric(rng, 5);
      auto mu = random_probability(rng, 5);
      std::size_t v = rng.uniform(0, 4);
      CHECK(kantorovich_to_delta(mu, v, rho) == kantorovich(mu, delta(5, v), rho).value);
    }
  }
  SECTION("index out of range throws") {
    auto rho = random_metric(rng, 3);
    CHECK_THROWS_AS(kantorovich_to_delta(random_probability(rng, 3), 3, rho), std::out_of_range);
  }
}

TEST_CASE("dimension mismatches and non-probability inputs are rejected") {
  auto rho = GroundMetric<Rat>::discrete(3);
  std::vector<Rat> short_mu{Rat(1, 2), Rat(1, 2)};
  std::vector<Rat> bad_sum{Rat(1, 2), Rat(1, 2), Rat(1, 2)};
  std::vector<Rat> neg{Rat(3, 2), Rat(-1, 2), Rat(0)};
  std::vector<Rat> ok{Rat(1, 3), Rat(1, 3), Rat(1, 3)};
  CHECK_THROWS_AS(kantorovich(short_mu, ok, rho), ValidationError);
  CHECK_THROWS_AS(kantorovich(ok, bad_sum, rho), ValidationError);
  CHECK_THROWS_AS(kantorovich(neg, ok, rho), ValidationError);
}

TEST_CASE("dual potential on deltas separates the endpoints by the distance") {
  Rng rng(505);
  auto rho = random_metric(rng, 4);
  auto res = dual_lipschitz(delta(4, 0), delta(4, 2), rho);
  CHECK(res.value == rho(0, 2));
  CHECK(res.potential[0] - res.potential[2] == rho(0, 2));
}

TEST_CASE("dual of identical measures is zero") {
  Rng rng(506);
  auto rho = random_metric(rng, 4);
  auto mu = random_probability(rng, 4);
  CHECK(dual_lipschitz(mu, mu, rho).value == 0);
}

TEST_CASE("zero duality gap with a certified Lipschitz potential, exhaustively small") {
  // all instances on <= 4 points with denominator-8 masses, random metrics
  Rng rng(507);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = rng.uniform(2, 4);
    auto rho = random_metric(rng, n);
    auto mu = random_probability(rng, n, 8), nu = random_probability(rng, n, 8);
    Rat primal = kantorovich(mu, nu, rho).value;
    auto dual = dual_lipschitz(mu, nu, rho);
    CHECK(dual.value == primal);
    // the potential is genuinely 1-Lipschitz and attains the value
    Rat attained = 0;
    for (std::size_t i = 0; i < n; ++i) attained += dual.potential[i] * (mu[i] - nu[i]);
    CHECK(attained == primal);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(dual.potential[i] - dual.potential[j] <= rho(i, j));
  }
}

TEST_CASE("solver agrees with the brute-force oracle on random small instances") {
  Rng rng(508);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = rng.uniform(2, 5);
    auto rho = random_metric(rng, n);
    auto mu = random_probability(rng, n), nu = random_probability(rng, n);
    auto res = kantorovich(mu, nu, rho);
    CHECK(res.value == brute_force_oracle(mu, nu, rho));
    check_plan_feasible(res.plan, mu, nu);
  }
}

TEST_CASE("metric axioms of the transport distance, exactly") {
  Rng rng(509);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = rng.uniform(2, 4);
    auto rho = random_metric(rng, n);
    auto mu = random_probability(rng, n, 8), nu = random_probability(rng, n, 8),
         sigma = random_probability(rng, n, 8);
    Rat d_mn = kantorovich(mu, nu, rho).value;
    Rat d_nm = kantorovich(nu, mu, rho).value;
    Rat d_ms = kantorovich(mu, sigma, rho).value;
    Rat d_sn = kantorovich(sigma, nu, rho).value;
    CHECK(d_mn == d_nm);
    CHECK(d_mn <= d_ms + d_sn);
    CHECK((d_mn == 0) == (mu == nu));  // rho is nondegenerate by construction
  }
}

TEST_CASE("scaling comparison: rho <= r * rho' forces k_rho <= r * k_rho'") {
  Rng rng(510);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = rng.uniform(2, 5);
    auto rho_a = random_metric(rng, n);
    auto rho_b = random_metric(rng, n);
    Rat r = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) r = std::max(r, Rat(rho_a(i, j) / rho_b(i, j)));
    auto mu = random_probability(rng, n), nu = random_probability(rng, n);
    CHECK(kantorovich(mu, nu, rho_a).value <= r * kantorovich(mu, nu, rho_b).value);
  }
}

TEST_CASE("kr_norm is the transport value of the difference") {
  Rng rng(511);
  auto rho = random_metric(rng, 4);
  auto mu = random_probability(rng, 4), nu = random_probability(rng, 4);
  CHECK(kr_norm(std::span<const Rat>(mu), std::span<const Rat>(nu), rho) ==
        kantorovich(mu, nu, rho).value);
  // homogeneity on a scaled difference: ||2(mu - nu)|| = 2 ||mu - nu||
  std::vector<Rat> mu2(4), nu2(4);
  for (std::size_t i = 0; i < 4; ++i) {
    mu2[i] = 2 * mu[i];
    nu2[i] = 2 * nu[i];
  }
  CHECK(kr_norm(std::span<const Rat>(mu2), std::span<const Rat>(nu2), rho) ==
        2 * kantorovich(mu, nu, rho).value);
}

TEST_CASE("brute-force oracle refuses oversized supports") {
  auto rho = GroundMetric<Rat>::discrete(7);
  std::vector<Rat> mu(7, Rat(1, 7)), nu(7, Rat(1, 7));
  CHECK_THROWS_AS(brute_force_oracle(mu, nu, rho, 5), ResourceBoundError);
}

TEST_CASE("float mode stays within tolerance of the exact optimum") {
  Rng rng(512);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = rng.uniform(2, 5);
    auto rho = random_metric(rng, n, /*scaled=*/false);  // distances in [1,2]
    auto mu = random_probability(rng, n), nu = random_probability(rng, n);
    Rat exact = kantorovich(mu, nu, rho).value;

    GroundMetric<double> rho_d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) rho_d.set(i, j, to_double(rho(i, j)));
    double approx = kantorovich(to_doubles(mu), to_doubles(nu), rho_d).value;
    CHECK(std::abs(approx - to_double(exact)) < 1e-9);
  }
}
