#include <doctest.h>

#include <cmath>
#include <random>

#include "lipwidth/case_studies.hpp"
#include "lipwidth/width_bounds.hpp"
#include "oracles.hpp"

using namespace lipwidth;

namespace {

FiniteSet unit_vectors(std::size_t count) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < count; ++i) {
    Point e(count, 0.0);
    e[i] = 1.0;
    pts.push_back(e);
  }
  return {NormedSpace::l2(count), pts};
}

FiniteSet random_l2(std::uint64_t seed, std::size_t m, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts(m, Point(dim));
  for (auto& p : pts)
    for (auto& v : p) v = u(rng);
  return {NormedSpace::l2(dim), pts};
}

}  // namespace

TEST_SUITE("width") {
  TEST_CASE("fixed width of a constant map is the farthest point from its value") {
    const FiniteSet set = unit_vectors(4);
    ConstantMap c;
    c.domain = NormedSpace::linf(1);
    c.target = NormedSpace::l2(4);
    c.value = {0.25, 0.25, 0.25, 0.25};
    const auto cert = fixed_width_upper(set, c, std::vector<Point>(4, Point{0.0}));
    CHECK(cert.value == doctest::Approx(std::sqrt(0.75 * 0.75 + 3 * 0.0625)));
    CHECK(*cert.gamma == 0.0);
    CHECK(verify_witness(cert, &set).ok);
  }

  TEST_CASE("entropy-based upper certificate") {
    for (unsigned k : {1u, 2u}) {
      const FiniteSet set = random_l2(10 + k, 40, 3);
      const auto r = width_upper_from_entropy(set, k, 1);
      const double rad = radius_upper(set).upper;
      CHECK(*r.certificate.gamma == doctest::Approx(std::ldexp(rad, static_cast<int>(k))));
      CHECK(r.declared <= *r.certificate.gamma * (1 + 1e-12));
      CHECK(r.fixed_width <= r.entropy_upper + 1e-12);
      CHECK(r.certificate.value == r.entropy_upper);
      CHECK(r.entropy_upper == doctest::Approx(inner_entropy(set, k).upper));
      CHECK(verify_witness(r.certificate, &set).ok);
      CHECK(empirical_lipschitz(r.map, 2, 3000) <= r.declared * (1 + 1e-9));
    }
  }

  TEST_CASE("width-upper rejects oversized grids") {
    CHECK_THROWS_AS(width_upper_from_entropy(random_l2(1, 5, 2), 13, 2), PreconditionError);
  }

  TEST_CASE("packing-count lower bound on unit vectors matches a direct scan") {
    const FiniteSet set = unit_vectors(64);
    const auto grid = default_eps_grid(diameter(set));
    REQUIRE(grid.size() == 64);
    CHECK(grid.back() == doctest::Approx(std::sqrt(2.0)));
    const unsigned n = 1;
    const double gamma = 1.0;
    // Packing at 4 eps has 64 points below sqrt2, otherwise 1.
    double expected = 0.0;
    for (double e : grid) {
      const double count = 4 * e < std::sqrt(2.0) ? 64.0 : 1.0;
      if (std::log2(count) > n * std::log2(3 * gamma / e)) expected = std::max(expected, e);
    }
    const auto cert = width_lower_certified(set, n, gamma, grid);
    CHECK(expected > 0.0);
    CHECK(cert.value == expected);
    CHECK(cert.direction == BoundDirection::Lower);
    CHECK(verify_witness(cert, &set).ok);
  }

  TEST_CASE("lower bounds never exceed upper bounds at the same gamma") {
    for (std::uint64_t s = 0; s < 6; ++s) {
      const FiniteSet set = random_l2(100 + s, 60, 4);
      const auto up = width_upper_from_entropy(set, 1, 1);
      const auto lo = width_lower_certified(set, 1, *up.certificate.gamma, default_eps_grid(diameter(set)));
      CHECK(lo.value <= up.certificate.value + 1e-12);
    }
  }

  TEST_CASE("function-driven lower bound") {
    const auto spec = SequenceSetSpec::log_inv(16);
    const auto lo = width_lower_certified(
        [&](double r) { return sequence_packing_lower_log2(spec, r); }, 2, 3.0, default_eps_grid(1.0));
    CHECK(lo.value >= 0.0);
    CHECK(lo.value <= 1.0);
  }

  TEST_CASE("l2 Kolmogorov residuals agree with Gram-Schmidt") {
    const FiniteSet set = random_l2(77, 25, 5);
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> basis(2, Point(5));
    for (auto& b : basis)
      for (auto& v : b) v = u(rng);
    const auto k = kolmogorov_upper_l2(set, basis);
    double worst = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double truth = oracle::projection_residual(set.points()[i], basis);
      CHECK(k.residuals[i] == doctest::Approx(truth).epsilon(1e-9));
      worst = std::max(worst, truth);
    }
    CHECK(k.certificate.value == doctest::Approx(worst).epsilon(1e-9));
    CHECK(verify_witness(k.certificate, &set).ok);
  }

  TEST_CASE("rank-deficient bases are rejected") {
    const FiniteSet set = random_l2(1, 4, 3);
    CHECK_THROWS(kolmogorov_upper_l2(set, {{1, 0, 0}, {2, 0, 0}}));
  }

  TEST_CASE("affine-ball comparison stays below the Kolmogorov value") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const FiniteSet set = random_l2(200 + s, 30, 4);
      const auto k = kolmogorov_upper(set, coordinate_basis(4, {0, 1}));
      const auto tk = tk_comparison(set, k);
      CHECK(tk.holds);
      CHECK(tk.certificate.value <= k.certificate.value + 1e-9);
      CHECK(declared_lipschitz(LipschitzMapSpec{tk.map}) <= tk.gamma * (1 + 1e-12));
      CHECK(verify_witness(tk.certificate, &set).ok);
    }
  }

  TEST_CASE("transport cells give at most 4/n") {
    const FiniteSet set = transport_set(128);
    for (unsigned n : {1u, 2u, 4u, 8u, 16u}) {
      const auto k = kolmogorov_upper_transport(set, n);
      CHECK(k.certificate.value <= 4.0 / n + 1e-12);
      CHECK(verify_witness(k.certificate, &set).ok);
    }
  }

  TEST_CASE("transfer check") {
    CarlInput vac{3, 2.0, 1.0, 0.5};
    const auto v = carl_transfer_check(vac, [](unsigned long long) { return 0.0; });
    CHECK(v.vacuous);
    CHECK(v.pass);

    CarlInput in{4, 2.0, 0.05, 0.5};
    const auto r = carl_transfer_check(in, [](unsigned long long) { return 0.01; });
    CHECK(r.m == static_cast<unsigned long long>(std::ceil(4 * std::log2(3 * 2.0 / 0.05))));
    CHECK(r.implied_upper == doctest::Approx(0.1));
    CHECK_FALSE(r.contradiction);
    CHECK(r.pass);

    const auto bad = carl_transfer_check(in, [](unsigned long long) { return 0.3; });
    CHECK(bad.contradiction);
    CHECK_FALSE(bad.pass);
  }

  TEST_CASE("schedules") {
    CHECK(power_log_delta(4, 1.0, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(growing_gamma(2, 3.0, 1.0, 2.0) == doctest::Approx(24.0));
  }

  TEST_CASE("certificates survive a JSON round trip") {
    const FiniteSet set = random_l2(5, 20, 3);
    const auto r = width_upper_from_entropy(set, 1, 2);
    const auto back = certificate_from_json(to_json(r.certificate));
    CHECK(back.value == r.certificate.value);
    CHECK(*back.gamma == *r.certificate.gamma);
    CHECK(back.n == 2);
    CHECK(verify_witness(back, &set).ok);
  }

  TEST_CASE("tampered witnesses are rejected") {
    const FiniteSet set = unit_vectors(64);
    auto cert = width_lower_certified(set, 1, 1.0, default_eps_grid(diameter(set)));
    cert.value *= 8;
    CHECK_FALSE(verify_witness(cert, &set).ok);
  }
}
