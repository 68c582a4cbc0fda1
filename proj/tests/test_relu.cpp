#include <doctest.h>

#include <random>
#include <string>

#include "lipwidth/relu.hpp"
#include "oracles.hpp"

using namespace lipwidth;

namespace {

std::string to_decimal(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace

TEST_SUITE("relu") {
  TEST_CASE("parameter counts") {
    CHECK(param_count(1, 2, 1) == 7);
    CHECK(param_count(2, 2, 2) == 15);
    CHECK(param_count(3, 4, 3) == (3 * 4 + 4) + 2 * (4 * 4 + 4) + 5);
  }

  TEST_CASE("two-unit network computes |x|") {
    ReLUNetConfig cfg{1, 2, 1, 0};
    // A_0 = (1, -1)^T, b_0 = 0; A_1 = (1, 1), b_1 = 0.
    const Point y{1, -1, 0, 0, 1, 1, 0};
    for (double x : {0.0, 0.3, 0.75, 1.0}) CHECK(forward(cfg, y, Point{x}) == doctest::Approx(x));
  }

  TEST_CASE("forward pass agrees with a dense reference") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0), v(0.0, 1.0);
    for (unsigned d : {1u, 2u, 3u})
      for (unsigned W : {2u, 3u})
        for (unsigned n : {1u, 2u, 3u}) {
          ReLUNetConfig cfg{d, W, n, 0};
          Point y(param_count(cfg));
          for (auto& t : y) t = u(rng);
          Point x(d);
          for (auto& t : x) t = v(rng);
          const auto tr = forward_trace(cfg, y, x);
          CHECK(tr.value == doctest::Approx(oracle::relu_forward(d, W, n, y, x)).epsilon(1e-12));
          for (unsigned j = 0; j <= n; ++j) CHECK(tr.layer_max[j] <= layer_bound(cfg, j));
        }
  }

  TEST_CASE("C_1 = 11 for W = 2, d = 1") {
    const auto t = lip_bound({1, 2, 1, 0});
    CHECK(t.c_n_exact == "11");
    CHECK(t.c_n == 11.0);
    CHECK(t.constants[0] == 2.0);
  }

  TEST_CASE("exact constants match the 128-bit recursion") {
    for (unsigned d : {1u, 2u, 5u})
      for (unsigned W : {2u, 3u, 7u})
        for (unsigned n : {1u, 4u, 12u, 20u}) {
          const auto t = lip_bound({d, W, n, 0});
          CHECK(t.c_n_exact == to_decimal(oracle::relu_constant(d, W, n)));
          CHECK(t.recursion_matches_closed_form);
          CHECK(t.below_coarse);
          CHECK(t.c_n <= t.coarse_bound);
        }
  }

  TEST_CASE("C prime") { CHECK(c_prime(1) == 6.5); }

  TEST_CASE("sampled ratios stay below C_n and do not depend on the worker count") {
    const ReLUNetConfig cfg{1, 2, 2, 0};
    const auto a = verify_lipschitz(cfg, 3, 200, 1);
    const auto b = verify_lipschitz(cfg, 3, 200, 3);
    CHECK(a.pass);
    CHECK(a.max_ratio <= a.bound);
    CHECK(a.max_ratio == b.max_ratio);
    const auto c = verify_lipschitz(cfg, 3, 200, 1, ReLUSampling::LastLayer);
    CHECK(c.pass);
  }

  TEST_CASE("inputs outside the domain are rejected") {
    const ReLUNetConfig cfg{1, 2, 1, 0};
    CHECK_THROWS_AS(forward(cfg, Point(7, 2.0), Point{0.5}), PreconditionError);
    CHECK_THROWS_AS(forward(cfg, Point(6, 0.0), Point{0.5}), PreconditionError);
    CHECK_THROWS_AS(forward(cfg, Point(7, 0.0), Point{1.5}), PreconditionError);
  }

  TEST_CASE("default grids") {
    CHECK(default_grid(1) == 256);
    CHECK(default_grid(2) == 32);
    CHECK(default_grid(4) == 10);
    CHECK(omega_grid({2, 2, 1, 3}).size() == 9);
  }
}
