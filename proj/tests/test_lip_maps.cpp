#include <doctest.h>

#include <cmath>
#include <random>

#include "lipwidth/json_io.hpp"
#include "lipwidth/lip_maps.hpp"

using namespace lipwidth;

namespace {

BumpSum two_bumps() {
  BumpSum b;
  b.domain = NormedSpace::linf(1);
  b.target = NormedSpace::l2(2);
  b.centers = {{-0.5}, {0.5}};
  b.radii = {0.5, 0.5};
  b.amplitudes = {1.0, 2.0};
  b.directions = {{1.0, 0.0}, {0.0, 1.0}};
  b.offset = {0.0, 0.0};
  return b;
}

// Difference quotient maximum by brute force on a dense 1-d grid.
double grid_lipschitz(const LipschitzMapSpec& map, const NormedSpace& target, std::size_t samples) {
  std::vector<Point> img;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    img.push_back(evaluate(map, Point{y}));
  }
  double best = 0.0;
  const double h = 2.0 / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i + 1 < samples; ++i) best = std::max(best, target.distance(img[i], img[i + 1]) / h);
  return best;
}

}  // namespace

TEST_SUITE("lip_maps") {
  TEST_CASE("bump sum reproduces amplitudes at centers and vanishes outside") {
    const LipschitzMapSpec map = two_bumps();
    CHECK(evaluate(map, Point{-0.5}) == Point{1.0, 0.0});
    CHECK(evaluate(map, Point{0.5}) == Point{0.0, 2.0});
    CHECK(evaluate(map, Point{0.0}) == Point{0.0, 0.0});
    CHECK(evaluate(map, Point{-1.0}) == Point{0.0, 0.0});
    const Point q = evaluate(map, Point{0.25});
    CHECK(q[1] == doctest::Approx(1.0));
  }

  TEST_CASE("declared constant is max sigma/rho") {
    const LipschitzMapSpec map = two_bumps();
    CHECK(declared_lipschitz(map) == 4.0);
    CHECK(grid_lipschitz(map, NormedSpace::l2(2), 4001) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(empirical_lipschitz(map, 3, 5000) <= 4.0 * (1 + 1e-12));
  }

  TEST_CASE("overlapping supports are invalid") {
    BumpSum b = two_bumps();
    b.radii = {0.6, 0.6};
    CHECK_THROWS_AS(validate(LipschitzMapSpec{b}), PreconditionError);
  }

  TEST_CASE("evaluation outside the unit ball is rejected") {
    CHECK_THROWS_AS(evaluate(LipschitzMapSpec{two_bumps()}, Point{1.5}), PreconditionError);
  }

  TEST_CASE("path map interpolates and has the declared slope") {
    const auto path = build_path_map(NormedSpace::linf(1), {{0.0}, {2.0}});
    const LipschitzMapSpec map = path;
    CHECK(evaluate(map, Point{0.0})[0] == doctest::Approx(1.0));
    CHECK(evaluate(map, Point{-1.0})[0] == 0.0);
    CHECK(evaluate(map, Point{1.0})[0] == 2.0);
    CHECK(declared_lipschitz(map) == doctest::Approx(1.0));

    const auto zig = build_path_map(NormedSpace::l2(2), {{0, 0}, {1, 0}, {1, 1}, {0, 3}});
    const LipschitzMapSpec zmap = zig;
    CHECK(evaluate(zmap, Point{1.0 / 3.0})[1] == doctest::Approx(1.0));
    const double declared = declared_lipschitz(zmap);
    CHECK(grid_lipschitz(zmap, NormedSpace::l2(2), 3001) <= declared * (1 + 1e-9));
    CHECK(grid_lipschitz(zmap, NormedSpace::l2(2), 3001) == doctest::Approx(declared).epsilon(1e-6));
  }

  TEST_CASE("constant map has Lipschitz constant zero") {
    ConstantMap c;
    c.domain = NormedSpace::linf(2);
    c.target = NormedSpace::l2(3);
    c.value = {1, 2, 3};
    const LipschitzMapSpec map = c;
    CHECK(evaluate(map, Point{0.3, -0.9}) == Point{1, 2, 3});
    CHECK(declared_lipschitz(map) == 0.0);
    CHECK(empirical_lipschitz(map, 1, 100) == 0.0);
  }

  TEST_CASE("affine ball map") {
    AffineBall a;
    a.target = NormedSpace::l2(2);
    a.origin = {1.0, 1.0};
    a.gamma = 3.0;
    a.basis = {{1.0, 0.0}};
    const LipschitzMapSpec map = a;
    CHECK(evaluate(map, Point{0.5}) == Point{2.5, 1.0});
    CHECK(declared_lipschitz(map) == 3.0);
    CHECK(empirical_lipschitz(map, 9, 1000) <= 3.0 * (1 + 1e-12));
  }

  TEST_CASE("entropy map with k=1 n=1 sends the half-cube centers to the targets") {
    CHECK(entropy_grid_center(0, 1, 1) == Point{-0.5});
    CHECK(entropy_grid_center(1, 1, 1) == Point{0.5});
    const std::vector<Point> centers{{2.0, 0.0}, {0.0, -1.0}};
    const Point offset{0.0, 0.0};
    const BumpSum b = build_entropy_map(NormedSpace::l2(2), centers, 1, 1, offset);
    const LipschitzMapSpec map = b;
    for (std::size_t j = 0; j < 2; ++j) {
      const Point v = evaluate(map, entropy_grid_center(j, 1, 1));
      CHECK(v[0] == doctest::Approx(centers[j][0]));
      CHECK(v[1] == doctest::Approx(centers[j][1]));
    }
    // Amplitude 2 over radius 1/2.
    CHECK(declared_lipschitz(map) == doctest::Approx(4.0));
    CHECK(grid_lipschitz(map, NormedSpace::l2(2), 4001) <= 4.0 * (1 + 1e-9));
  }

  TEST_CASE("entropy grid in two dimensions is lexicographic with the first axis slowest") {
    CHECK(entropy_grid_center(0, 1, 2) == Point{-0.5, -0.5});
    CHECK(entropy_grid_center(1, 1, 2) == Point{-0.5, 0.5});
    CHECK(entropy_grid_center(2, 1, 2) == Point{0.5, -0.5});
    CHECK(entropy_grid_center(3, 2, 1) == Point{0.75});
  }

  TEST_CASE("bump strata stay below the declared constant") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> centers(16, Point(3));
    for (auto& p : centers)
      for (auto& v : p) v = u(rng);
    const BumpSum b = build_entropy_map(NormedSpace::l1(3), centers, 2, 2, Point{0, 0, 0});
    const double declared = declared_lipschitz(LipschitzMapSpec{b});
    const auto s = bump_strata_lipschitz(b, 4, 500);
    CHECK(s.same_ball <= declared * (1 + 1e-9));
    CHECK(s.both_outside == 0.0);
    CHECK(s.inside_outside <= declared * (1 + 1e-9));
    CHECK(s.different_balls <= declared * (1 + 1e-9));
  }

  TEST_CASE("refr map for sigma_j = 2^-j with gamma 2 and N 3") {
    const auto sigma = [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j)); };
    CHECK(refr_level(0.5, 2.0) == 1);
    CHECK(refr_level(0.25, 2.0) == 2);
    const RefrMap r = build_refr_map(sigma, 2.0, 1, 3);
    REQUIRE(r.materialized == 3);
    CHECK(r.cubes.levels == std::vector<int>{1, 2, 3});
    CHECK(r.sum_upper == doctest::Approx(0.875));
    CHECK(r.rhs == 1.0);
    CHECK(r.sigma_n == 0.125);
    CHECK(r.declared == 2.0);
    CHECK(audit_pairwise_overlap(r.cubes).ok);
    for (std::size_t j = 0; j < 3; ++j) {
      const SparseVector v = evaluate_sparse(r.map, r.cubes.center(j));
      REQUIRE(v.size() == 1);
      CHECK(v[0].first == r.map.coordinates[j]);
      CHECK(v[0].second == sigma(j + 1));
    }
    CHECK(evaluate_sparse(r.map, Point{1.0}).empty());
    CHECK(empirical_lipschitz(LipschitzMapSpec{r.map}, 5, 4000) <= 2.0 * (1 + 1e-12));
  }

  TEST_CASE("refr map rejects a volume condition that fails") {
    const auto sigma = [](std::size_t) { return 1.0; };
    CHECK_THROWS(build_refr_map(sigma, 2.0, 1, 3));
  }

  TEST_CASE("sparse distance") {
    CHECK(sparse_linf_distance({{0, 1.0}}, {{1, 0.5}}) == 1.0);
    CHECK(sparse_linf_distance({{2, 0.25}}, {{2, 1.0}}) == 0.75);
    CHECK(sparse_linf_distance({}, {}) == 0.0);
  }

  TEST_CASE("maps survive a JSON round trip") {
    const LipschitzMapSpec map = two_bumps();
    const LipschitzMapSpec back = map_from_json(map_to_json(map));
    CHECK(variant_name(back) == "bump_sum");
    CHECK(evaluate(back, Point{0.4}) == evaluate(map, Point{0.4}));
    CHECK(declared_lipschitz(back) == declared_lipschitz(map));
  }
}
