#include <doctest.h>

#include <random>

#include "lipwidth/cube_allocation.hpp"

using namespace lipwidth;

namespace {

// Independent overlap test on the real-valued boxes.
bool boxes_disjoint(const CubeAllocation& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      bool separated = false;
      for (unsigned ax = 0; ax < a.n && !separated; ++ax) {
        const double li = a.lower_corner(i, ax), lj = a.lower_corner(j, ax);
        separated = li + a.side(i) <= lj || lj + a.side(j) <= li;
      }
      if (!separated) return false;
    }
  return true;
}

bool inside_unit_cube(const CubeAllocation& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (unsigned ax = 0; ax < a.n; ++ax)
      if (a.lower_corner(i, ax) < -1.0 || a.lower_corner(i, ax) + a.side(i) > 1.0) return false;
  return true;
}

}  // namespace

TEST_SUITE("cubes") {
  TEST_CASE("four half-cubes tile [-1,1]") {
    const auto a = allocate_dyadic_cubes(1, {1, 1, 1, 1});
    REQUIRE(a.size() == 4);
    double covered = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(a.side(j) == 0.5);
      covered += a.side(j);
    }
    CHECK(covered == 2.0);
    CHECK(boxes_disjoint(a));
    CHECK(inside_unit_cube(a));
    CHECK(audit_pairwise_overlap(a).ok);
    CHECK(audit_dyadic_nesting(a).ok);
  }

  TEST_CASE("mixed levels in the square") {
    const auto a = allocate_dyadic_cubes(2, {0, 1, 1, 1, 1});
    REQUIRE(a.size() == 5);
    CHECK(a.side(0) == 1.0);
    for (std::size_t j = 1; j < 5; ++j) CHECK(a.side(j) == 0.5);
    CHECK(boxes_disjoint(a));
    CHECK(inside_unit_cube(a));
    CHECK(audit_pairwise_overlap(a).ok);
    CHECK(audit_dyadic_nesting(a).ok);
    CHECK(dyadic_volume(2, {0, 1, 1, 1, 1}) == 2.0);
  }

  TEST_CASE("oversized requests are rejected") {
    CHECK(dyadic_volume(1, {0, 0, 0}) == 3.0);
    CHECK_THROWS_AS(allocate_dyadic_cubes(1, {0, 0, 0}), PreconditionError);
    CHECK_THROWS_AS(allocate_dyadic_cubes(2, {0, 0, 0, 0, 3}), PreconditionError);
  }

  TEST_CASE("exactly full requests fit") {
    const auto a = allocate_dyadic_cubes(2, {0, 0, 0, 0});
    CHECK(a.size() == 4);
    CHECK(boxes_disjoint(a));
  }

  TEST_CASE("random feasible requests yield disjoint cubes in the requested order") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 40; ++t) {
      const unsigned n = 1 + t % 3;
      std::uniform_int_distribution<int> lvl(0, 4);
      std::vector<int> levels;
      for (;;) {
        const int l = lvl(rng);
        levels.push_back(l);
        if (dyadic_volume(n, levels) > static_cast<double>(1u << n)) {
          levels.pop_back();
          break;
        }
        if (levels.size() > 60) break;
      }
      const auto a = allocate_dyadic_cubes(n, levels);
      REQUIRE(a.size() == levels.size());
      CHECK(a.levels == levels);
      CHECK(boxes_disjoint(a));
      CHECK(inside_unit_cube(a));
      CHECK(audit_pairwise_overlap(a).ok);
      CHECK(audit_dyadic_nesting(a).ok);
    }
  }

  TEST_CASE("audits catch a duplicated cube") {
    auto a = allocate_dyadic_cubes(1, {1, 1});
    a.coords[1] = a.coords[0];
    CHECK_FALSE(audit_pairwise_overlap(a).ok);
    CHECK_FALSE(audit_dyadic_nesting(a).ok);
  }
}
