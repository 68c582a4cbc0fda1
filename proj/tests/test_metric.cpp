#include <doctest.h>

#include <cmath>
#include <random>

#include "lipwidth/case_studies.hpp"
#include "lipwidth/metric.hpp"
#include "oracles.hpp"

using namespace lipwidth;

namespace {

std::vector<Point> unit_vectors(std::size_t count) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < count; ++i) {
    Point e(count, 0.0);
    e[i] = 1.0;
    pts.push_back(e);
  }
  return pts;
}

}  // namespace

TEST_SUITE("metric") {
  TEST_CASE("l2 distance between unit vectors is sqrt 2") {
    const auto space = NormedSpace::l2(2);
    CHECK(space.distance(Point{1, 0}, Point{0, 1}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }

  TEST_CASE("distance to itself is zero in every norm") {
    const Point x{0.3, -1.2, 4.0};
    for (const auto& s : {NormedSpace::l1(3), NormedSpace::l2(3), NormedSpace::linf(3),
                          NormedSpace::weighted_linf({1, 2, 3})})
      CHECK(s.distance(x, x) == 0.0);
  }

  TEST_CASE("dimension mismatch is rejected") {
    const auto space = NormedSpace::l2(3);
    CHECK_THROWS_AS(space.distance(Point{1, 2}, Point{1, 2, 3}), DimensionMismatch);
  }

  TEST_CASE("weights must be positive") {
    CHECK_THROWS_AS(NormedSpace::weighted_linf({1.0, 0.0}), PreconditionError);
  }

  TEST_CASE("step functions: indicator distance equals 2|a-b| and matches quadrature") {
    const FiniteSet set = transport_set(64);
    const auto& b = set.space().breakpoints();
    for (std::size_t i : {0u, 5u, 17u, 64u})
      for (std::size_t j : {0u, 3u, 40u, 63u}) {
        const double a = static_cast<double>(i) / 64.0, c = static_cast<double>(j) / 64.0;
        const double d = set.distance(i, j);
        CHECK(d == doctest::Approx(2.0 * std::abs(a - c)).epsilon(1e-14));
        CHECK(std::abs(d - oracle::quad_l1_step(b, set.points()[i], set.points()[j], 12800)) <= 1e-9);
      }
  }

  TEST_CASE("norm axioms on random triples") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& s : {NormedSpace::l1(3), NormedSpace::l2(3), NormedSpace::linf(3),
                          NormedSpace::weighted_linf({0.5, 1, 4})}) {
      for (int t = 0; t < 200; ++t) {
        Point x(3), y(3), z(3);
        for (int i = 0; i < 3; ++i) {
          x[i] = u(rng);
          y[i] = u(rng);
          z[i] = u(rng);
        }
        const double c = u(rng);
        Point cx = x;
        for (double& v : cx) v *= c;
        CHECK(s.norm(cx) == doctest::Approx(std::abs(c) * s.norm(x)).epsilon(1e-12));
        CHECK(s.distance(x, z) <= s.distance(x, y) + s.distance(y, z) + 1e-12);
        CHECK(s.distance(x, y) == s.distance(y, x));
        CHECK(s.norm(x) >= 0.0);
      }
    }
  }

  TEST_CASE("metric axioms on all triples of a 30-point set") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> pts(30, Point(2));
    for (auto& p : pts)
      for (auto& v : p) v = u(rng);
    const FiniteSet set(NormedSpace::l1(2), pts);
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j < 30; ++j) {
        CHECK((i == j) == (set.distance(i, j) == 0.0));
        for (std::size_t k = 0; k < 30; ++k)
          CHECK(set.distance(i, k) <= set.distance(i, j) + set.distance(j, k) + 1e-12);
      }
  }

  TEST_CASE("diameter") {
    CHECK(diameter(FiniteSet(NormedSpace::l2(5), unit_vectors(5))) == doctest::Approx(std::sqrt(2.0)));
    CHECK(diameter(FiniteSet(NormedSpace::l2(2), {Point{0.5, 0.5}})) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> pts(20, Point(3));
    for (auto& p : pts)
      for (auto& v : p) v = u(rng);
    double brute = 0.0;
    for (const auto& a : pts)
      for (const auto& b : pts) brute = std::max(brute, oracle::dist(oracle::Norm::Linf, a, b));
    CHECK(diameter(FiniteSet(NormedSpace::linf(3), pts)) == brute);
    CHECK_THROWS_AS(diameter(FiniteSet(NormedSpace::l2(1), {})), PreconditionError);
  }

  TEST_CASE("radius bounds") {
    const auto pair = radius_upper(FiniteSet(NormedSpace::linf(1), {Point{-1}, Point{1}}));
    CHECK(pair.upper == 1.0);
    CHECK(pair.lower == 1.0);
    CHECK(pair.center == Point{0.0});

    const auto basis = radius_upper(FiniteSet(NormedSpace::l2(5), unit_vectors(5)));
    CHECK(basis.upper <= std::sqrt(2.0));
    CHECK(basis.lower == doctest::Approx(std::sqrt(2.0) / 2));

    CHECK(radius_upper(FiniteSet(NormedSpace::l2(2), {Point{1, 1}})).upper == 0.0);
  }

  TEST_CASE("diameter/2 <= radius upper <= diameter on random sets") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
      std::vector<Point> pts(2 + t % 9, Point(1 + t % 4));
      for (auto& p : pts)
        for (auto& v : p) v = u(rng);
      const FiniteSet set(t % 2 ? NormedSpace::l1(pts[0].size()) : NormedSpace::l2(pts[0].size()), pts);
      const auto r = radius_upper(set);
      const double d = diameter(set);
      CHECK(d / 2 <= r.upper + 1e-15);
      CHECK(r.upper <= d + 1e-15);
    }
  }

  TEST_CASE("norm names round trip") {
    for (auto k : {NormKind::L1, NormKind::L2, NormKind::Linf, NormKind::WeightedLinf, NormKind::L1Step})
      CHECK(norm_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(norm_kind_from_string("l3"));
  }
}
