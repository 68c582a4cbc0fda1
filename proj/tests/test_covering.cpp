#include <doctest.h>

#include <cmath>
#include <random>

#include "lipwidth/case_studies.hpp"
#include "lipwidth/covering.hpp"
#include "lipwidth/lip_maps.hpp"
#include "oracles.hpp"

using namespace lipwidth;

namespace {

FiniteSet basis5() {
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) {
    Point e(5, 0.0);
    e[i] = 1.0;
    pts.push_back(e);
  }
  return {NormedSpace::l2(5), pts};
}

struct RandomSet {
  FiniteSet set;
  oracle::Matrix D;
};

RandomSet random_set(std::mt19937_64& rng, std::size_t m, std::size_t dim, int norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts(m, Point(dim));
  for (auto& p : pts)
    for (auto& v : p) v = u(rng);
  const oracle::Norm on = norm == 0 ? oracle::Norm::L1 : norm == 1 ? oracle::Norm::L2 : oracle::Norm::Linf;
  NormedSpace s = norm == 0 ? NormedSpace::l1(dim) : norm == 1 ? NormedSpace::l2(dim) : NormedSpace::linf(dim);
  return {FiniteSet(s, pts), oracle::distances(on, pts)};
}

}  // namespace

TEST_SUITE("covering") {
  TEST_CASE("packing of the unit vectors") {
    const auto set = basis5();
    CHECK(greedy_packing(set, 1.0).size() == 5);
    CHECK(greedy_packing(set, 2.0).size() == 1);
    CHECK(greedy_packing(set, std::sqrt(2.0)).size() == 1);
  }

  TEST_CASE("covering of the unit vectors") {
    const auto set = basis5();
    const auto c = minimal_inner_covering(set, 1.5);
    CHECK(c.size() == 1);
    CHECK(c.exact);
    CHECK(minimal_inner_covering(set, 1.0).size() == 5);
    const FiniteSet single(NormedSpace::l2(1), {Point{0.3}});
    CHECK(minimal_inner_covering(single, 0.1).size() == 1);
  }

  TEST_CASE("sandwich on the unit vectors and a singleton") {
    const auto s = sandwich_audit(basis5(), 1.0);
    CHECK(s.packing_eps == 5);
    CHECK(s.covering_eps == 5);
    CHECK(s.packing_2eps == 1);
    CHECK(s.pass());
    const auto one = sandwich_audit(FiniteSet(NormedSpace::l2(1), {Point{0.0}}), 0.5);
    CHECK(one.packing_eps == 1);
    CHECK(one.covering_eps == 1);
    CHECK(one.packing_2eps == 1);
  }

  TEST_CASE("greedy packing is maximal on a 30-point linf cloud") {
    std::mt19937_64 rng(30);
    auto r = random_set(rng, 30, 2, 2);
    const auto p = greedy_packing(r.set, 0.3);
    CHECK(is_maximal_packing(r.set, p));
    // Independent admissibility scan.
    for (std::size_t i = 0; i < 30; ++i) {
      bool admissible = true;
      for (std::size_t j : p.indices) admissible = admissible && !oracle::close(r.D[i][j], 0.3);
      CHECK_FALSE(admissible);
    }
    for (std::size_t a : p.indices)
      for (std::size_t b : p.indices)
        if (a != b) CHECK(r.D[a][b] > 0.3);
  }

  TEST_CASE("exact cover and packing agree with enumeration") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
      auto r = random_set(rng, 4 + t % 11, 1 + t % 3, t % 3);
      for (double f : {0.1, 0.25, 0.4, 0.7}) {
        const double eps = f * diameter(r.set);
        const auto c = minimal_inner_covering(r.set, eps);
        REQUIRE(c.exact);
        CHECK(c.size() == oracle::min_inner_cover(r.D, eps));
        CHECK(c.radius <= eps * (1 + 1e-12));
        CHECK(greedy_packing(r.set, eps).size() <= oracle::max_packing(r.D, eps));
      }
    }
  }

  TEST_CASE("sandwich holds on 40 random l1 points") {
    std::mt19937_64 rng(40);
    auto r = random_set(rng, 40, 2, 0);
    const auto s = sandwich_audit(r.set, 0.25);
    CHECK(s.pass());
  }

  TEST_CASE("inner entropy matches enumeration on small sets") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 30; ++t) {
      auto r = random_set(rng, 5 + t % 8, 2, t % 3);
      for (unsigned n = 0; n <= 3; ++n) {
        const auto e = inner_entropy(r.set, n);
        const double truth = oracle::inner_entropy(r.D, n);
        CHECK(e.lower <= truth * (1 + 1e-12) + 1e-15);
        CHECK(e.upper >= truth * (1 - 1e-12));
        CHECK(e.upper - e.lower <= 1e-9 * diameter(r.set));
      }
    }
  }

  TEST_CASE("entropy is zero once 2^n reaches the set size and non-increasing in n") {
    std::mt19937_64 rng(4);
    auto r = random_set(rng, 9, 3, 1);
    const auto profile = inner_entropy_profile(r.set, 5);
    for (std::size_t n = 1; n < profile.size(); ++n) CHECK(profile[n].upper <= profile[n - 1].upper);
    CHECK(profile[4].upper == 0.0);
    CHECK(profile[5].upper == 0.0);
  }

  TEST_CASE("sequence-set covering at sigma_{2^n} uses at most 2^n centers") {
    for (unsigned n = 1; n <= 5; ++n) {
      const SequenceSet set(SequenceSetSpec::log_inv((std::size_t{1} << n) + 9));
      const double eps = set.sigma(std::size_t{1} << n);
      CHECK(minimal_inner_covering(set, eps).size() <= (std::size_t{1} << n));
    }
  }

  TEST_CASE("Lipschitz images do not increase entropy beyond gamma times") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // S0 in the domain cube, S1 = Phi(S0) for a path map.
    std::vector<Point> targets(4, Point(2));
    for (auto& p : targets)
      for (auto& v : p) v = u(rng);
    const LipschitzMapSpec map = build_path_map(NormedSpace::l2(2), targets);
    const double gamma = declared_lipschitz(map);
    std::vector<Point> dom, img;
    for (int i = 0; i < 12; ++i) {
      dom.push_back({u(rng)});
      img.push_back(evaluate(map, dom.back()));
    }
    const FiniteSet s0(NormedSpace::linf(1), dom), s1(NormedSpace::l2(2), img);
    for (unsigned k = 0; k <= 3; ++k)
      CHECK(inner_entropy(s1, k).lower <= gamma * inner_entropy(s0, k).upper * (1 + 1e-9) + 1e-12);
  }

  TEST_CASE("entropy chain audit") {
    std::mt19937_64 rng(2);
    auto r = random_set(rng, 12, 2, 2);
    for (unsigned n = 0; n <= 4; ++n) CHECK(entropy_chain_audit(r.set, n).pass);
  }
}
